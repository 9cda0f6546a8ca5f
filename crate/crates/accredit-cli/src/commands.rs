//! Command implementations behind the clap front end.

use std::path::Path;
use std::time::Instant;

use accredit_core::hqs::{AttachmentPoint, ErrorConfig};
use accredit_core::inversion::{
    synthesize_inversion, synthesize_inversion_xy_model, verify_inversion_numeric,
    verify_inversion_symbolic, InversionBasis,
};
use accredit_core::oracle::{
    chi_offdiagonal_max, detection_rate_empirical, exact_p_inco, p_inco_monte_carlo,
    process_matrix, target_distribution, twirl, twirl_weights, variation_distance_slices,
    ENUMERATION_QUBIT_CAP,
};
use accredit_core::protocol::{compute_n_traps, ProtocolError, RunPlan};
use rayon::prelude::*;

use crate::config::ConfigFile;
use crate::error::CliError;
use crate::fixtures;
use crate::report::{
    self, DetectReport, InvertCheckReport, NtrapsReport, PIncoReport, RunReport, TwirlReport,
    VdReport, TOOL_NAME, TOOL_VERSION,
};

fn protocol_error(e: ProtocolError) -> CliError {
    match &e {
        ProtocolError::Engine(accredit_core::engine::EngineError::CapExceeded { .. }) => {
            CliError::capacity(e.to_string())
        }
        ProtocolError::Oracle(accredit_core::oracle::OracleError::EnumerationCapExceeded {
            ..
        }) => CliError::capacity(e.to_string()),
        _ => CliError::validation(e.to_string()),
    }
}

/// Build the thread pool for `--threads`; thread count changes speed only,
/// never results.
fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    let count = threads.or_else(|| {
        std::env::var("ACCREDIT_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = count {
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| CliError::validation(format!("thread pool: {e}")))
}

pub fn cmd_run(
    config_path: &Path,
    seed_override: Option<u64>,
    threads: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let started = Instant::now();
    let config = ConfigFile::load(config_path)?;
    let protocol_config = config.build_protocol_config(seed_override)?;
    let qubit_count = protocol_config.hamiltonian.qubit_count();

    let plan = RunPlan::new(protocol_config).map_err(protocol_error)?;
    let pool = thread_pool(threads)?;
    let records = pool.install(|| {
        (1..=plan.total_runs())
            .into_par_iter()
            .map(|i| plan.execute_run(i))
            .collect::<Result<Vec<_>, _>>()
    });
    let result = plan.assemble(records.map_err(protocol_error)?);

    let report = RunReport::from_result(
        config,
        &result,
        qubit_count,
        started.elapsed().as_millis() as u64,
    );
    report::emit(&report, out).map_err(|e| CliError::validation(format!("write report: {e}")))
}

pub fn cmd_ntraps(theta: f64, alpha: f64, out: Option<&Path>) -> Result<(), CliError> {
    let n_traps = compute_n_traps(theta, alpha).map_err(protocol_error)?;
    let report = NtrapsReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        command: "ntraps".into(),
        theta,
        alpha,
        n_traps,
    };
    report::emit(&report, out).map_err(|e| CliError::validation(format!("write report: {e}")))
}

pub fn cmd_invert_check(fixture: &Path, t: f64, out: Option<&Path>) -> Result<(), CliError> {
    let sum = fixtures::load_pauli_sum(fixture)?;
    let h = fixtures::classify_xy_fixture(&sum)?;
    let circuit = if h.has_onsite() {
        synthesize_inversion_xy_model(&h)
    } else {
        synthesize_inversion(&h)
    }
    .map_err(|e| CliError::validation(e.to_string()))?;

    let symbolic_pass = verify_inversion_symbolic(h.sum(), &circuit);
    let numeric_max_error = verify_inversion_numeric(h.sum(), &circuit, t)
        .map_err(|e| CliError::capacity(e.to_string()))?;

    let report = InvertCheckReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        command: "invert_check".into(),
        fixture: fixture.display().to_string(),
        qubit_count: h.qubit_count(),
        family: if h.has_onsite() { "xy_model" } else { "xy" }.into(),
        basis: match circuit.basis {
            InversionBasis::ZOnChromatic => "z_on_chromatic",
            InversionBasis::CompositeIyX => "composite_iy_x",
        }
        .into(),
        circuit: circuit.string.letters_string(),
        phase: circuit.string.phase.to_string(),
        symbolic_pass,
        t,
        numeric_max_error,
    };
    report::emit(&report, out).map_err(|e| CliError::validation(format!("write report: {e}")))
}

pub fn cmd_oracle_vd(left: &Path, right: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let p = fixtures::load_distribution(left)?;
    let q = fixtures::load_distribution(right)?;
    let vd = variation_distance_slices(&p, &q)
        .map_err(|e| CliError::validation(e.to_string()))?;
    let report = VdReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        command: "oracle_vd".into(),
        left: left.display().to_string(),
        right: right.display().to_string(),
        variation_distance: vd,
    };
    report::emit(&report, out).map_err(|e| CliError::validation(format!("write report: {e}")))
}

pub fn cmd_oracle_p_inco(
    config_path: &Path,
    mc_draws: Option<usize>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = ConfigFile::load(config_path)?;
    let h = config.build_hamiltonian()?;
    if h.has_onsite() {
        return Err(CliError::validation(
            "traps exist only for the pure XY family; drop hamiltonian.onsite",
        ));
    }
    let errors = config.build_error_config()?;
    let t = config.target.t;

    let report = match mc_draws {
        None => {
            if h.qubit_count() > ENUMERATION_QUBIT_CAP {
                return Err(CliError::capacity(format!(
                    "exact enumeration caps at {ENUMERATION_QUBIT_CAP} qubits; pass --mc-draws for Monte-Carlo",
                )));
            }
            let p_inco =
                exact_p_inco(&h, t, &errors).map_err(|e| CliError::validation(e.to_string()))?;
            let spec = config.build_target_spec()?;
            let ideal = target_distribution(&spec, &ErrorConfig::noiseless())
                .map_err(|e| CliError::validation(e.to_string()))?;
            let noisy = target_distribution(&spec, &errors)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let vd = variation_distance_slices(&ideal, &noisy)
                .map_err(|e| CliError::validation(e.to_string()))?;
            PIncoReport {
                tool: TOOL_NAME.into(),
                version: TOOL_VERSION.into(),
                command: "oracle_p_inco".into(),
                mode: "enumeration".into(),
                p_inco,
                stderr: None,
                two_p_inco: 2.0 * p_inco,
                vd_exact: Some(vd),
                bound_holds: Some(vd <= 2.0 * p_inco + 1e-12),
                target_ideal: Some(ideal),
                target_noisy: Some(noisy),
            }
        }
        Some(draws) => {
            let (p_inco, stderr) =
                p_inco_monte_carlo(&h, t, &errors, draws.max(2), seed.unwrap_or(0))
                    .map_err(|e| CliError::validation(e.to_string()))?;
            PIncoReport {
                tool: TOOL_NAME.into(),
                version: TOOL_VERSION.into(),
                command: "oracle_p_inco".into(),
                mode: "monte_carlo".into(),
                p_inco,
                stderr: Some(stderr),
                two_p_inco: 2.0 * p_inco,
                vd_exact: None,
                bound_holds: None,
                target_ideal: None,
                target_noisy: None,
            }
        }
    };
    report::emit(&report, out).map_err(|e| CliError::validation(format!("write report: {e}")))
}

pub fn cmd_oracle_twirl(
    config_path: &Path,
    attach: Option<&str>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = ConfigFile::load(config_path)?;
    let errors = config.build_error_config()?;
    let (point, channel) = match attach {
        Some(name) => {
            let point = AttachmentPoint::from_name(name)
                .ok_or_else(|| CliError::validation(format!("unknown attachment point {name}")))?;
            let channel = errors.channel(point).ok_or_else(|| {
                CliError::validation(format!("no channel configured at {name}"))
            })?;
            (point, channel)
        }
        None => errors
            .channels()
            .next()
            .ok_or_else(|| CliError::validation("config has no error channels"))?,
    };
    let chi_before = process_matrix(channel).map_err(|e| CliError::capacity(e.to_string()))?;
    let twirled = twirl(channel).map_err(|e| CliError::capacity(e.to_string()))?;
    let chi_after = process_matrix(&twirled).map_err(|e| CliError::capacity(e.to_string()))?;
    let weights = twirl_weights(channel).map_err(|e| CliError::capacity(e.to_string()))?;

    let report = TwirlReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        command: "oracle_twirl".into(),
        attach: point.name().into(),
        label: channel.label().into(),
        chi_offdiagonal_before: chi_offdiagonal_max(&chi_before),
        chi_offdiagonal_after: chi_offdiagonal_max(&chi_after),
        weights,
    };
    report::emit(&report, out).map_err(|e| CliError::validation(format!("write report: {e}")))
}

pub fn cmd_oracle_detect(
    config_path: &Path,
    samples: usize,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = ConfigFile::load(config_path)?;
    let h = config.build_hamiltonian()?;
    if h.has_onsite() {
        return Err(CliError::validation(
            "traps exist only for the pure XY family; drop hamiltonian.onsite",
        ));
    }
    let errors = config.build_error_config()?;
    let seed = seed.unwrap_or_else(|| config.master_seed());
    let (rate, stderr) =
        detection_rate_empirical(&h, config.target.t, &errors, samples.max(1), seed)
            .map_err(|e| CliError::validation(e.to_string()))?;
    let report = DetectReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        command: "oracle_detect".into(),
        samples: samples.max(1),
        seed,
        rate,
        stderr,
    };
    report::emit(&report, out).map_err(|e| CliError::validation(format!("write report: {e}")))
}

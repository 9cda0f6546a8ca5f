//! The accreditation protocol end to end: trap count, run scheduling,
//! target placement, tallying, and the epsilon bound.
//!
//! One protocol execution schedules `N_tr` traps plus one target at a
//! uniformly random position, samples one outcome per run from its exact
//! distribution, and reports
//!
//! ```text
//! epsilon = min(1, 2 * n_incorrect / n_traps + theta)
//! ```
//!
//! the observed incorrect fraction doubled (the bound on the variation
//! distance) plus the accuracy margin theta, clamped to [0, 1]. The raw
//! doubled fraction is reported alongside.
//!
//! Every run draws from its own counter-based RNG substream
//! `(master_seed, run_index)`, with the scheduling draw on substream 0, so
//! executions are bit-reproducible regardless of evaluation order or
//! parallelism.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{sample, BitString, EngineError};
use crate::hamiltonian::AccreditableHamiltonian;
use crate::hqs::{ErrorConfig, ExecContext, HqsCircuit};
use crate::oracle::{
    exact_p_inco, target_distribution, variation_distance_slices, OracleError,
};
use crate::trap::{
    build_target, build_trap, draw_trap_randomness, trap_is_correct, TargetSpec, TrapError,
};

/// Errors from protocol configuration and execution.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolError {
    /// Theta must lie strictly inside (0, 1).
    InvalidTheta(f64),
    /// Alpha must lie in [0, 1).
    InvalidAlpha(f64),
    /// The target spec and the accreditable Hamiltonian disagree.
    SpecMismatch,
    /// Traps require the pure XY family (no onsite terms).
    OnsiteNotAccreditable,
    Trap(TrapError),
    Engine(EngineError),
    Oracle(OracleError),
}

impl fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolError::InvalidTheta(t) => write!(f, "theta must be in (0, 1), got {t}"),
            ProtocolError::InvalidAlpha(a) => write!(f, "alpha must be in [0, 1), got {a}"),
            ProtocolError::SpecMismatch => {
                write!(f, "target spec Hamiltonian differs from the accreditable Hamiltonian")
            }
            ProtocolError::OnsiteNotAccreditable => {
                write!(f, "the protocol accredits only the pure XY family")
            }
            ProtocolError::Trap(e) => write!(f, "{e}"),
            ProtocolError::Engine(e) => write!(f, "{e}"),
            ProtocolError::Oracle(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ProtocolError {}

impl From<TrapError> for ProtocolError {
    fn from(e: TrapError) -> Self {
        ProtocolError::Trap(e)
    }
}

impl From<EngineError> for ProtocolError {
    fn from(e: EngineError) -> Self {
        ProtocolError::Engine(e)
    }
}

impl From<OracleError> for ProtocolError {
    fn from(e: OracleError) -> Self {
        ProtocolError::Oracle(e)
    }
}

/// Number of trap simulations for accuracy `theta` and confidence `alpha`:
/// `ceil((2 / theta^2) ln(2 / (1 - alpha))) + 1`.
pub fn compute_n_traps(theta: f64, alpha: f64) -> Result<u64, ProtocolError> {
    if !(theta > 0.0 && theta < 1.0) || !theta.is_finite() {
        return Err(ProtocolError::InvalidTheta(theta));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(ProtocolError::InvalidAlpha(alpha));
    }
    let raw = (2.0 / (theta * theta)) * Float::ln(2.0 / (1.0 - alpha));
    Ok(Float::ceil(raw) as u64 + 1)
}

/// Full configuration of one protocol execution.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub hamiltonian: AccreditableHamiltonian,
    pub target: TargetSpec,
    pub theta: f64,
    pub alpha: f64,
    pub master_seed: u64,
    pub errors: ErrorConfig,
}

impl ProtocolConfig {
    /// Identity preparation and measurement on the target.
    pub fn plain(
        hamiltonian: AccreditableHamiltonian,
        t: f64,
        theta: f64,
        alpha: f64,
        master_seed: u64,
        errors: ErrorConfig,
    ) -> Self {
        let target = TargetSpec::plain(hamiltonian.sum().clone(), t);
        ProtocolConfig {
            hamiltonian,
            target,
            theta,
            alpha,
            master_seed,
            errors,
        }
    }
}

/// What a scheduled run was.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Target,
    Trap,
}

impl RunKind {
    pub fn name(self) -> &'static str {
        match self {
            RunKind::Target => "target",
            RunKind::Trap => "trap",
        }
    }
}

/// Log entry for one scheduled run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub index: u64,
    pub kind: RunKind,
    /// Compact digest of the trap randomness; absent for the target.
    pub randomness: Option<String>,
    pub outcome: BitString,
    /// All-zero check; absent for the target.
    pub correct: Option<bool>,
}

/// Result of one protocol execution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub target_outcome: BitString,
    pub target_index: u64,
    pub n_traps: u64,
    pub n_incorrect: u64,
    /// `2 * n_incorrect / n_traps`, before the theta margin and the clamp.
    pub raw_two_p_hat: f64,
    pub epsilon: f64,
    pub theta: f64,
    pub alpha: f64,
    pub master_seed: u64,
    pub runs: Vec<RunRecord>,
}

/// A validated, ready-to-execute schedule. Runs are independent given their
/// index, and may be executed in any order or in parallel; assembly is
/// order-insensitive.
pub struct RunPlan {
    config: ProtocolConfig,
    ctx: ExecContext,
    target_circuit: HqsCircuit,
    n_traps: u64,
    target_index: u64,
}

impl RunPlan {
    pub fn new(config: ProtocolConfig) -> Result<RunPlan, ProtocolError> {
        let n_traps = compute_n_traps(config.theta, config.alpha)?;
        if config.hamiltonian.has_onsite() {
            return Err(ProtocolError::OnsiteNotAccreditable);
        }
        if config.target.hamiltonian != *config.hamiltonian.sum() {
            return Err(ProtocolError::SpecMismatch);
        }
        let ctx = ExecContext::new(config.hamiltonian.sum(), config.target.t)?;
        let target_circuit = build_target(&config.target)?;
        // Probe a trap build now so coloring/size problems surface before
        // any run executes.
        build_trap(
            &config.hamiltonian,
            config.target.t,
            &crate::trap::TrapRandomness::trivial(config.hamiltonian.qubit_count()),
        )?;
        let total = n_traps + 1;
        let mut scheduler = ChaCha8Rng::seed_from_u64(config.master_seed);
        scheduler.set_stream(0);
        let target_index = scheduler.random_range(1..=total);
        Ok(RunPlan {
            config,
            ctx,
            target_circuit,
            n_traps,
            target_index,
        })
    }

    pub fn n_traps(&self) -> u64 {
        self.n_traps
    }

    pub fn total_runs(&self) -> u64 {
        self.n_traps + 1
    }

    pub fn target_index(&self) -> u64 {
        self.target_index
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    /// Execute run `index` (1-based). Deterministic in `(plan, index)`.
    pub fn execute_run(&self, index: u64) -> Result<RunRecord, ProtocolError> {
        debug_assert!(index >= 1 && index <= self.total_runs());
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.master_seed);
        rng.set_stream(index);
        if index == self.target_index {
            let state = self.ctx.execute(&self.target_circuit, &self.config.errors)?;
            let outcome = sample(&state, &mut rng);
            Ok(RunRecord {
                index,
                kind: RunKind::Target,
                randomness: None,
                outcome,
                correct: None,
            })
        } else {
            let n = self.config.hamiltonian.qubit_count();
            let draw = draw_trap_randomness(n, &mut rng);
            let trap = build_trap(&self.config.hamiltonian, self.config.target.t, &draw)?;
            let state = self.ctx.execute(&trap, &self.config.errors)?;
            let outcome = sample(&state, &mut rng);
            let correct = trap_is_correct(&outcome);
            Ok(RunRecord {
                index,
                kind: RunKind::Trap,
                randomness: Some(draw.digest()),
                outcome,
                correct: Some(correct),
            })
        }
    }

    /// Tally records (any order) into the protocol result.
    pub fn assemble(&self, mut records: Vec<RunRecord>) -> ProtocolResult {
        records.sort_by_key(|r| r.index);
        debug_assert_eq!(records.len() as u64, self.total_runs());
        let n_incorrect = records
            .iter()
            .filter(|r| r.correct == Some(false))
            .count() as u64;
        let target = records
            .iter()
            .find(|r| r.kind == RunKind::Target)
            .expect("schedule contains the target run");
        let raw = 2.0 * n_incorrect as f64 / self.n_traps as f64;
        let epsilon = (raw + self.config.theta).min(1.0);
        ProtocolResult {
            target_outcome: target.outcome.clone(),
            target_index: self.target_index,
            n_traps: self.n_traps,
            n_incorrect,
            raw_two_p_hat: raw,
            epsilon,
            theta: self.config.theta,
            alpha: self.config.alpha,
            master_seed: self.config.master_seed,
            runs: records,
        }
    }
}

/// Run the whole protocol serially.
pub fn run_protocol(config: ProtocolConfig) -> Result<ProtocolResult, ProtocolError> {
    let plan = RunPlan::new(config)?;
    let records = (1..=plan.total_runs())
        .map(|i| plan.execute_run(i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(plan.assemble(records))
}

/// Bound check against the brute-force oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Exact variation distance between the ideal and erroneous target
    /// output distributions.
    pub vd_exact: f64,
    /// Exact trap-failure probability over the full randomness space.
    pub p_inco_exact: f64,
    /// `2 * p_inco_exact`, the exact bound the protocol estimates.
    pub epsilon_exact: f64,
    /// Whether `vd_exact <= 2 * p_inco_exact` (with numerical slack).
    pub holds: bool,
}

/// Compute the exact variation distance and the exact trap-failure bound
/// for a configuration, and report whether the bound holds.
pub fn validate_bound(config: &ProtocolConfig) -> Result<BoundReport, ProtocolError> {
    let ideal = target_distribution(&config.target, &ErrorConfig::noiseless())?;
    let noisy = target_distribution(&config.target, &config.errors)?;
    let vd_exact = variation_distance_slices(&ideal, &noisy)?;
    let p_inco_exact = exact_p_inco(&config.hamiltonian, config.target.t, &config.errors)?;
    let epsilon_exact = (2.0 * p_inco_exact).min(1.0);
    Ok(BoundReport {
        vd_exact,
        p_inco_exact,
        epsilon_exact,
        holds: vd_exact <= 2.0 * p_inco_exact + 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ErrorChannel;
    use crate::graph::square_lattice;
    use crate::hamiltonian::{build_accreditable, CouplingTable};
    use crate::hqs::{AttachmentPoint, ComplianceMode};

    fn lattice_ham(rows: usize, cols: usize, j: f64) -> AccreditableHamiltonian {
        let g = square_lattice(rows, cols);
        build_accreditable(&g, &CouplingTable::uniform(&g, j)).unwrap()
    }

    #[test]
    fn n_traps_pinned_values() {
        assert_eq!(compute_n_traps(0.2, 0.9).unwrap(), 151);
        assert_eq!(compute_n_traps(0.1, 0.95).unwrap(), 739);
        // approaching the open boundary theta -> 1
        assert_eq!(compute_n_traps(0.9999, 0.0).unwrap(), 3);
        assert!(matches!(
            compute_n_traps(1.0, 0.5),
            Err(ProtocolError::InvalidTheta(_))
        ));
        assert!(matches!(
            compute_n_traps(0.0, 0.5),
            Err(ProtocolError::InvalidTheta(_))
        ));
        assert!(matches!(
            compute_n_traps(0.5, 1.0),
            Err(ProtocolError::InvalidAlpha(_))
        ));
    }

    #[test]
    fn error_free_device_reports_epsilon_theta() {
        let h = lattice_ham(1, 2, 1.0);
        let cfg = ProtocolConfig::plain(h, 0.7, 0.45, 0.6, 42, ErrorConfig::noiseless());
        let res = run_protocol(cfg).unwrap();
        assert_eq!(res.n_incorrect, 0);
        assert!((res.epsilon - 0.45).abs() < 1e-15);
        assert_eq!(res.runs.len() as u64, res.n_traps + 1);
        assert_eq!(
            res.runs.iter().filter(|r| r.kind == RunKind::Target).count(),
            1
        );
    }

    #[test]
    fn full_depolarizing_saturates_epsilon() {
        let h = lattice_ham(1, 2, 1.0);
        let errors = ErrorConfig::new(ComplianceMode::ModelCompliant).with_channel(
            AttachmentPoint::Evolution2,
            ErrorChannel::depolarizing(1.0, alloc::vec![1, 2]).unwrap(),
        );
        let cfg = ProtocolConfig::plain(h, 0.7, 0.3, 0.8, 7, errors);
        let res = run_protocol(cfg).unwrap();
        // traps fail w.p. 3/4; the tally pushes epsilon to the clamp
        assert_eq!(res.epsilon, 1.0);
        assert!(res.n_incorrect > res.n_traps / 2);
    }

    #[test]
    fn identical_seeds_reproduce_identical_results() {
        let h = lattice_ham(1, 2, 0.8);
        let errors = ErrorConfig::new(ComplianceMode::ModelCompliant).with_channel(
            AttachmentPoint::Evolution1,
            ErrorChannel::bit_flip(0.2, 1).unwrap(),
        );
        let mk = || {
            ProtocolConfig::plain(lattice_ham(1, 2, 0.8), 0.8, 0.4, 0.7, 123, errors.clone())
        };
        let _ = h;
        let a = run_protocol(mk()).unwrap();
        let b = run_protocol(mk()).unwrap();
        assert_eq!(a, b);
        // and out-of-order execution assembles to the same result
        let plan = RunPlan::new(mk()).unwrap();
        let mut records: Vec<_> = (1..=plan.total_runs())
            .rev()
            .map(|i| plan.execute_run(i).unwrap())
            .collect();
        records.reverse(); // arbitrary permutation before assemble
        records.swap(0, 3);
        let c = plan.assemble(records);
        assert_eq!(a, c);
    }

    #[test]
    fn target_position_is_uniform_over_seeds() {
        // theta = 0.7, alpha = 0.5 gives 7 traps, so 8 possible positions.
        let h = lattice_ham(1, 2, 1.0);
        let mut counts = [0u64; 8];
        for seed in 0..10_000u64 {
            let cfg =
                ProtocolConfig::plain(h.clone(), 0.5, 0.7, 0.5, seed, ErrorConfig::noiseless());
            let plan = RunPlan::new(cfg).unwrap();
            assert_eq!(plan.total_runs(), 8);
            counts[(plan.target_index() - 1) as usize] += 1;
        }
        let expected = 10_000.0 / 8.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // 7 degrees of freedom, p = 0.001 critical value
        assert!(chi2 < 24.322, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn epsilon_stays_in_range_and_tracks_failures() {
        let h = lattice_ham(1, 2, 1.0);
        for (seed, p) in [(1u64, 0.0f64), (2, 0.15), (3, 0.6)] {
            let mut errors = ErrorConfig::new(ComplianceMode::ModelCompliant);
            if p > 0.0 {
                errors = errors.with_channel(
                    AttachmentPoint::Evolution2,
                    ErrorChannel::bit_flip(p, 2).unwrap(),
                );
            }
            let cfg = ProtocolConfig::plain(h.clone(), 0.9, 0.25, 0.75, seed, errors);
            let res = run_protocol(cfg).unwrap();
            assert!(res.epsilon >= res.theta - 1e-15 && res.epsilon <= 1.0);
            assert_eq!(res.epsilon == res.theta, res.n_incorrect == 0);
            assert!((res.raw_two_p_hat
                - 2.0 * res.n_incorrect as f64 / res.n_traps as f64)
                .abs()
                < 1e-15);
        }
    }

    #[test]
    fn hoeffding_coverage_on_a_small_fixture() {
        let h = lattice_ham(1, 2, 1.0);
        let errors = ErrorConfig::new(ComplianceMode::ModelCompliant).with_channel(
            AttachmentPoint::Evolution2,
            ErrorChannel::bit_flip(0.25, 1).unwrap(),
        );
        let p_inco = exact_p_inco(&h, 0.8, &errors).unwrap();
        let (theta, alpha) = (0.3, 0.8);
        let reps = 500;
        let mut covered = 0;
        for seed in 0..reps {
            let cfg =
                ProtocolConfig::plain(h.clone(), 0.8, theta, alpha, seed as u64, errors.clone());
            let res = run_protocol(cfg).unwrap();
            if (res.raw_two_p_hat - 2.0 * p_inco).abs() <= theta {
                covered += 1;
            }
        }
        let frac = covered as f64 / reps as f64;
        assert!(frac >= alpha, "coverage {frac} below alpha {alpha}");
    }

    #[test]
    fn validate_bound_error_free_and_noisy() {
        let h = lattice_ham(1, 2, 1.0);
        let cfg = ProtocolConfig::plain(h.clone(), 0.8, 0.2, 0.9, 1, ErrorConfig::noiseless());
        let report = validate_bound(&cfg).unwrap();
        assert_eq!(report.vd_exact, 0.0);
        assert!(report.holds);

        let errors = ErrorConfig::new(ComplianceMode::ModelCompliant).with_channel(
            AttachmentPoint::Evolution1,
            ErrorChannel::amplitude_damping(0.3, 2).unwrap(),
        );
        let cfg = ProtocolConfig::plain(h, 0.8, 0.2, 0.9, 1, errors);
        let report = validate_bound(&cfg).unwrap();
        assert!(report.holds, "{report:?}");
        assert!(report.vd_exact <= report.epsilon_exact + 1e-12);
    }

    #[test]
    fn onsite_hamiltonians_are_rejected() {
        let g = square_lattice(1, 2);
        let h = crate::hamiltonian::build_xy_model(
            &g,
            &CouplingTable::uniform(&g, 1.0).with_onsite(0.5),
        )
        .unwrap();
        let target = TargetSpec::plain(h.sum().clone(), 0.4);
        let cfg = ProtocolConfig {
            hamiltonian: h,
            target,
            theta: 0.2,
            alpha: 0.9,
            master_seed: 0,
            errors: ErrorConfig::noiseless(),
        };
        assert!(matches!(
            RunPlan::new(cfg),
            Err(ProtocolError::OnsiteNotAccreditable)
        ));
    }
}

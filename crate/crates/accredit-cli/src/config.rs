//! The run configuration file: a TOML document with sections
//! `hamiltonian`, `target`, `protocol`, `error`, and `seed`.
//!
//! ```toml
//! [hamiltonian]
//! lattice = [2, 2]          # rows, cols
//! uniform_j = 1.0           # or: edges = [[1, 2, 0.5], [3, 4, -0.25]]
//! # onsite = 1.0            # XY-model variant (invert-check only)
//!
//! [target]
//! t = 0.7
//! a = [{ qubit = 1, gate = "X" }]
//! d = [{ qubit = 2, euler = [0.3, 0.1, 0.2] }]
//!
//! [protocol]
//! theta = 0.2
//! alpha = 0.9
//!
//! [error]
//! mode = "model_compliant"  # or "unconstrained"
//!
//! [[error.channel]]
//! attach = "evolution_2"
//! kind = "bit_flip"         # bit_flip | phase_flip | depolarizing |
//!                           # amplitude_damping | pauli_mixture | kraus_explicit
//! qubits = [1]
//! p = 0.3
//!
//! [seed]
//! master = 42
//! ```
//!
//! Parse errors (exit 2) cite line and column; semantic problems are
//! validation errors (exit 3); register sizes beyond the simulation cap are
//! capacity errors (exit 4).

use accredit_core::engine::{euler_matrix, ErrorChannel, NamedGate, DENSITY_QUBIT_CAP};
use accredit_core::graph::square_lattice;
use accredit_core::hamiltonian::{
    build_accreditable, build_xy_model, AccreditableHamiltonian, CouplingTable,
};
use accredit_core::hqs::{AttachmentPoint, ComplianceMode, ErrorConfig};
use accredit_core::linalg::{CMat, C64};
use accredit_core::pauli::PauliLetter;
use accredit_core::protocol::ProtocolConfig;
use accredit_core::trap::TargetSpec;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub hamiltonian: HamiltonianSection,
    pub target: TargetSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolSection>,
    #[serde(default, skip_serializing_if = "ErrorSection::is_empty")]
    pub error: ErrorSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSection {
    /// Rows and columns of the square lattice.
    pub lattice: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform_j: Option<f64>,
    /// Per-edge couplings as `[u, v, j]` triples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize, f64)>>,
    /// Onsite Z strength; only the inversion tooling accepts this.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub onsite: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    pub t: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<GateSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d: Vec<GateSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub qubit: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub theta: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, rename = "channel", skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelSpec>,
}

impl ErrorSection {
    pub fn is_empty(&self) -> bool {
        self.mode.is_none() && self.channels.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub attach: String,
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Pauli-mixture terms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<MixtureTerm>>,
    /// Explicit Kraus operators: matrices given as rows of `[re, im]` pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureTerm {
    pub p: f64,
    pub pauli: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSection {
    pub master: u64,
}

impl ConfigFile {
    /// Parse the TOML text; syntax and shape problems report line/column.
    pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
        toml::from_str(text).map_err(|e| CliError::parse(format!("config parse error: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<ConfigFile, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::parse(format!("cannot read config {}: {e}", path.display()))
        })?;
        ConfigFile::parse(&text)
    }

    pub fn qubit_count(&self) -> usize {
        self.hamiltonian.lattice[0] * self.hamiltonian.lattice[1]
    }

    /// Build the accreditable Hamiltonian (validating couplings and
    /// colourability). Register sizes above the simulation cap are capacity
    /// errors.
    pub fn build_hamiltonian(&self) -> Result<AccreditableHamiltonian, CliError> {
        let [rows, cols] = self.hamiltonian.lattice;
        if rows < 1 || cols < 1 {
            return Err(CliError::validation("lattice dimensions must be >= 1"));
        }
        if rows * cols > DENSITY_QUBIT_CAP {
            return Err(CliError::capacity(format!(
                "lattice of {} qubits exceeds the simulation cap of {DENSITY_QUBIT_CAP}",
                rows * cols
            )));
        }
        let graph = square_lattice(rows, cols);
        let mut couplings = match (&self.hamiltonian.uniform_j, &self.hamiltonian.edges) {
            (Some(j), None) => CouplingTable::uniform(&graph, *j),
            (None, Some(edges)) => CouplingTable::from_edges(edges.iter().copied()),
            (Some(_), Some(_)) => {
                return Err(CliError::validation(
                    "give either uniform_j or edges, not both",
                ))
            }
            (None, None) => {
                return Err(CliError::validation(
                    "hamiltonian needs uniform_j or an edges list",
                ))
            }
        };
        if let Some(u) = self.hamiltonian.onsite {
            couplings = couplings.with_onsite(u);
        }
        let build = if self.hamiltonian.onsite.is_some() {
            build_xy_model(&graph, &couplings)
        } else {
            build_accreditable(&graph, &couplings)
        };
        build.map_err(|e| CliError::validation(format!("hamiltonian: {e}")))
    }

    /// Compile the target's per-qubit A'/D' gates.
    pub fn build_target_spec(&self) -> Result<TargetSpec, CliError> {
        let h = self.build_hamiltonian()?;
        let n = h.qubit_count();
        if !self.target.t.is_finite() {
            return Err(CliError::validation("target.t must be finite"));
        }
        let mut spec = TargetSpec::plain(h.sum().clone(), self.target.t);
        for (layer, specs, name) in [
            (&mut spec.a_prime, &self.target.a, "a"),
            (&mut spec.d_prime, &self.target.d, "d"),
        ] {
            for g in specs {
                if g.qubit == 0 || g.qubit > n {
                    return Err(CliError::validation(format!(
                        "target.{name}: qubit {} outside 1..={n}",
                        g.qubit
                    )));
                }
                layer[g.qubit - 1] = gate_matrix(g, name)?;
            }
        }
        Ok(spec)
    }

    pub fn build_error_config(&self) -> Result<ErrorConfig, CliError> {
        let n = self.qubit_count();
        let mode = match self.error.mode.as_deref() {
            None | Some("model_compliant") => ComplianceMode::ModelCompliant,
            Some("unconstrained") => ComplianceMode::Unconstrained,
            Some(other) => {
                return Err(CliError::validation(format!(
                    "error.mode must be model_compliant or unconstrained, got {other}"
                )))
            }
        };
        let mut cfg = ErrorConfig::new(mode);
        for spec in &self.error.channels {
            let point = AttachmentPoint::from_name(&spec.attach).ok_or_else(|| {
                CliError::validation(format!("unknown attachment point {}", spec.attach))
            })?;
            for &q in &spec.qubits {
                if q == 0 || q > n {
                    return Err(CliError::validation(format!(
                        "channel at {}: qubit {q} outside 1..={n}",
                        spec.attach
                    )));
                }
            }
            cfg = cfg.with_channel(point, build_channel(spec)?);
        }
        Ok(cfg)
    }

    pub fn master_seed(&self) -> u64 {
        self.seed.as_ref().map(|s| s.master).unwrap_or(0)
    }

    /// Assemble the full protocol configuration for `run`.
    pub fn build_protocol_config(&self, seed_override: Option<u64>) -> Result<ProtocolConfig, CliError> {
        let protocol = self.protocol.as_ref().ok_or_else(|| {
            CliError::validation("config needs a [protocol] section with theta and alpha")
        })?;
        if !(protocol.theta > 0.0 && protocol.theta < 1.0) {
            return Err(CliError::validation(format!(
                "protocol.theta must be in (0, 1), got {}",
                protocol.theta
            )));
        }
        if !(0.0..1.0).contains(&protocol.alpha) {
            return Err(CliError::validation(format!(
                "protocol.alpha must be in [0, 1), got {}",
                protocol.alpha
            )));
        }
        let hamiltonian = self.build_hamiltonian()?;
        if hamiltonian.has_onsite() {
            return Err(CliError::validation(
                "the protocol accredits only the pure XY family; drop hamiltonian.onsite",
            ));
        }
        let target = self.build_target_spec()?;
        let errors = self.build_error_config()?;
        Ok(ProtocolConfig {
            hamiltonian,
            target,
            theta: protocol.theta,
            alpha: protocol.alpha,
            master_seed: seed_override.unwrap_or_else(|| self.master_seed()),
            errors,
        })
    }
}

fn gate_matrix(spec: &GateSpec, layer: &str) -> Result<CMat, CliError> {
    match (&spec.gate, &spec.euler) {
        (Some(name), None) => {
            let g = match name.as_str() {
                "I" => NamedGate::I,
                "X" => NamedGate::X,
                "Y" => NamedGate::Y,
                "Z" => NamedGate::Z,
                "H" => NamedGate::H,
                "S" => NamedGate::S,
                "Sdg" => NamedGate::Sdg,
                other => {
                    return Err(CliError::validation(format!(
                        "target.{layer}: unknown gate {other} (use I X Y Z H S Sdg or euler)"
                    )))
                }
            };
            Ok(g.matrix())
        }
        (None, Some([theta, phi, lambda])) => Ok(euler_matrix(*theta, *phi, *lambda)),
        _ => Err(CliError::validation(format!(
            "target.{layer}: give exactly one of gate or euler"
        ))),
    }
}

fn build_channel(spec: &ChannelSpec) -> Result<ErrorChannel, CliError> {
    let invalid = |msg: String| CliError::validation(format!("channel at {}: {msg}", spec.attach));
    let single_qubit = || -> Result<usize, CliError> {
        if spec.qubits.len() != 1 {
            return Err(invalid(format!(
                "{} acts on exactly one qubit",
                spec.kind
            )));
        }
        Ok(spec.qubits[0])
    };
    let channel = match spec.kind.as_str() {
        "bit_flip" => {
            let p = spec.p.ok_or_else(|| invalid("bit_flip needs p".into()))?;
            ErrorChannel::bit_flip(p, single_qubit()?)
        }
        "phase_flip" => {
            let p = spec.p.ok_or_else(|| invalid("phase_flip needs p".into()))?;
            ErrorChannel::phase_flip(p, single_qubit()?)
        }
        "depolarizing" => {
            let p = spec.p.ok_or_else(|| invalid("depolarizing needs p".into()))?;
            ErrorChannel::depolarizing(p, spec.qubits.clone())
        }
        "amplitude_damping" => {
            let gamma = spec
                .gamma
                .ok_or_else(|| invalid("amplitude_damping needs gamma".into()))?;
            ErrorChannel::amplitude_damping(gamma, single_qubit()?)
        }
        "pauli_mixture" => {
            let terms = spec
                .terms
                .as_ref()
                .ok_or_else(|| invalid("pauli_mixture needs terms".into()))?;
            let parsed: Vec<(f64, Vec<PauliLetter>)> = terms
                .iter()
                .map(|t| {
                    let letters: Option<Vec<PauliLetter>> =
                        t.pauli.chars().map(PauliLetter::from_char).collect();
                    letters
                        .map(|l| (t.p, l))
                        .ok_or_else(|| invalid(format!("bad pauli string {}", t.pauli)))
                })
                .collect::<Result<_, _>>()?;
            ErrorChannel::pauli_mixture(&parsed, spec.qubits.clone())
        }
        "kraus_explicit" => {
            let kraus = spec
                .kraus
                .as_ref()
                .ok_or_else(|| invalid("kraus_explicit needs kraus matrices".into()))?;
            let dim = 1usize << spec.qubits.len();
            let mut mats = Vec::with_capacity(kraus.len());
            for m in kraus {
                if m.len() != dim || m.iter().any(|row| row.len() != dim) {
                    return Err(invalid(format!("each kraus matrix must be {dim}x{dim}")));
                }
                let mut flat = Vec::with_capacity(dim * dim);
                for row in m {
                    for &[re, im] in row {
                        flat.push(C64::new(re, im));
                    }
                }
                mats.push(CMat::from_row_slice(dim, dim, &flat));
            }
            ErrorChannel::new("kraus_explicit", mats, spec.qubits.clone())
        }
        other => {
            return Err(invalid(format!(
                "unknown kind {other} (bit_flip, phase_flip, depolarizing, \
                 amplitude_damping, pauli_mixture, kraus_explicit)"
            )))
        }
    };
    channel.map_err(|e| invalid(e.to_string()))
}

//! Machine-readable reports. Every command emits one flat JSON document;
//! field order is fixed by the struct definitions, so identical inputs give
//! byte-identical output (modulo the wall-clock duration field).

use accredit_core::protocol::{ProtocolResult, RunKind};
use serde::{Deserialize, Serialize};

use crate::config::ConfigFile;

pub const TOOL_NAME: &str = "accredit";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Wall-clock duration; the one field golden tests normalize away.
    pub duration_ms: u64,
    pub master_seed: u64,
    pub theta: f64,
    pub alpha: f64,
    pub qubit_count: usize,
    pub n_traps: u64,
    pub n_incorrect: u64,
    pub raw_two_p_hat: f64,
    pub epsilon: f64,
    pub target_index: u64,
    pub target_outcome: String,
    pub config: ConfigFile,
    pub runs: Vec<RunEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunEntry {
    pub index: u64,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub randomness: Option<String>,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correct: Option<bool>,
}

impl RunReport {
    pub fn from_result(
        config: ConfigFile,
        result: &ProtocolResult,
        qubit_count: usize,
        duration_ms: u64,
    ) -> Self {
        RunReport {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: "run".into(),
            duration_ms,
            master_seed: result.master_seed,
            theta: result.theta,
            alpha: result.alpha,
            qubit_count,
            n_traps: result.n_traps,
            n_incorrect: result.n_incorrect,
            raw_two_p_hat: result.raw_two_p_hat,
            epsilon: result.epsilon,
            target_index: result.target_index,
            target_outcome: result.target_outcome.to_string(),
            config,
            runs: result
                .runs
                .iter()
                .map(|r| RunEntry {
                    index: r.index,
                    kind: match r.kind {
                        RunKind::Target => "target".into(),
                        RunKind::Trap => "trap".into(),
                    },
                    randomness: r.randomness.clone(),
                    outcome: r.outcome.to_string(),
                    correct: r.correct,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NtrapsReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub theta: f64,
    pub alpha: f64,
    pub n_traps: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvertCheckReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub fixture: String,
    pub qubit_count: usize,
    pub family: String,
    pub basis: String,
    pub circuit: String,
    pub phase: String,
    pub symbolic_pass: bool,
    pub t: f64,
    pub numeric_max_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VdReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub left: String,
    pub right: String,
    pub variation_distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PIncoReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub mode: String,
    pub p_inco: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    pub two_p_inco: f64,
    /// Exact target-side variation distance and the bound check, available
    /// in enumeration mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vd_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_holds: Option<bool>,
    /// Exact target output distributions over the Z basis, ideal and under
    /// the configured errors (enumeration mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_ideal: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_noisy: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwirlReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub attach: String,
    pub label: String,
    pub chi_offdiagonal_before: f64,
    pub chi_offdiagonal_after: f64,
    /// Stochastic Pauli weights of the twirled channel, by Pauli code.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub samples: usize,
    pub seed: u64,
    pub rate: f64,
    pub stderr: f64,
}

/// Serialize a report as pretty JSON with a trailing newline.
pub fn render<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Write to the file when given, stdout otherwise.
pub fn emit<T: Serialize>(report: &T, out: Option<&std::path::Path>) -> std::io::Result<()> {
    let text = render(report);
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

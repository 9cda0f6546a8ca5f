//! Fixture file formats: textual Pauli sums (one `<coeff> <letters>` term
//! per line), graph fixtures, and outcome-distribution files (one
//! probability per line, basis order, `#` comments).
//!
//! Pauli-sum fixtures are classified back into the XY family by reading off
//! the interaction graph: weight-2 terms must come in XX/YY pairs with equal
//! coefficients (the edges), weight-1 Z terms with one shared coefficient on
//! every site form the onsite variant.

use std::collections::BTreeMap;
use std::path::Path;

use accredit_core::graph::InteractionGraph;
use accredit_core::hamiltonian::{
    build_accreditable, build_xy_model, AccreditableHamiltonian, CouplingTable,
};
use accredit_core::pauli::{PauliLetter, WeightedPauliSum};

use crate::error::CliError;

pub fn load_pauli_sum(path: &Path) -> Result<WeightedPauliSum, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read fixture {}: {e}", path.display())))?;
    WeightedPauliSum::parse_text(&text).map_err(|e| CliError::parse(e.to_string()))
}

/// One probability per line; must form a distribution over a power-of-two
/// number of outcomes.
pub fn load_distribution(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read fixture {}: {e}", path.display())))?;
    let mut probs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let p: f64 = line.parse().map_err(|_| {
            CliError::parse(format!(
                "{} line {}: not a probability",
                path.display(),
                idx + 1
            ))
        })?;
        probs.push(p);
    }
    if probs.is_empty() {
        return Err(CliError::parse(format!(
            "{}: no probabilities found",
            path.display()
        )));
    }
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|&p| p < -1e-12) || (total - 1.0).abs() > 1e-9 {
        return Err(CliError::validation(format!(
            "{}: entries must be non-negative and sum to 1 (got {total})",
            path.display()
        )));
    }
    Ok(probs)
}

/// Reconstruct an accreditable Hamiltonian (pure XY or the onsite variant)
/// from a symbolic Pauli sum, deriving the interaction graph from the
/// two-body terms.
pub fn classify_xy_fixture(sum: &WeightedPauliSum) -> Result<AccreditableHamiltonian, CliError> {
    let n = sum.qubit_count();
    let mut xx: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut yy: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut onsite: BTreeMap<usize, f64> = BTreeMap::new();

    for term in sum.terms() {
        let support: Vec<(usize, PauliLetter)> = term
            .letters
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_identity())
            .map(|(i, &l)| (i + 1, l))
            .collect();
        match support.as_slice() {
            [(q, PauliLetter::Z)] => {
                onsite.insert(*q, term.coefficient);
            }
            [(u, a), (v, b)] if a == b && matches!(a, PauliLetter::X | PauliLetter::Y) => {
                let table = if *a == PauliLetter::X { &mut xx } else { &mut yy };
                table.insert((*u, *v), term.coefficient);
            }
            _ => {
                return Err(CliError::validation(format!(
                    "fixture is not an XY/XY-model Hamiltonian: term {} {:?}",
                    term.coefficient,
                    term.letters.iter().map(|l| l.as_char()).collect::<String>()
                )))
            }
        }
    }

    if xx.keys().ne(yy.keys()) {
        return Err(CliError::validation(
            "every interaction edge needs both an XX and a YY term",
        ));
    }
    for (edge, jx) in &xx {
        let jy = yy[edge];
        if (jx - jy).abs() > 1e-12 {
            return Err(CliError::validation(format!(
                "edge {edge:?} has mismatched XX/YY couplings ({jx} vs {jy})"
            )));
        }
    }

    let mut graph = InteractionGraph::new(n);
    for &(u, v) in xx.keys() {
        graph
            .add_edge(u, v)
            .map_err(|e| CliError::validation(e.to_string()))?;
    }
    let mut couplings =
        CouplingTable::from_edges(xx.iter().map(|(&(u, v), &j)| (u, v, j)));

    let build = if onsite.is_empty() {
        build_accreditable(&graph, &couplings)
    } else {
        let u0 = *onsite.values().next().expect("non-empty");
        if onsite.len() != n || onsite.values().any(|u| (u - u0).abs() > 1e-12) {
            return Err(CliError::validation(
                "onsite Z terms must carry one shared strength on every site",
            ));
        }
        couplings = couplings.with_onsite(u0);
        build_xy_model(&graph, &couplings)
    };
    build.map_err(|e| CliError::validation(format!("fixture: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_pure_xy() {
        let sum = WeightedPauliSum::parse_text("1.0 XX\n1.0 YY\n").unwrap();
        let h = classify_xy_fixture(&sum).unwrap();
        assert!(!h.has_onsite());
        assert_eq!(h.graph().edge_count(), 1);
    }

    #[test]
    fn classify_xy_model() {
        let sum =
            WeightedPauliSum::parse_text("1.0 XX\n1.0 YY\n0.5 ZI\n0.5 IZ\n").unwrap();
        let h = classify_xy_fixture(&sum).unwrap();
        assert!(h.has_onsite());
        assert_eq!(h.couplings().onsite(), Some(0.5));
    }

    #[test]
    fn classify_rejects_non_xy() {
        let sum = WeightedPauliSum::parse_text("1.0 XZ\n").unwrap();
        assert!(classify_xy_fixture(&sum).is_err());
        let unpaired = WeightedPauliSum::parse_text("1.0 XX\n").unwrap();
        assert!(classify_xy_fixture(&unpaired).is_err());
        let mismatched = WeightedPauliSum::parse_text("1.0 XX\n0.5 YY\n").unwrap();
        assert!(classify_xy_fixture(&mismatched).is_err());
        let partial_onsite =
            WeightedPauliSum::parse_text("1.0 XX\n1.0 YY\n0.5 ZI\n").unwrap();
        assert!(classify_xy_fixture(&partial_onsite).is_err());
    }

    #[test]
    fn classify_triangle_reports_coloring_failure() {
        let sum = WeightedPauliSum::parse_text(
            "1.0 XXI\n1.0 YYI\n1.0 IXX\n1.0 IYY\n1.0 XIX\n1.0 YIY\n",
        )
        .unwrap();
        let err = classify_xy_fixture(&sum).unwrap_err();
        assert_eq!(err.kind.code(), 3);
        assert!(err.message.contains("2-colourable"), "{}", err.message);
    }
}

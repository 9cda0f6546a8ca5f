//! Construction of accreditable Hamiltonians: XY interactions
//! `J_ij (X_i X_j + Y_i Y_j)` over the edges of a 2-colourable interaction
//! graph, optionally extended with onsite `U Z_k` terms (the XY-model
//! variant used for the composite inversion circuit).
//!
//! The protocol path accepts only the pure XY family; the onsite variant
//! exists because its composite inversion circuit is a worked fixture.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{two_color, GraphError, InteractionGraph, TwoColoring};
use crate::pauli::{PauliLetter, WeightedPauliSum};

/// Edge couplings `J_ij` plus the optional onsite strength `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTable {
    j: BTreeMap<(usize, usize), f64>,
    u: Option<f64>,
}

impl CouplingTable {
    /// Uniform coupling `j` on every edge of `graph`.
    pub fn uniform(graph: &InteractionGraph, j: f64) -> Self {
        CouplingTable {
            j: graph.edges().map(|e| (e, j)).collect(),
            u: None,
        }
    }

    /// Per-edge couplings; endpoints are normalized to `(min, max)`.
    pub fn from_edges(entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        CouplingTable {
            j: entries
                .into_iter()
                .map(|(u, v, j)| ((u.min(v), u.max(v)), j))
                .collect(),
            u: None,
        }
    }

    /// Add the onsite strength, turning this into an XY-model table.
    pub fn with_onsite(mut self, u: f64) -> Self {
        self.u = Some(u);
        self
    }

    pub fn coupling(&self, u: usize, v: usize) -> Option<f64> {
        self.j.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn onsite(&self) -> Option<f64> {
        self.u
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.j.iter().map(|(&e, &j)| (e, j))
    }
}

/// Errors from Hamiltonian construction.
#[derive(Debug, Clone, PartialEq)]
pub enum BuildError {
    NotTwoColourable { odd_cycle: Vec<usize> },
    MissingCoupling { edge: (usize, usize) },
    UnknownCoupling { edge: (usize, usize) },
    NonFiniteCoupling { edge: Option<(usize, usize)> },
    /// `build_accreditable` rejects tables carrying an onsite strength.
    UnexpectedOnsite,
    /// `build_xy_model` requires an onsite strength.
    MissingOnsite,
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::NotTwoColourable { odd_cycle } => {
                write!(f, "interaction graph is not 2-colourable; odd cycle: {odd_cycle:?}")
            }
            BuildError::MissingCoupling { edge } => {
                write!(f, "no coupling given for edge {edge:?}")
            }
            BuildError::UnknownCoupling { edge } => {
                write!(f, "coupling given for non-edge {edge:?}")
            }
            BuildError::NonFiniteCoupling { edge: Some(edge) } => {
                write!(f, "non-finite coupling on edge {edge:?}")
            }
            BuildError::NonFiniteCoupling { edge: None } => {
                write!(f, "non-finite onsite strength")
            }
            BuildError::UnexpectedOnsite => {
                write!(f, "onsite strength not allowed for the pure XY family")
            }
            BuildError::MissingOnsite => {
                write!(f, "XY-model variant requires an onsite strength")
            }
        }
    }
}

impl core::error::Error for BuildError {}

/// An XY Hamiltonian bound to its interaction graph, couplings, a stored
/// 2-colouring, and the symbolic weighted Pauli sum.
#[derive(Debug, Clone, PartialEq)]
pub struct AccreditableHamiltonian {
    graph: InteractionGraph,
    couplings: CouplingTable,
    coloring: TwoColoring,
    sum: WeightedPauliSum,
}

impl AccreditableHamiltonian {
    pub fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    pub fn couplings(&self) -> &CouplingTable {
        &self.couplings
    }

    pub fn coloring(&self) -> &TwoColoring {
        &self.coloring
    }

    pub fn sum(&self) -> &WeightedPauliSum {
        &self.sum
    }

    pub fn qubit_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `true` when the Hamiltonian carries onsite Z terms (XY-model variant).
    pub fn has_onsite(&self) -> bool {
        self.couplings.onsite().is_some()
    }
}

fn check_couplings(
    graph: &InteractionGraph,
    couplings: &CouplingTable,
) -> Result<TwoColoring, BuildError> {
    for ((u, v), j) in couplings.edges() {
        if !graph.has_edge(u, v) {
            return Err(BuildError::UnknownCoupling { edge: (u, v) });
        }
        if !j.is_finite() {
            return Err(BuildError::NonFiniteCoupling { edge: Some((u, v)) });
        }
    }
    for edge in graph.edges() {
        if couplings.coupling(edge.0, edge.1).is_none() {
            return Err(BuildError::MissingCoupling { edge });
        }
    }
    if let Some(u) = couplings.onsite() {
        if !u.is_finite() {
            return Err(BuildError::NonFiniteCoupling { edge: None });
        }
    }
    two_color(graph).map_err(|e| match e {
        GraphError::NotTwoColourable { odd_cycle } => BuildError::NotTwoColourable { odd_cycle },
        other => unreachable!("two_color only fails with NotTwoColourable, got {other:?}"),
    })
}

fn interaction_sum(
    graph: &InteractionGraph,
    couplings: &CouplingTable,
) -> WeightedPauliSum {
    let n = graph.vertex_count();
    let mut sum = WeightedPauliSum::new(n);
    for ((u, v), j) in couplings.edges() {
        for letter in [PauliLetter::X, PauliLetter::Y] {
            let mut letters = alloc::vec![PauliLetter::I; n];
            letters[u - 1] = letter;
            letters[v - 1] = letter;
            sum.add_term(j, letters).expect("lengths match by construction");
        }
    }
    sum
}

/// Build a pure XY-interaction Hamiltonian: per edge `<i,j>`, the two terms
/// `J_ij X_i X_j` and `J_ij Y_i Y_j`.
pub fn build_accreditable(
    graph: &InteractionGraph,
    couplings: &CouplingTable,
) -> Result<AccreditableHamiltonian, BuildError> {
    if couplings.onsite().is_some() {
        return Err(BuildError::UnexpectedOnsite);
    }
    let coloring = check_couplings(graph, couplings)?;
    let sum = interaction_sum(graph, couplings);
    Ok(AccreditableHamiltonian {
        graph: graph.clone(),
        couplings: couplings.clone(),
        coloring,
        sum,
    })
}

/// Build the XY-model variant: the XY interaction plus `U Z_k` on every
/// vertex `k`.
pub fn build_xy_model(
    graph: &InteractionGraph,
    couplings: &CouplingTable,
) -> Result<AccreditableHamiltonian, BuildError> {
    let u = couplings.onsite().ok_or(BuildError::MissingOnsite)?;
    let coloring = check_couplings(graph, couplings)?;
    let n = graph.vertex_count();
    let mut sum = interaction_sum(graph, couplings);
    for k in 1..=n {
        let mut letters = alloc::vec![PauliLetter::I; n];
        letters[k - 1] = PauliLetter::Z;
        sum.add_term(u, letters).expect("lengths match by construction");
    }
    Ok(AccreditableHamiltonian {
        graph: graph.clone(),
        couplings: couplings.clone(),
        coloring,
        sum,
    })
}

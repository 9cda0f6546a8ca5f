//! Synthesis and verification of time-inversion circuits: Pauli layers `C`
//! with `C H C† = -H`, hence `C e^{-iHt} C† = e^{+iHt}`.
//!
//! For the pure XY family the circuit is a Pauli Z on one colour class of
//! the interaction graph. For the XY-model variant with onsite Z terms the
//! circuit composes Z on the colour class with X everywhere, which collapses
//! to Y on the class and X on its complement (up to a global phase).

use core::fmt;

use crate::hamiltonian::AccreditableHamiltonian;
use crate::linalg::{evolution_operator, max_abs_diff};
use crate::pauli::{AlgebraError, PauliLetter, PauliString, Phase, WeightedPauliSum};

/// Which construction produced the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionBasis {
    /// Pauli Z exactly on a validated chromatic subset, identity elsewhere.
    ZOnChromatic,
    /// Pauli Y on the chromatic subset and X on its complement, with the
    /// global phase tracked.
    CompositeIyX,
}

/// A time-inversion circuit: one Pauli letter per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionCircuit {
    pub string: PauliString,
    pub basis: InversionBasis,
}

/// Errors from inversion synthesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InversionError {
    /// `synthesize_inversion` requires the pure XY family.
    OnsiteTermsPresent,
    /// `synthesize_inversion_xy_model` requires the onsite variant.
    OnsiteTermsMissing,
}

impl fmt::Display for InversionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InversionError::OnsiteTermsPresent => {
                write!(f, "Z-on-chromatic inversion requires the pure XY family")
            }
            InversionError::OnsiteTermsMissing => {
                write!(f, "composite inversion requires the XY-model onsite variant")
            }
        }
    }
}

impl core::error::Error for InversionError {}

/// The stored colour class containing vertex 1, giving deterministic output.
fn class_of_vertex_one(h: &AccreditableHamiltonian) -> crate::graph::ChromaticSubset {
    let coloring = h.coloring();
    coloring.class(coloring.color_of(1))
}

/// Z-on-chromatic inversion circuit for a pure XY Hamiltonian.
///
/// A zero Hamiltonian gets the all-identity circuit, which is vacuously
/// valid. Two-colourability is guaranteed by [`AccreditableHamiltonian`]
/// construction, so synthesis cannot fail on that account.
pub fn synthesize_inversion(
    h: &AccreditableHamiltonian,
) -> Result<InversionCircuit, InversionError> {
    if h.has_onsite() {
        return Err(InversionError::OnsiteTermsPresent);
    }
    let n = h.qubit_count();
    if h.sum().is_zero() {
        return Ok(InversionCircuit {
            string: PauliString::identity(n),
            basis: InversionBasis::ZOnChromatic,
        });
    }
    let class = class_of_vertex_one(h);
    let mut letters = alloc::vec![PauliLetter::I; n];
    for v in class.vertices() {
        letters[v - 1] = PauliLetter::Z;
    }
    Ok(InversionCircuit {
        string: PauliString::from_letters(letters),
        basis: InversionBasis::ZOnChromatic,
    })
}

/// Composite inversion circuit for the XY model with onsite Z terms:
/// `prod_{k in S} (i Y_k) prod_{k not in S} (X_k)` for the colour class `S`.
pub fn synthesize_inversion_xy_model(
    h: &AccreditableHamiltonian,
) -> Result<InversionCircuit, InversionError> {
    if !h.has_onsite() {
        return Err(InversionError::OnsiteTermsMissing);
    }
    let n = h.qubit_count();
    let class = class_of_vertex_one(h);
    let mut letters = alloc::vec![PauliLetter::X; n];
    for v in class.vertices() {
        letters[v - 1] = PauliLetter::Y;
    }
    let phase = Phase::from_exponent((class.len() % 4) as u8);
    Ok(InversionCircuit {
        string: PauliString::new(phase, letters),
        basis: InversionBasis::CompositeIyX,
    })
}

/// `true` iff `c.string * h * c.string†` equals `-h` term for term.
pub fn verify_inversion_symbolic(h: &WeightedPauliSum, c: &InversionCircuit) -> bool {
    match h.conjugated_by(&c.string) {
        Ok(conj) => conj == h.negated(),
        Err(_) => false,
    }
}

/// Largest elementwise error of `C e^{-iHt} C† - e^{+iHt}`.
///
/// Matrix exponentials go through the Hermitian spectral decomposition, so
/// the residual only carries eigensolver noise.
pub fn verify_inversion_numeric(
    h: &WeightedPauliSum,
    c: &InversionCircuit,
    t: f64,
) -> Result<f64, AlgebraError> {
    let hm = h.to_matrix()?;
    let cm = c.string.to_matrix()?;
    let forward = evolution_operator(&hm, t);
    let backward = evolution_operator(&hm, -t);
    let conj = &cm * forward * cm.adjoint();
    Ok(max_abs_diff(&conj, &backward))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::square_lattice;
    use crate::hamiltonian::{build_accreditable, build_xy_model, CouplingTable};
    use alloc::vec::Vec;

    fn xy(rows: usize, cols: usize, j: f64) -> AccreditableHamiltonian {
        let g = square_lattice(rows, cols);
        build_accreditable(&g, &CouplingTable::uniform(&g, j)).unwrap()
    }

    #[test]
    fn two_qubit_circuit_is_z1() {
        let h = xy(1, 2, 1.0);
        let c = synthesize_inversion(&h).unwrap();
        assert_eq!(c.string.letters_string(), "ZI");
        assert!(verify_inversion_symbolic(h.sum(), &c));
    }

    #[test]
    fn lattice_3x3_circuit_is_checkerboard() {
        let g = square_lattice(3, 3);
        let c = CouplingTable::from_edges(
            g.edges().enumerate().map(|(k, (u, v))| (u, v, 0.1 + 0.05 * k as f64)),
        );
        let h = build_accreditable(&g, &c).unwrap();
        let circ = synthesize_inversion(&h).unwrap();
        let z_positions: Vec<usize> = circ
            .string
            .letters
            .iter()
            .enumerate()
            .filter_map(|(i, l)| (*l == PauliLetter::Z).then_some(i + 1))
            .collect();
        assert_eq!(z_positions, alloc::vec![1, 3, 5, 7, 9]);
        assert!(verify_inversion_symbolic(h.sum(), &circ));
    }

    #[test]
    fn zero_hamiltonian_gets_identity_circuit() {
        let h = xy(2, 2, 0.0);
        let c = synthesize_inversion(&h).unwrap();
        assert!(c.string.is_identity());
        assert!(verify_inversion_symbolic(h.sum(), &c));
    }

    #[test]
    fn composite_circuit_for_xy_model() {
        let g = square_lattice(3, 3);
        let h = build_xy_model(&g, &CouplingTable::uniform(&g, 1.0).with_onsite(1.0)).unwrap();
        let c = synthesize_inversion_xy_model(&h).unwrap();
        assert_eq!(c.basis, InversionBasis::CompositeIyX);
        assert_eq!(c.string.letters_string(), "YXYXYXYXY");
        assert!(verify_inversion_symbolic(h.sum(), &c));
    }

    #[test]
    fn composite_single_site() {
        // H = U Z on one qubit; the composite circuit is ZX = iY there.
        let g = square_lattice(1, 1);
        let h = build_xy_model(&g, &CouplingTable::uniform(&g, 0.0).with_onsite(1.0)).unwrap();
        let c = synthesize_inversion_xy_model(&h).unwrap();
        assert_eq!(c.string.letters_string(), "Y");
        assert_eq!(c.string.phase, Phase::PLUS_I);
        assert!(verify_inversion_symbolic(h.sum(), &c));
    }

    #[test]
    fn composite_two_site() {
        let g = square_lattice(1, 2);
        let h = build_xy_model(&g, &CouplingTable::uniform(&g, 1.0).with_onsite(1.0)).unwrap();
        let c = synthesize_inversion_xy_model(&h).unwrap();
        assert_eq!(c.string.letters_string(), "YX");
        assert!(verify_inversion_symbolic(h.sum(), &c));
    }

    #[test]
    fn variant_mismatch_is_rejected() {
        let pure = xy(1, 2, 1.0);
        assert_eq!(
            synthesize_inversion_xy_model(&pure),
            Err(InversionError::OnsiteTermsMissing)
        );
        let g = square_lattice(1, 2);
        let model =
            build_xy_model(&g, &CouplingTable::uniform(&g, 1.0).with_onsite(1.0)).unwrap();
        assert_eq!(
            synthesize_inversion(&model),
            Err(InversionError::OnsiteTermsPresent)
        );
    }

    #[test]
    fn wrong_conjugator_fails_symbolically() {
        // X conjugation fixes XX and negates YY, so it is not an inverter.
        let h = xy(1, 2, 1.0);
        let c = InversionCircuit {
            string: PauliString::single(PauliLetter::X, 1, 2),
            basis: InversionBasis::ZOnChromatic,
        };
        assert!(!verify_inversion_symbolic(h.sum(), &c));
        // zero sum is inverted by anything
        let zero = WeightedPauliSum::new(2);
        assert!(verify_inversion_symbolic(&zero, &c));
    }

    #[test]
    fn numeric_verification_small_cases() {
        let h = xy(1, 2, 1.0);
        let c = synthesize_inversion(&h).unwrap();
        assert!(verify_inversion_numeric(h.sum(), &c, 0.7).unwrap() <= 1e-10);
        assert!(verify_inversion_numeric(h.sum(), &c, 0.0).unwrap() <= 1e-12);
    }

    #[test]
    fn numeric_verification_2x2_lattice() {
        let h = xy(2, 2, -0.8);
        let c = synthesize_inversion(&h).unwrap();
        assert!(verify_inversion_numeric(h.sum(), &c, 1.3).unwrap() <= 1e-10);
    }
}

//! Target and trap circuit construction.
//!
//! A target fills the A/D layers with the requested preparation and
//! measurement rotations and leaves B/C as explicit identities. A trap keeps
//! the same skeleton but fills B and C with the time-inversion letters and
//! dresses A/D with the drawn randomization, so that its error-free output
//! is the all-zero string with certainty.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::engine::{BitString, EngineError, NamedGate};
use crate::hamiltonian::AccreditableHamiltonian;
use crate::hqs::HqsCircuit;
use crate::inversion::{synthesize_inversion, InversionError};
use crate::linalg::CMat;
use crate::pauli::{PauliLetter, WeightedPauliSum};

/// The simulation of interest: per-qubit preparation gates `A'`, measurement
/// gates `D'`, and the evolution parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub a_prime: Vec<CMat>,
    pub d_prime: Vec<CMat>,
    pub hamiltonian: WeightedPauliSum,
    pub t: f64,
}

impl TargetSpec {
    /// Identity preparation and measurement rotations.
    pub fn plain(hamiltonian: WeightedPauliSum, t: f64) -> Self {
        let n = hamiltonian.qubit_count();
        TargetSpec {
            a_prime: (0..n).map(|_| CMat::identity(2, 2)).collect(),
            d_prime: (0..n).map(|_| CMat::identity(2, 2)).collect(),
            hamiltonian,
            t,
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.hamiltonian.qubit_count()
    }
}

/// The per-trap randomness draw: one global Hadamard bit, one Pauli letter
/// per qubit, and independent Z bits on the preparation and measurement
/// sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrapRandomness {
    pub h: bool,
    pub paulis: Vec<PauliLetter>,
    pub z_prep: Vec<bool>,
    pub z_meas: Vec<bool>,
}

impl TrapRandomness {
    /// All-identity draw (`h = 0`, `P = I`, no Z gates).
    pub fn trivial(n: usize) -> Self {
        TrapRandomness {
            h: false,
            paulis: alloc::vec![PauliLetter::I; n],
            z_prep: alloc::vec![false; n],
            z_meas: alloc::vec![false; n],
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.paulis.len()
    }

    /// Compact digest for run logs, e.g. `h=1 P=XZ zp=01 zm=10`.
    pub fn digest(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        let bit = |b: &bool| if *b { '1' } else { '0' };
        write!(s, "h={} P=", if self.h { 1 } else { 0 }).unwrap();
        for p in &self.paulis {
            s.push(p.as_char());
        }
        s.push_str(" zp=");
        s.extend(self.z_prep.iter().map(bit));
        s.push_str(" zm=");
        s.extend(self.z_meas.iter().map(bit));
        s
    }
}

/// Draw trap randomness: `h` uniform, each `P_j` uniform over the four
/// letters, each Z bit an independent fair coin. The draw order (h, Paulis,
/// prep bits, measurement bits) is part of the reproducibility contract.
pub fn draw_trap_randomness<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TrapRandomness {
    let h = rng.random::<bool>();
    let paulis = (0..n)
        .map(|_| PauliLetter::ALL[rng.random_range(0..4usize)])
        .collect();
    let z_prep = (0..n).map(|_| rng.random::<bool>()).collect();
    let z_meas = (0..n).map(|_| rng.random::<bool>()).collect();
    TrapRandomness {
        h,
        paulis,
        z_prep,
        z_meas,
    }
}

/// Iterate the full randomness space of an `n`-qubit trap:
/// `2 * 4^n * 2^n * 2^n` equally likely draws.
pub fn enumerate_trap_randomness(n: usize) -> impl Iterator<Item = TrapRandomness> {
    let pauli_codes = 4usize.pow(n as u32);
    let z_codes = 1usize << n;
    (0..2usize).flat_map(move |h| {
        (0..pauli_codes).flat_map(move |p| {
            (0..z_codes).flat_map(move |zp| {
                (0..z_codes).map(move |zm| TrapRandomness {
                    h: h == 1,
                    paulis: crate::engine::letters_from_code(p, n),
                    z_prep: bits_from_code(zp, n),
                    z_meas: bits_from_code(zm, n),
                })
            })
        })
    })
}

pub(crate) fn bits_from_code(code: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| (code >> (n - 1 - i)) & 1 == 1).collect()
}

/// Build the target circuit: `A = A'`, `B = C = I`, `D = D'`, identity
/// encoder and decoder.
pub fn build_target(spec: &TargetSpec) -> Result<HqsCircuit, EngineError> {
    let n = spec.qubit_count();
    if spec.a_prime.len() != n || spec.d_prime.len() != n {
        return Err(EngineError::QubitCountMismatch {
            expected: n,
            got: spec.a_prime.len().max(spec.d_prime.len()),
        });
    }
    let mut circuit = HqsCircuit::new(spec.hamiltonian.clone(), spec.t);
    circuit.a_layer = spec.a_prime.clone();
    circuit.d_layer = spec.d_prime.clone();
    circuit.validate()?;
    Ok(circuit)
}

/// Errors from trap construction.
#[derive(Debug, Clone, PartialEq)]
pub enum TrapError {
    Inversion(InversionError),
    Engine(EngineError),
    RandomnessSize { expected: usize, got: usize },
}

impl fmt::Display for TrapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrapError::Inversion(e) => write!(f, "{e}"),
            TrapError::Engine(e) => write!(f, "{e}"),
            TrapError::RandomnessSize { expected, got } => {
                write!(f, "randomness drawn for {got} qubits, trap has {expected}")
            }
        }
    }
}

impl core::error::Error for TrapError {}

impl From<InversionError> for TrapError {
    fn from(e: InversionError) -> Self {
        TrapError::Inversion(e)
    }
}

impl From<EngineError> for TrapError {
    fn from(e: EngineError) -> Self {
        TrapError::Engine(e)
    }
}

/// Build a trap circuit for the Hamiltonian under the drawn randomness.
///
/// Per qubit `j`, in time order: the A slot applies `Z^{zp_j}`, then `H^h`,
/// then `P_j` (compiled to one gate); B and C both apply the inversion
/// letter; the D slot applies `P_j`, then `H^h`, then `Z^{zm_j}`.
pub fn build_trap(
    h: &AccreditableHamiltonian,
    t: f64,
    r: &TrapRandomness,
) -> Result<HqsCircuit, TrapError> {
    let n = h.qubit_count();
    if r.qubit_count() != n || r.z_prep.len() != n || r.z_meas.len() != n {
        return Err(TrapError::RandomnessSize {
            expected: n,
            got: r.qubit_count(),
        });
    }
    let inversion = synthesize_inversion(h)?;
    let hadamard = NamedGate::H.matrix();
    let z = NamedGate::Z.matrix();

    let mut circuit = HqsCircuit::new(h.sum().clone(), t);
    for j in 0..n {
        let p = r.paulis[j].matrix();
        let mut a = CMat::identity(2, 2);
        if r.z_prep[j] {
            a = &z * a;
        }
        if r.h {
            a = &hadamard * a;
        }
        a = &p * a;
        circuit.a_layer[j] = a;

        let c_letter = inversion.string.letters[j].matrix();
        circuit.b_layer[j] = c_letter.clone();
        circuit.c_layer[j] = c_letter;

        let mut d = p;
        if r.h {
            d = &hadamard * d;
        }
        if r.z_meas[j] {
            d = &z * d;
        }
        circuit.d_layer[j] = d;
    }
    circuit.validate()?;
    Ok(circuit)
}

/// A trap run is correct exactly when it returns the all-zero string.
pub fn trap_is_correct(outcome: &BitString) -> bool {
    outcome.is_all_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::NamedGate;
    use crate::graph::square_lattice;
    use crate::hamiltonian::{build_accreditable, CouplingTable};
    use crate::hqs::{exact_output_distribution, ErrorConfig, ExecContext};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lattice_ham(rows: usize, cols: usize, j: f64) -> AccreditableHamiltonian {
        let g = square_lattice(rows, cols);
        build_accreditable(&g, &CouplingTable::uniform(&g, j)).unwrap()
    }

    #[test]
    fn target_is_two_half_evolutions_with_identity_slots() {
        let h = lattice_ham(1, 2, 1.0);
        let spec = TargetSpec::plain(h.sum().clone(), 0.8);
        let circuit = build_target(&spec).unwrap();
        let id = CMat::identity(2, 2);
        for g in circuit.b_layer.iter().chain(circuit.c_layer.iter()) {
            assert_eq!(g, &id);
        }
        assert_eq!(circuit.t, 0.8);
        // zero Hamiltonian and identity layers give all-zero with certainty
        let trivial = build_target(&TargetSpec::plain(WeightedPauliSum::new(2), 0.8)).unwrap();
        let probs = exact_output_distribution(&trivial, &ErrorConfig::noiseless()).unwrap();
        assert!((probs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn target_with_x_preparation_swaps() {
        let h = lattice_ham(1, 2, 1.0);
        let mut spec = TargetSpec::plain(h.sum().clone(), core::f64::consts::FRAC_PI_4);
        spec.a_prime[0] = NamedGate::X.matrix();
        let circuit = build_target(&spec).unwrap();
        let probs = exact_output_distribution(&circuit, &ErrorConfig::noiseless()).unwrap();
        assert!((probs[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn randomness_draw_is_reproducible() {
        let mut r1 = ChaCha8Rng::seed_from_u64(99);
        let mut r2 = ChaCha8Rng::seed_from_u64(99);
        assert_eq!(draw_trap_randomness(4, &mut r1), draw_trap_randomness(4, &mut r2));
    }

    #[test]
    fn randomness_marginals_are_uniform() {
        let n = 3;
        let draws = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(314159);
        let mut letter_counts = [[0usize; 4]; 3];
        let mut h_count = 0usize;
        for _ in 0..draws {
            let r = draw_trap_randomness(n, &mut rng);
            if r.h {
                h_count += 1;
            }
            for (q, p) in r.paulis.iter().enumerate() {
                let k = PauliLetter::ALL.iter().position(|l| l == p).unwrap();
                letter_counts[q][k] += 1;
            }
        }
        let h_freq = h_count as f64 / draws as f64;
        assert!((h_freq - 0.5).abs() < 0.01, "h freq {h_freq}");
        for (q, counts) in letter_counts.iter().enumerate() {
            for (k, &count) in counts.iter().enumerate() {
                let freq = count as f64 / draws as f64;
                assert!((freq - 0.25).abs() < 0.01, "qubit {q} letter {k}: {freq}");
            }
        }
    }

    #[test]
    fn enumeration_covers_the_space_once() {
        let n = 2;
        let all: Vec<_> = enumerate_trap_randomness(n).collect();
        assert_eq!(all.len(), 2 * 16 * 4 * 4);
        let unique: alloc::collections::BTreeSet<String> =
            all.iter().map(|r| r.digest()).collect();
        assert_eq!(unique.len(), all.len());
    }

    #[test]
    fn error_free_trap_outputs_all_zero() {
        let h = lattice_ham(2, 2, 0.7);
        let ctx = ExecContext::new(h.sum(), 1.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let r = draw_trap_randomness(4, &mut rng);
            let trap = build_trap(&h, 1.1, &r).unwrap();
            let probs =
                crate::engine::z_distribution(&ctx.execute(&trap, &ErrorConfig::noiseless()).unwrap());
            assert!((probs[0] - 1.0).abs() < 1e-9, "draw {}", r.digest());
        }
    }

    #[test]
    fn trivial_randomness_collapses_to_identity() {
        let h = lattice_ham(1, 2, 1.0);
        let r = TrapRandomness::trivial(2);
        let trap = build_trap(&h, 2.3, &r).unwrap();
        let probs = exact_output_distribution(&trap, &ErrorConfig::noiseless()).unwrap();
        assert!((probs[0] - 1.0).abs() < 1e-10);
        // B and C slots carry the inversion letters (Z on qubit 1 here)
        assert_eq!(trap.b_layer[0], NamedGate::Z.matrix());
        assert_eq!(trap.c_layer[0], NamedGate::Z.matrix());
        assert_eq!(trap.b_layer[1], CMat::identity(2, 2));
    }

    #[test]
    fn trap_differs_from_target_only_in_single_qubit_layers() {
        let h = lattice_ham(1, 3, 0.4);
        let spec = TargetSpec::plain(h.sum().clone(), 0.5);
        let target = build_target(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let trap = build_trap(&h, 0.5, &draw_trap_randomness(3, &mut rng)).unwrap();
        assert_eq!(target.hamiltonian, trap.hamiltonian);
        assert_eq!(target.t, trap.t);
        assert_eq!(target.u1, trap.u1);
        assert_eq!(target.u2, trap.u2);
    }

    #[test]
    fn trap_rejects_mismatched_randomness() {
        let h = lattice_ham(1, 2, 1.0);
        let r = TrapRandomness::trivial(3);
        assert!(matches!(
            build_trap(&h, 0.5, &r),
            Err(TrapError::RandomnessSize { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn correctness_is_all_zero() {
        assert!(trap_is_correct(&BitString::from_index(4, 0)));
        assert!(!trap_is_correct(&BitString::from_index(4, 0b0100)));
    }
}

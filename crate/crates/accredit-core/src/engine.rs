//! Exact density-matrix simulation: state preparation, gates, Hamiltonian
//! evolution, CPTP channel application, and Z-basis measurement.
//!
//! Density matrices are the single source of truth; CPTP errors and exact
//! output distributions need no unravelling. The register cap of 8 qubits
//! (a 256 x 256 matrix) covers everything the accreditation tests need.
//!
//! Gates and Kraus operators act on qubit subsets through gather/scatter
//! contractions over the affected bit positions, costing `O(4^N 2^k)` per
//! application instead of a full `O(8^N)` matrix product. Qubit `j`
//! (1-based) maps to bit `N - j`, so qubit 1 is the most significant bit of
//! a basis index and outcome strings read left to right as qubit 1..N.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;
use rand::Rng;

use crate::linalg::{is_unitary, CMat, C64};
use crate::pauli::{PauliLetter, WeightedPauliSum};

/// Register cap for density-matrix work.
pub const DENSITY_QUBIT_CAP: usize = 8;

/// Tolerance for trace preservation of channels and states.
pub const TRACE_TOL: f64 = 1e-10;

/// Tolerance for unitarity of gates.
pub const UNITARY_TOL: f64 = 1e-12;

/// Errors from engine operations.
#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    CapExceeded { qubits: usize, cap: usize },
    QubitOutOfRange { qubit: usize, register: usize },
    DuplicateQubit { qubit: usize },
    NotUnitary { max_deviation: f64 },
    NotTracePreserving { max_deviation: f64 },
    KrausShapeMismatch { expected_dim: usize, got: usize },
    QubitCountMismatch { expected: usize, got: usize },
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::CapExceeded { qubits, cap } => {
                write!(f, "register of {qubits} qubits exceeds cap {cap}")
            }
            EngineError::QubitOutOfRange { qubit, register } => {
                write!(f, "qubit {qubit} outside register 1..={register}")
            }
            EngineError::DuplicateQubit { qubit } => {
                write!(f, "qubit {qubit} listed more than once")
            }
            EngineError::NotUnitary { max_deviation } => {
                write!(f, "operator is not unitary (deviation {max_deviation:.3e})")
            }
            EngineError::NotTracePreserving { max_deviation } => {
                write!(f, "kraus set is not trace preserving (deviation {max_deviation:.3e})")
            }
            EngineError::KrausShapeMismatch { expected_dim, got } => {
                write!(f, "kraus operator must be {expected_dim}x{expected_dim}, got {got}")
            }
            EngineError::QubitCountMismatch { expected, got } => {
                write!(f, "operand acts on {got} qubits, state has {expected}")
            }
        }
    }
}

impl core::error::Error for EngineError {}

/// A measurement outcome: one bit per qubit, qubit 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    qubits: usize,
    index: usize,
}

impl BitString {
    pub fn from_index(qubits: usize, index: usize) -> Self {
        debug_assert!(index < (1usize << qubits));
        BitString { qubits, index }
    }

    /// Basis index with qubit 1 as the most significant bit.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    /// Bit of 1-based `qubit`.
    pub fn bit(&self, qubit: usize) -> bool {
        (self.index >> (self.qubits - qubit)) & 1 == 1
    }

    pub fn is_all_zero(&self) -> bool {
        self.index == 0
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 1..=self.qubits {
            write!(f, "{}", if self.bit(q) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Dense density matrix of an `N`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    qubits: usize,
    rho: CMat,
}

impl DensityState {
    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.qubits
    }

    pub fn rho(&self) -> &CMat {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).sum()
    }

    /// Wrap an externally built matrix; caller asserts it is a valid state.
    pub fn from_matrix(qubits: usize, rho: CMat) -> Result<Self, EngineError> {
        if qubits == 0 || qubits > DENSITY_QUBIT_CAP {
            return Err(EngineError::CapExceeded {
                qubits,
                cap: DENSITY_QUBIT_CAP,
            });
        }
        let dim = 1usize << qubits;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(EngineError::KrausShapeMismatch {
                expected_dim: dim,
                got: rho.nrows(),
            });
        }
        Ok(DensityState { qubits, rho })
    }

    /// Largest violation of Hermiticity, unit trace, and positivity
    /// (most negative eigenvalue, reported as a positive number).
    pub fn validity_defect(&self) -> f64 {
        let herm = crate::linalg::max_abs_diff(&self.rho, &self.rho.adjoint());
        let trace = (self.trace() - 1.0).abs();
        let (vals, _) = crate::linalg::hermitian_eigen(&symmetrized(&self.rho));
        let neg = vals.first().map(|&w| (-w).max(0.0)).unwrap_or(0.0);
        herm.max(trace).max(neg)
    }
}

fn symmetrized(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// `|0...0><0...0|` on `n` qubits.
pub fn prepare_zero(n: usize) -> Result<DensityState, EngineError> {
    if n == 0 || n > DENSITY_QUBIT_CAP {
        return Err(EngineError::CapExceeded {
            qubits: n,
            cap: DENSITY_QUBIT_CAP,
        });
    }
    let dim = 1usize << n;
    let mut rho = CMat::zeros(dim, dim);
    rho[(0, 0)] = C64::new(1.0, 0.0);
    Ok(DensityState { qubits: n, rho })
}

/// Named single-qubit gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedGate {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
}

impl NamedGate {
    pub fn matrix(self) -> CMat {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        match self {
            NamedGate::I => CMat::identity(2, 2),
            NamedGate::X => PauliLetter::X.matrix(),
            NamedGate::Y => PauliLetter::Y.matrix(),
            NamedGate::Z => PauliLetter::Z.matrix(),
            NamedGate::H => CMat::from_row_slice(2, 2, &[
                C64::new(s, 0.0), C64::new(s, 0.0),
                C64::new(s, 0.0), C64::new(-s, 0.0),
            ]),
            NamedGate::S => CMat::from_row_slice(2, 2, &[l, o, o, i]),
            NamedGate::Sdg => CMat::from_row_slice(2, 2, &[l, o, o, -i]),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedGate::I => "I",
            NamedGate::X => "X",
            NamedGate::Y => "Y",
            NamedGate::Z => "Z",
            NamedGate::H => "H",
            NamedGate::S => "S",
            NamedGate::Sdg => "Sdg",
        }
    }
}

/// Gate payload: a named gate, Euler angles, or an explicit 4x4 unitary.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Named(NamedGate),
    /// `u(theta, phi, lambda)` in the standard Euler parametrization.
    Euler { theta: f64, phi: f64, lambda: f64 },
    TwoQubit(CMat),
}

/// A gate bound to its target qubits (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn named(g: NamedGate, qubit: usize) -> Gate {
        Gate {
            kind: GateKind::Named(g),
            targets: alloc::vec![qubit],
        }
    }

    pub fn euler(theta: f64, phi: f64, lambda: f64, qubit: usize) -> Gate {
        Gate {
            kind: GateKind::Euler { theta, phi, lambda },
            targets: alloc::vec![qubit],
        }
    }

    /// Explicit two-qubit unitary over basis `|q1 q2>`; `q1` is the more
    /// significant sub-index.
    pub fn two_qubit(u: CMat, q1: usize, q2: usize) -> Result<Gate, EngineError> {
        if u.nrows() != 4 || u.ncols() != 4 {
            return Err(EngineError::KrausShapeMismatch {
                expected_dim: 4,
                got: u.nrows(),
            });
        }
        if !is_unitary(&u, UNITARY_TOL) {
            let dev = crate::linalg::max_abs_diff(&(u.adjoint() * &u), &CMat::identity(4, 4));
            return Err(EngineError::NotUnitary { max_deviation: dev });
        }
        Ok(Gate {
            kind: GateKind::TwoQubit(u),
            targets: alloc::vec![q1, q2],
        })
    }

    pub fn matrix(&self) -> CMat {
        match &self.kind {
            GateKind::Named(g) => g.matrix(),
            GateKind::Euler { theta, phi, lambda } => euler_matrix(*theta, *phi, *lambda),
            GateKind::TwoQubit(u) => u.clone(),
        }
    }
}

/// Standard single-qubit Euler unitary.
pub fn euler_matrix(theta: f64, phi: f64, lambda: f64) -> CMat {
    let (ct, st) = (Float::cos(theta / 2.0), Float::sin(theta / 2.0));
    let e = |a: f64| C64::new(Float::cos(a), Float::sin(a));
    CMat::from_row_slice(2, 2, &[
        C64::new(ct, 0.0),
        -e(lambda) * C64::new(st, 0.0),
        e(phi) * C64::new(st, 0.0),
        e(phi + lambda) * C64::new(ct, 0.0),
    ])
}

fn check_targets(targets: &[usize], n: usize) -> Result<(), EngineError> {
    for (i, &q) in targets.iter().enumerate() {
        if q == 0 || q > n {
            return Err(EngineError::QubitOutOfRange { qubit: q, register: n });
        }
        if targets[..i].contains(&q) {
            return Err(EngineError::DuplicateQubit { qubit: q });
        }
    }
    Ok(())
}

/// Bit masks of the listed qubits, first qubit giving the most significant
/// sub-index bit.
fn subset_masks(qubits: &[usize], n: usize) -> Vec<usize> {
    qubits.iter().map(|&q| 1usize << (n - q)).collect()
}

/// Indices whose subset bits are all zero.
fn base_indices(n: usize, masks: &[usize]) -> Vec<usize> {
    let union: usize = masks.iter().fold(0, |a, m| a | m);
    (0..(1usize << n)).filter(|b| b & union == 0).collect()
}

/// Full index offset of sub-index `s` under `masks`.
fn pattern(s: usize, masks: &[usize]) -> usize {
    let k = masks.len();
    let mut p = 0;
    for (i, &m) in masks.iter().enumerate() {
        if (s >> (k - 1 - i)) & 1 == 1 {
            p |= m;
        }
    }
    p
}

/// In-place `rho <- (op ⊗ I) rho (op ⊗ I)†` for an operator on a qubit
/// subset. `op` need not be unitary (Kraus factors go through here too).
fn apply_subset_both_sides(rho: &mut CMat, op: &CMat, qubits: &[usize], n: usize) {
    let masks = subset_masks(qubits, n);
    let bases = base_indices(n, &masks);
    let k = masks.len();
    let sub = 1usize << k;
    let dim = 1usize << n;
    let pats: Vec<usize> = (0..sub).map(|s| pattern(s, &masks)).collect();
    let mut vin = alloc::vec![C64::new(0.0, 0.0); sub];
    // rows: rho <- (op ⊗ I) rho
    for c in 0..dim {
        for &r0 in &bases {
            for s in 0..sub {
                vin[s] = rho[(r0 | pats[s], c)];
            }
            for (s_out, &pat) in pats.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (s_in, v) in vin.iter().enumerate() {
                    acc += op[(s_out, s_in)] * v;
                }
                rho[(r0 | pat, c)] = acc;
            }
        }
    }
    // columns: rho <- rho (op ⊗ I)†
    for r in 0..dim {
        for &c0 in &bases {
            for s in 0..sub {
                vin[s] = rho[(r, c0 | pats[s])];
            }
            for (s_out, &pat) in pats.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (s_in, v) in vin.iter().enumerate() {
                    acc += v * op[(s_out, s_in)].conj();
                }
                rho[(r, c0 | pat)] = acc;
            }
        }
    }
}

/// `U rho U†` with the gate lifted onto its target qubits.
pub fn apply_gate(state: &DensityState, gate: &Gate) -> Result<DensityState, EngineError> {
    check_targets(&gate.targets, state.qubits)?;
    let op = gate.matrix();
    let expected = 1usize << gate.targets.len();
    if op.nrows() != expected {
        return Err(EngineError::KrausShapeMismatch {
            expected_dim: expected,
            got: op.nrows(),
        });
    }
    let mut rho = state.rho.clone();
    apply_subset_both_sides(&mut rho, &op, &gate.targets, state.qubits);
    Ok(DensityState {
        qubits: state.qubits,
        rho,
    })
}

/// `u rho u†` for a bare 2x2 operator on one qubit. Unitarity is the
/// caller's responsibility (circuit builders validate their layers once).
pub fn apply_single_qubit_unitary(
    state: &DensityState,
    u: &CMat,
    qubit: usize,
) -> Result<DensityState, EngineError> {
    check_targets(&[qubit], state.qubits)?;
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(EngineError::KrausShapeMismatch {
            expected_dim: 2,
            got: u.nrows(),
        });
    }
    let mut rho = state.rho.clone();
    apply_subset_both_sides(&mut rho, u, &[qubit], state.qubits);
    Ok(DensityState {
        qubits: state.qubits,
        rho,
    })
}

/// Apply a full-register unitary `U rho U†`.
pub fn apply_unitary_full(state: &DensityState, u: &CMat) -> Result<DensityState, EngineError> {
    let dim = state.dim();
    if u.nrows() != dim || u.ncols() != dim {
        return Err(EngineError::KrausShapeMismatch {
            expected_dim: dim,
            got: u.nrows(),
        });
    }
    Ok(DensityState {
        qubits: state.qubits,
        rho: u * &state.rho * u.adjoint(),
    })
}

/// Precomputed `exp(-i H t)` bound to a register size, reusable across many
/// state applications (the protocol applies the same half-evolution in every
/// run).
#[derive(Debug, Clone)]
pub struct Propagator {
    qubits: usize,
    u: CMat,
}

impl Propagator {
    pub fn new(h: &WeightedPauliSum, t: f64) -> Result<Propagator, EngineError> {
        let n = h.qubit_count();
        if n > DENSITY_QUBIT_CAP {
            return Err(EngineError::CapExceeded {
                qubits: n,
                cap: DENSITY_QUBIT_CAP,
            });
        }
        let hm = h.to_matrix().map_err(|_| EngineError::CapExceeded {
            qubits: n,
            cap: DENSITY_QUBIT_CAP,
        })?;
        Ok(Propagator {
            qubits: n,
            u: crate::linalg::evolution_operator(&hm, t),
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn unitary(&self) -> &CMat {
        &self.u
    }

    pub fn apply(&self, state: &DensityState) -> Result<DensityState, EngineError> {
        if state.qubits != self.qubits {
            return Err(EngineError::QubitCountMismatch {
                expected: state.qubits,
                got: self.qubits,
            });
        }
        apply_unitary_full(state, &self.u)
    }
}

/// `e^{-iHt} rho e^{+iHt}` via spectral decomposition of `H`.
pub fn evolve(
    state: &DensityState,
    h: &WeightedPauliSum,
    t: f64,
) -> Result<DensityState, EngineError> {
    if h.qubit_count() != state.qubits {
        return Err(EngineError::QubitCountMismatch {
            expected: state.qubits,
            got: h.qubit_count(),
        });
    }
    Propagator::new(h, t)?.apply(state)
}

/// A CPTP map as an explicit Kraus list on a declared qubit subset.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorChannel {
    label: String,
    kraus: Vec<CMat>,
    qubits: Vec<usize>,
}

impl ErrorChannel {
    /// Validates shapes and trace preservation (`sum K†K = I` to 1e-10).
    pub fn new(
        label: impl Into<String>,
        kraus: Vec<CMat>,
        qubits: Vec<usize>,
    ) -> Result<ErrorChannel, EngineError> {
        let k = qubits.len();
        assert!(k > 0, "channel must act on at least one qubit");
        let dim = 1usize << k;
        if kraus.is_empty() {
            return Err(EngineError::NotTracePreserving { max_deviation: 1.0 });
        }
        for m in &kraus {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(EngineError::KrausShapeMismatch {
                    expected_dim: dim,
                    got: m.nrows(),
                });
            }
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q == 0 {
                return Err(EngineError::QubitOutOfRange { qubit: q, register: 0 });
            }
            if qubits[..i].contains(&q) {
                return Err(EngineError::DuplicateQubit { qubit: q });
            }
        }
        let mut sum = CMat::zeros(dim, dim);
        for m in &kraus {
            sum += m.adjoint() * m;
        }
        let dev = crate::linalg::max_abs_diff(&sum, &CMat::identity(dim, dim));
        if dev > TRACE_TOL {
            return Err(EngineError::NotTracePreserving { max_deviation: dev });
        }
        Ok(ErrorChannel {
            label: label.into(),
            kraus,
            qubits,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn arity(&self) -> usize {
        self.qubits.len()
    }

    /// Identity channel on one qubit.
    pub fn identity(qubit: usize) -> ErrorChannel {
        ErrorChannel::new("identity", alloc::vec![CMat::identity(2, 2)], alloc::vec![qubit])
            .expect("identity is CPTP")
    }

    /// Single unitary Kraus operator on a qubit subset.
    pub fn unitary(
        label: impl Into<String>,
        u: CMat,
        qubits: Vec<usize>,
    ) -> Result<ErrorChannel, EngineError> {
        if !is_unitary(&u, 1e-10) {
            let dim = u.nrows();
            let dev = crate::linalg::max_abs_diff(&(u.adjoint() * &u), &CMat::identity(dim, dim));
            return Err(EngineError::NotUnitary { max_deviation: dev });
        }
        ErrorChannel::new(label, alloc::vec![u], qubits)
    }

    /// X with probability `p`.
    pub fn bit_flip(p: f64, qubit: usize) -> Result<ErrorChannel, EngineError> {
        pauli_flip("bit_flip", PauliLetter::X, p, qubit)
    }

    /// Z with probability `p`.
    pub fn phase_flip(p: f64, qubit: usize) -> Result<ErrorChannel, EngineError> {
        pauli_flip("phase_flip", PauliLetter::Z, p, qubit)
    }

    /// Uniform depolarizing channel over the listed qubits:
    /// `rho -> (1-p) rho + p I/2^k`.
    pub fn depolarizing(p: f64, qubits: Vec<usize>) -> Result<ErrorChannel, EngineError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(EngineError::NotTracePreserving { max_deviation: p });
        }
        let k = qubits.len();
        let strings = 4usize.pow(k as u32);
        let mut kraus = Vec::with_capacity(strings);
        for code in 0..strings {
            let letters = letters_from_code(code, k);
            let is_id = code == 0;
            let weight = if is_id {
                1.0 - p + p / strings as f64
            } else {
                p / strings as f64
            };
            if weight <= 0.0 {
                continue;
            }
            kraus.push(letters_matrix(&letters) * C64::new(Float::sqrt(weight), 0.0));
        }
        ErrorChannel::new("depolarizing", kraus, qubits)
    }

    /// Amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64, qubit: usize) -> Result<ErrorChannel, EngineError> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(EngineError::NotTracePreserving { max_deviation: gamma });
        }
        let o = C64::new(0.0, 0.0);
        let k0 = CMat::from_row_slice(2, 2, &[
            C64::new(1.0, 0.0), o,
            o, C64::new(Float::sqrt(1.0 - gamma), 0.0),
        ]);
        let k1 = CMat::from_row_slice(2, 2, &[
            o, C64::new(Float::sqrt(gamma), 0.0),
            o, o,
        ]);
        ErrorChannel::new("amplitude_damping", alloc::vec![k0, k1], alloc::vec![qubit])
    }

    /// Stochastic Pauli mixture `rho -> sum_m p_m P_m rho P_m` over the
    /// listed qubits. Probabilities must sum to one.
    pub fn pauli_mixture(
        terms: &[(f64, Vec<PauliLetter>)],
        qubits: Vec<usize>,
    ) -> Result<ErrorChannel, EngineError> {
        let k = qubits.len();
        let mut total = 0.0;
        let mut kraus = Vec::with_capacity(terms.len());
        for (p, letters) in terms {
            if *p < -1e-12 {
                return Err(EngineError::NotTracePreserving { max_deviation: -p });
            }
            if letters.len() != k {
                return Err(EngineError::QubitCountMismatch {
                    expected: k,
                    got: letters.len(),
                });
            }
            total += p;
            if *p > 0.0 {
                kraus.push(letters_matrix(letters) * C64::new(Float::sqrt(*p), 0.0));
            }
        }
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(EngineError::NotTracePreserving {
                max_deviation: (total - 1.0).abs(),
            });
        }
        ErrorChannel::new("pauli_mixture", kraus, qubits)
    }
}

fn pauli_flip(
    label: &str,
    letter: PauliLetter,
    p: f64,
    qubit: usize,
) -> Result<ErrorChannel, EngineError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(EngineError::NotTracePreserving { max_deviation: p });
    }
    let mut kraus = Vec::new();
    if p < 1.0 {
        kraus.push(CMat::identity(2, 2) * C64::new(Float::sqrt(1.0 - p), 0.0));
    }
    if p > 0.0 {
        kraus.push(letter.matrix() * C64::new(Float::sqrt(p), 0.0));
    }
    ErrorChannel::new(label, kraus, alloc::vec![qubit])
}

/// Letters of the base-4 code, most significant digit first.
pub(crate) fn letters_from_code(code: usize, k: usize) -> Vec<PauliLetter> {
    (0..k)
        .map(|i| PauliLetter::ALL[(code >> (2 * (k - 1 - i))) & 3])
        .collect()
}

pub(crate) fn letters_matrix(letters: &[PauliLetter]) -> CMat {
    let mut m = CMat::identity(1, 1);
    for &l in letters {
        m = m.kronecker(&l.matrix());
    }
    m
}

/// `sum_K K rho K†` with each Kraus operator lifted onto the channel's
/// qubit subset.
pub fn apply_channel(
    state: &DensityState,
    channel: &ErrorChannel,
) -> Result<DensityState, EngineError> {
    check_targets(&channel.qubits, state.qubits)?;
    let dim = state.dim();
    let mut out = CMat::zeros(dim, dim);
    for k in &channel.kraus {
        let mut term = state.rho.clone();
        apply_subset_both_sides(&mut term, k, &channel.qubits, state.qubits);
        out += term;
    }
    Ok(DensityState {
        qubits: state.qubits,
        rho: out,
    })
}

/// Z-basis outcome distribution: the diagonal of `rho`, clipped at zero and
/// renormalized only when the clipped mass exceeds 1e-9.
pub fn z_distribution(state: &DensityState) -> Vec<f64> {
    let dim = state.dim();
    let mut probs: Vec<f64> = (0..dim).map(|i| state.rho[(i, i)].re).collect();
    let clipped: f64 = probs.iter().filter(|&&p| p < 0.0).map(|p| -p).sum();
    for p in probs.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    if clipped > 1e-9 {
        let total: f64 = probs.iter().sum();
        if total > 0.0 {
            for p in probs.iter_mut() {
                *p /= total;
            }
        }
    }
    probs
}

/// Draw one outcome from the Z-basis distribution.
pub fn sample<R: Rng + ?Sized>(state: &DensityState, rng: &mut R) -> BitString {
    let probs = z_distribution(state);
    let r: f64 = rng.random::<f64>() * probs.iter().sum::<f64>();
    let mut acc = 0.0;
    for (idx, &p) in probs.iter().enumerate() {
        acc += p;
        if r < acc {
            return BitString::from_index(state.qubits, idx);
        }
    }
    BitString::from_index(state.qubits, probs.len() - 1)
}

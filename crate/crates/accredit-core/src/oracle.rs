//! Independent ground-truth computations: variation distance, exact
//! trap-failure probabilities, process matrices, Pauli twirls, and empirical
//! detection rates.
//!
//! Nothing here reuses the protocol's execution path. Circuits are rebuilt
//! gate by gate from the engine primitives (the trap's dressing gates are
//! applied as separate Z, H, P operations rather than compiled layers), so
//! agreement between oracle and protocol is a genuine cross-check.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{
    apply_channel, apply_single_qubit_unitary, apply_unitary_full, letters_from_code,
    letters_matrix, prepare_zero, z_distribution, DensityState, EngineError, ErrorChannel,
    NamedGate,
};
use crate::hamiltonian::AccreditableHamiltonian;
use crate::hqs::{AttachmentPoint, ErrorConfig};
use crate::inversion::{synthesize_inversion, InversionError};
use crate::linalg::{evolution_operator, CMat, C64};
use crate::trap::{enumerate_trap_randomness, TargetSpec, TrapRandomness};

/// Full-enumeration cap: the randomness space `2 * 4^N * 2^N * 2^N` is
/// walked exhaustively only up to this register size.
pub const ENUMERATION_QUBIT_CAP: usize = 3;

/// Process matrices are computed exactly only for channels up to this arity.
pub const CHI_ARITY_CAP: usize = 2;

/// Errors from oracle computations.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    LengthMismatch { left: usize, right: usize },
    EnumerationCapExceeded { qubits: usize, cap: usize },
    ChiArityExceeded { arity: usize, cap: usize },
    NotADistribution { detail: &'static str },
    Engine(EngineError),
    Inversion(InversionError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::LengthMismatch { left, right } => {
                write!(f, "distributions have different sizes: {left} vs {right}")
            }
            OracleError::EnumerationCapExceeded { qubits, cap } => {
                write!(f, "exact enumeration of {qubits} qubits exceeds cap {cap}")
            }
            OracleError::ChiArityExceeded { arity, cap } => {
                write!(f, "process matrix of a {arity}-qubit channel exceeds cap {cap}")
            }
            OracleError::NotADistribution { detail } => write!(f, "not a distribution: {detail}"),
            OracleError::Engine(e) => write!(f, "{e}"),
            OracleError::Inversion(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for OracleError {}

impl From<EngineError> for OracleError {
    fn from(e: EngineError) -> Self {
        OracleError::Engine(e)
    }
}

impl From<InversionError> for OracleError {
    fn from(e: InversionError) -> Self {
        OracleError::Inversion(e)
    }
}

/// A probability vector over the `2^N` Z-basis outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Validates non-negativity (to -1e-12) and unit total (to 1e-10),
    /// clipping the tiny negatives.
    pub fn new(mut probs: Vec<f64>) -> Result<Self, OracleError> {
        if probs.is_empty() {
            return Err(OracleError::NotADistribution { detail: "empty" });
        }
        for p in probs.iter_mut() {
            if *p < -1e-12 {
                return Err(OracleError::NotADistribution {
                    detail: "negative entry",
                });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = pairwise_sum(&probs);
        if (total - 1.0).abs() > 1e-10 {
            return Err(OracleError::NotADistribution {
                detail: "total differs from 1",
            });
        }
        Ok(OutcomeDistribution { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Bit-stable pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Total variation distance `1/2 sum_s |p(s) - q(s)|`.
pub fn variation_distance(
    p: &OutcomeDistribution,
    q: &OutcomeDistribution,
) -> Result<f64, OracleError> {
    variation_distance_slices(p.probs(), q.probs())
}

/// Total variation distance over raw slices.
pub fn variation_distance_slices(p: &[f64], q: &[f64]) -> Result<f64, OracleError> {
    if p.len() != q.len() {
        return Err(OracleError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let diffs: Vec<f64> = p.iter().zip(q.iter()).map(|(a, b)| (a - b).abs()).collect();
    Ok(0.5 * pairwise_sum(&diffs))
}

fn maybe_channel(
    s: DensityState,
    errors: &ErrorConfig,
    point: AttachmentPoint,
) -> Result<DensityState, EngineError> {
    match errors.channel(point) {
        Some(c) => apply_channel(&s, c),
        None => Ok(s),
    }
}

/// Exact output distribution of the target circuit, rebuilt from engine
/// primitives.
pub fn target_distribution(
    spec: &TargetSpec,
    errors: &ErrorConfig,
) -> Result<Vec<f64>, OracleError> {
    let n = spec.qubit_count();
    let hm = spec
        .hamiltonian
        .to_matrix()
        .map_err(|_| OracleError::EnumerationCapExceeded {
            qubits: n,
            cap: crate::engine::DENSITY_QUBIT_CAP,
        })?;
    let half = evolution_operator(&hm, spec.t / 2.0);

    let mut s = prepare_zero(n)?;
    s = maybe_channel(s, errors, AttachmentPoint::Prep)?;
    for (j, g) in spec.a_prime.iter().enumerate() {
        s = apply_single_qubit_unitary(&s, g, j + 1)?;
    }
    s = maybe_channel(s, errors, AttachmentPoint::U1)?;
    s = apply_unitary_full(&s, &half)?;
    s = maybe_channel(s, errors, AttachmentPoint::Evolution1)?;
    s = maybe_channel(s, errors, AttachmentPoint::BLayer)?;
    // B and C slots hold explicit identities in a target.
    s = apply_unitary_full(&s, &half)?;
    s = maybe_channel(s, errors, AttachmentPoint::Evolution2)?;
    s = maybe_channel(s, errors, AttachmentPoint::CLayer)?;
    s = maybe_channel(s, errors, AttachmentPoint::U2)?;
    s = maybe_channel(s, errors, AttachmentPoint::DLayer)?;
    for (j, g) in spec.d_prime.iter().enumerate() {
        s = apply_single_qubit_unitary(&s, g, j + 1)?;
    }
    s = maybe_channel(s, errors, AttachmentPoint::Measurement)?;
    Ok(z_distribution(&s))
}

/// Trap simulator with the half-evolution and inversion letters precomputed
/// once, reused across the randomness enumeration.
pub struct TrapOracle {
    qubits: usize,
    half: CMat,
    inversion_letters: Vec<crate::pauli::PauliLetter>,
}

impl TrapOracle {
    pub fn new(h: &AccreditableHamiltonian, t: f64) -> Result<Self, OracleError> {
        let n = h.qubit_count();
        let inversion = synthesize_inversion(h)?;
        let hm = h
            .sum()
            .to_matrix()
            .map_err(|_| OracleError::EnumerationCapExceeded {
                qubits: n,
                cap: crate::engine::DENSITY_QUBIT_CAP,
            })?;
        Ok(TrapOracle {
            qubits: n,
            half: evolution_operator(&hm, t / 2.0),
            inversion_letters: inversion.string.letters,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    /// Exact output distribution of the trap under one randomness draw,
    /// with the dressing gates applied one by one.
    pub fn distribution(
        &self,
        draw: &TrapRandomness,
        errors: &ErrorConfig,
    ) -> Result<Vec<f64>, OracleError> {
        let n = self.qubits;
        let z = NamedGate::Z.matrix();
        let hadamard = NamedGate::H.matrix();

        let mut s = prepare_zero(n)?;
        s = maybe_channel(s, errors, AttachmentPoint::Prep)?;
        for j in 0..n {
            if draw.z_prep[j] {
                s = apply_single_qubit_unitary(&s, &z, j + 1)?;
            }
        }
        if draw.h {
            for j in 0..n {
                s = apply_single_qubit_unitary(&s, &hadamard, j + 1)?;
            }
        }
        for j in 0..n {
            s = apply_single_qubit_unitary(&s, &draw.paulis[j].matrix(), j + 1)?;
        }
        s = maybe_channel(s, errors, AttachmentPoint::U1)?;
        s = apply_unitary_full(&s, &self.half)?;
        s = maybe_channel(s, errors, AttachmentPoint::Evolution1)?;
        s = maybe_channel(s, errors, AttachmentPoint::BLayer)?;
        for j in 0..n {
            s = apply_single_qubit_unitary(&s, &self.inversion_letters[j].matrix(), j + 1)?;
        }
        s = apply_unitary_full(&s, &self.half)?;
        s = maybe_channel(s, errors, AttachmentPoint::Evolution2)?;
        s = maybe_channel(s, errors, AttachmentPoint::CLayer)?;
        for j in 0..n {
            s = apply_single_qubit_unitary(&s, &self.inversion_letters[j].matrix(), j + 1)?;
        }
        s = maybe_channel(s, errors, AttachmentPoint::U2)?;
        s = maybe_channel(s, errors, AttachmentPoint::DLayer)?;
        for j in 0..n {
            s = apply_single_qubit_unitary(&s, &draw.paulis[j].matrix(), j + 1)?;
        }
        if draw.h {
            for j in 0..n {
                s = apply_single_qubit_unitary(&s, &hadamard, j + 1)?;
            }
        }
        for j in 0..n {
            if draw.z_meas[j] {
                s = apply_single_qubit_unitary(&s, &z, j + 1)?;
            }
        }
        s = maybe_channel(s, errors, AttachmentPoint::Measurement)?;
        Ok(z_distribution(&s))
    }

    /// Probability of a non-all-zero outcome under one draw.
    pub fn incorrect_probability(
        &self,
        draw: &TrapRandomness,
        errors: &ErrorConfig,
    ) -> Result<f64, OracleError> {
        let probs = self.distribution(draw, errors)?;
        Ok((1.0 - probs[0]).clamp(0.0, 1.0))
    }
}

/// Exact trap-failure probability: the expectation of the incorrect-outcome
/// probability over the full randomness space, by exhaustive enumeration.
pub fn exact_p_inco(
    h: &AccreditableHamiltonian,
    t: f64,
    errors: &ErrorConfig,
) -> Result<f64, OracleError> {
    let n = h.qubit_count();
    if n > ENUMERATION_QUBIT_CAP {
        return Err(OracleError::EnumerationCapExceeded {
            qubits: n,
            cap: ENUMERATION_QUBIT_CAP,
        });
    }
    let oracle = TrapOracle::new(h, t)?;
    let mut values = Vec::new();
    for draw in enumerate_trap_randomness(n) {
        values.push(oracle.incorrect_probability(&draw, errors)?);
    }
    Ok(pairwise_sum(&values) / values.len() as f64)
}

/// The largest per-draw trap variation distance from the ideal all-zero
/// point mass, over the full randomness space.
///
/// Per draw, the erroneous-vs-ideal trap distance collapses to the
/// incorrect-outcome probability (the ideal distribution is a point mass),
/// so this is the trap family's sensitivity at its most revealing draw.
/// Comparing it against the target-side distance exhibits, fixture by
/// fixture, the assumption that added single-qubit gates do not reduce the
/// distance; errors caught in only one Hadamard branch make the comparison
/// meaningless draw by draw, which is why the maximum is taken.
pub fn max_trap_variation_distance(
    h: &AccreditableHamiltonian,
    t: f64,
    errors: &ErrorConfig,
) -> Result<f64, OracleError> {
    let n = h.qubit_count();
    if n > ENUMERATION_QUBIT_CAP {
        return Err(OracleError::EnumerationCapExceeded {
            qubits: n,
            cap: ENUMERATION_QUBIT_CAP,
        });
    }
    let oracle = TrapOracle::new(h, t)?;
    let mut worst = 0.0f64;
    for draw in enumerate_trap_randomness(n) {
        worst = worst.max(oracle.incorrect_probability(&draw, errors)?);
    }
    Ok(worst)
}

/// Monte-Carlo estimate of the trap-failure probability for registers above
/// the enumeration cap: random draws, exact per-draw probabilities.
/// Returns `(estimate, standard_error)`.
pub fn p_inco_monte_carlo(
    h: &AccreditableHamiltonian,
    t: f64,
    errors: &ErrorConfig,
    n_draws: usize,
    seed: u64,
) -> Result<(f64, f64), OracleError> {
    assert!(n_draws >= 2, "need at least two draws");
    let oracle = TrapOracle::new(h, t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let draw = crate::trap::draw_trap_randomness(h.qubit_count(), &mut rng);
        values.push(oracle.incorrect_probability(&draw, errors)?);
    }
    let mean = pairwise_sum(&values) / n_draws as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (n_draws as f64 - 1.0);
    Ok((mean, num_traits::Float::sqrt(var / n_draws as f64)))
}

/// Monte-Carlo detection rate with measurement sampling: each sample draws
/// fresh randomness, samples one outcome from the exact per-draw
/// distribution, and counts non-all-zero results.
/// Returns `(rate, standard_error)`.
pub fn detection_rate_empirical(
    h: &AccreditableHamiltonian,
    t: f64,
    errors: &ErrorConfig,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64), OracleError> {
    assert!(n_samples >= 1);
    let oracle = TrapOracle::new(h, t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = h.qubit_count();
    let mut incorrect = 0usize;
    for _ in 0..n_samples {
        let draw = crate::trap::draw_trap_randomness(n, &mut rng);
        let probs = oracle.distribution(&draw, errors)?;
        let r: f64 = rng.random();
        let mut acc = 0.0;
        let mut index = probs.len() - 1;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                index = i;
                break;
            }
        }
        if index != 0 {
            incorrect += 1;
        }
    }
    let rate = incorrect as f64 / n_samples as f64;
    let stderr = num_traits::Float::sqrt(rate * (1.0 - rate) / n_samples as f64);
    Ok((rate, stderr))
}

/// Process (chi) matrix of a channel in the Pauli basis, ordered
/// `(I, X, Y, Z)` per qubit, tensor lexicographic:
/// `E(rho) = sum_{m,n} chi_{m,n} P_m rho P_n`.
pub fn process_matrix(channel: &ErrorChannel) -> Result<CMat, OracleError> {
    let k = channel.arity();
    if k > CHI_ARITY_CAP {
        return Err(OracleError::ChiArityExceeded {
            arity: k,
            cap: CHI_ARITY_CAP,
        });
    }
    let strings = 4usize.pow(k as u32);
    let dim = 1usize << k;
    let paulis: Vec<CMat> = (0..strings)
        .map(|code| letters_matrix(&letters_from_code(code, k)))
        .collect();
    // expand each Kraus operator in the Pauli basis: K = sum_m a_m P_m
    let mut chi = CMat::zeros(strings, strings);
    for kraus in channel.kraus() {
        let coeffs: Vec<C64> = paulis
            .iter()
            .map(|p| {
                let prod = p.adjoint() * kraus;
                (0..dim).map(|i| prod[(i, i)]).sum::<C64>() / C64::new(dim as f64, 0.0)
            })
            .collect();
        for m in 0..strings {
            for n in 0..strings {
                chi[(m, n)] += coeffs[m] * coeffs[n].conj();
            }
        }
    }
    Ok(chi)
}

/// Largest off-diagonal magnitude of a chi matrix.
pub fn chi_offdiagonal_max(chi: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..chi.nrows() {
        for c in 0..chi.ncols() {
            if r != c {
                worst = worst.max(chi[(r, c)].norm());
            }
        }
    }
    worst
}

/// Pauli twirl: the uniform average of the channel over Pauli conjugations,
/// constructed directly as the Kraus family `{ P_m K P_m / 2^k }`. The
/// result's chi matrix is diagonal (a stochastic Pauli mixture).
pub fn twirl(channel: &ErrorChannel) -> Result<ErrorChannel, OracleError> {
    let k = channel.arity();
    if k > CHI_ARITY_CAP {
        return Err(OracleError::ChiArityExceeded {
            arity: k,
            cap: CHI_ARITY_CAP,
        });
    }
    let strings = 4usize.pow(k as u32);
    let dim = 1usize << k;
    let scale = C64::new(1.0 / dim as f64, 0.0);
    let mut kraus = Vec::with_capacity(strings * channel.kraus().len());
    for code in 0..strings {
        let p = letters_matrix(&letters_from_code(code, k));
        for kr in channel.kraus() {
            kraus.push(&p * kr * &p * scale);
        }
    }
    let mut label = String::from("twirl(");
    label.push_str(channel.label());
    label.push(')');
    Ok(ErrorChannel::new(label, kraus, channel.qubits().to_vec())?)
}

/// Diagonal of the chi matrix: the stochastic Pauli weights of the twirled
/// channel, ordered by Pauli code.
pub fn twirl_weights(channel: &ErrorChannel) -> Result<Vec<f64>, OracleError> {
    let chi = process_matrix(channel)?;
    Ok((0..chi.nrows()).map(|m| chi[(m, m)].re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ErrorChannel;
    use crate::graph::square_lattice;
    use crate::hamiltonian::{build_accreditable, CouplingTable};
    use crate::hqs::ComplianceMode;
    use crate::linalg::max_abs_diff;
    use crate::pauli::PauliLetter;
    use num_traits::Float;

    fn lattice_ham(rows: usize, cols: usize, j: f64) -> AccreditableHamiltonian {
        let g = square_lattice(rows, cols);
        build_accreditable(&g, &CouplingTable::uniform(&g, j)).unwrap()
    }

    fn pauli_channel(letter: PauliLetter, qubit: usize) -> ErrorChannel {
        ErrorChannel::unitary(
            alloc::format!("{letter}-injection"),
            letter.matrix(),
            alloc::vec![qubit],
        )
        .unwrap()
    }

    fn inject(point: AttachmentPoint, ch: ErrorChannel) -> ErrorConfig {
        ErrorConfig::new(ComplianceMode::ModelCompliant).with_channel(point, ch)
    }

    #[test]
    fn variation_distance_cases() {
        let p = OutcomeDistribution::new(alloc::vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let u = OutcomeDistribution::new(alloc::vec![0.25; 4]).unwrap();
        assert_eq!(variation_distance(&p, &p).unwrap(), 0.0);
        assert!((variation_distance(&p, &u).unwrap() - 0.75).abs() < 1e-15);
        let q = OutcomeDistribution::new(alloc::vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((variation_distance(&p, &q).unwrap() - 1.0).abs() < 1e-15);
        assert!(variation_distance_slices(&[0.5, 0.5], &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(OutcomeDistribution::new(alloc::vec![0.5, 0.5]).is_ok());
        assert!(OutcomeDistribution::new(alloc::vec![0.9, 0.2]).is_err());
        assert!(OutcomeDistribution::new(alloc::vec![1.1, -0.1]).is_err());
        // tiny negatives are clipped
        let d = OutcomeDistribution::new(alloc::vec![1.0, -1e-13]).unwrap();
        assert_eq!(d.probs()[1], 0.0);
    }

    #[test]
    fn error_free_p_inco_is_zero() {
        let h = lattice_ham(1, 2, 0.9);
        let p = exact_p_inco(&h, 1.2, &ErrorConfig::noiseless()).unwrap();
        assert!(p.abs() < 1e-12);
    }

    #[test]
    fn single_qubit_injections_have_exact_rates() {
        // N = 1: no interactions, trivial inversion, pure dressing algebra.
        let h = lattice_ham(1, 1, 0.0);
        let x = exact_p_inco(&h, 0.8, &inject(AttachmentPoint::Evolution2, pauli_channel(PauliLetter::X, 1))).unwrap();
        assert!((x - 0.5).abs() < 1e-12, "X: {x}");
        let y = exact_p_inco(&h, 0.8, &inject(AttachmentPoint::Evolution2, pauli_channel(PauliLetter::Y, 1))).unwrap();
        assert!((y - 1.0).abs() < 1e-12, "Y: {y}");
        let z = exact_p_inco(&h, 0.8, &inject(AttachmentPoint::Evolution2, pauli_channel(PauliLetter::Z, 1))).unwrap();
        assert!((z - 0.5).abs() < 1e-12, "Z: {z}");
    }

    #[test]
    fn two_qubit_injection_rates_match_lemma_mechanics() {
        let h = lattice_ham(1, 2, 1.0);
        for (letter, expect) in [
            (PauliLetter::X, 0.5),
            (PauliLetter::Y, 1.0),
            (PauliLetter::Z, 0.5),
        ] {
            let got = exact_p_inco(
                &h,
                0.7,
                &inject(AttachmentPoint::Evolution2, pauli_channel(letter, 2)),
            )
            .unwrap();
            assert!((got - expect).abs() < 1e-11, "{letter}: {got} vs {expect}");
        }
    }

    #[test]
    fn enumeration_cap_enforced() {
        let h = lattice_ham(2, 2, 1.0);
        assert!(matches!(
            exact_p_inco(&h, 0.5, &ErrorConfig::noiseless()),
            Err(OracleError::EnumerationCapExceeded { qubits: 4, cap: 3 })
        ));
    }

    #[test]
    fn monte_carlo_agrees_with_enumeration() {
        // one fixture per register size within the enumeration cap
        let cases: [(usize, usize, AttachmentPoint, ErrorChannel); 3] = [
            (1, 1, AttachmentPoint::Evolution2, ErrorChannel::amplitude_damping(0.4, 1).unwrap()),
            (1, 2, AttachmentPoint::Prep, ErrorChannel::bit_flip(0.2, 2).unwrap()),
            (1, 3, AttachmentPoint::Evolution1, ErrorChannel::bit_flip(0.35, 2).unwrap()),
        ];
        for (rows, cols, point, channel) in cases {
            let h = lattice_ham(rows, cols, 0.6);
            let errors = inject(point, channel);
            let exact = exact_p_inco(&h, 0.9, &errors).unwrap();
            let (mc, stderr) = p_inco_monte_carlo(&h, 0.9, &errors, 2000, 77).unwrap();
            assert!(
                (mc - exact).abs() <= 3.0 * stderr.max(1e-6),
                "{rows}x{cols}: mc {mc} vs exact {exact} (stderr {stderr})"
            );
        }
    }

    #[test]
    fn max_trap_distance_dominates_mean() {
        let h = lattice_ham(1, 2, 1.0);
        let errors = inject(
            AttachmentPoint::Evolution2,
            ErrorChannel::bit_flip(0.3, 1).unwrap(),
        );
        let mean = exact_p_inco(&h, 0.7, &errors).unwrap();
        let max = max_trap_variation_distance(&h, 0.7, &errors).unwrap();
        assert!(max >= mean);
        // X-type errors reveal themselves fully in the h = 0 branch
        assert!((max - 0.3).abs() < 1e-11, "max {max}");
        let free = max_trap_variation_distance(&h, 0.7, &ErrorConfig::noiseless()).unwrap();
        assert!(free <= 1e-12);
    }

    #[test]
    fn empirical_detection_matches_exact() {
        let h = lattice_ham(1, 2, 1.0);
        let errors = inject(AttachmentPoint::Evolution2, pauli_channel(PauliLetter::X, 1));
        let (rate, stderr) = detection_rate_empirical(&h, 0.7, &errors, 10_000, 5).unwrap();
        assert!((rate - 0.5).abs() <= 3.0 * stderr, "rate {rate} stderr {stderr}");

        let y_errors = inject(AttachmentPoint::Evolution2, pauli_channel(PauliLetter::Y, 1));
        let (y_rate, _) = detection_rate_empirical(&h, 0.7, &y_errors, 2_000, 6).unwrap();
        assert_eq!(y_rate, 1.0);

        let (free, free_err) =
            detection_rate_empirical(&h, 0.7, &ErrorConfig::noiseless(), 2_000, 7).unwrap();
        assert_eq!((free, free_err), (0.0, 0.0));
    }

    #[test]
    fn chi_of_identity_and_bit_flip() {
        let chi = process_matrix(&ErrorChannel::identity(1)).unwrap();
        assert!((chi[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(chi_offdiagonal_max(&chi) < 1e-14);

        let chi = process_matrix(&ErrorChannel::bit_flip(0.3, 1).unwrap()).unwrap();
        assert!((chi[(0, 0)].re - 0.7).abs() < 1e-12);
        assert!((chi[(1, 1)].re - 0.3).abs() < 1e-12);
        assert!(chi_offdiagonal_max(&chi) < 1e-12);
    }

    #[test]
    fn chi_of_z_rotation_has_iz_coherence() {
        let phi = 0.9f64;
        let u = CMat::from_row_slice(2, 2, &[
            C64::new(Float::cos(phi / 2.0), -Float::sin(phi / 2.0)), C64::new(0.0, 0.0),
            C64::new(0.0, 0.0), C64::new(Float::cos(phi / 2.0), Float::sin(phi / 2.0)),
        ]);
        let ch = ErrorChannel::unitary("rz", u, alloc::vec![1]).unwrap();
        let chi = process_matrix(&ch).unwrap();
        // diagonal carries cos^2 / sin^2, the I-Z coherence is nonzero
        assert!((chi[(0, 0)].re - Float::cos(phi / 2.0).powi(2)).abs() < 1e-12);
        assert!((chi[(3, 3)].re - Float::sin(phi / 2.0).powi(2)).abs() < 1e-12);
        assert!(chi[(0, 3)].norm() > 0.1);

        // twirling kills the coherence and keeps the diagonal
        let twirled = twirl(&ch).unwrap();
        let chi_t = process_matrix(&twirled).unwrap();
        assert!(chi_offdiagonal_max(&chi_t) < 1e-12);
        assert!((chi_t[(0, 0)].re - Float::cos(phi / 2.0).powi(2)).abs() < 1e-12);
        assert!((chi_t[(3, 3)].re - Float::sin(phi / 2.0).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn twirl_fixes_pauli_mixtures() {
        let mix = ErrorChannel::pauli_mixture(
            &[
                (0.8, alloc::vec![PauliLetter::I]),
                (0.2, alloc::vec![PauliLetter::Y]),
            ],
            alloc::vec![1],
        )
        .unwrap();
        let before = process_matrix(&mix).unwrap();
        let after = process_matrix(&twirl(&mix).unwrap()).unwrap();
        assert!(max_abs_diff(&before, &after) < 1e-12);
    }

    #[test]
    fn twirl_weights_sum_to_one() {
        let ch = ErrorChannel::amplitude_damping(0.4, 1).unwrap();
        let w = twirl_weights(&ch).unwrap();
        assert!((pairwise_sum(&w) - 1.0).abs() < 1e-10);
        assert!(w.iter().all(|&x| x >= -1e-12));
    }

    #[test]
    fn pairwise_sum_is_exactish() {
        let xs = alloc::vec![0.1f64; 1000];
        assert!((pairwise_sum(&xs) - 100.0).abs() < 1e-10);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}

//! The hybrid-simulator circuit skeleton with named error attachment points.
//!
//! Execution follows the fixed stage order
//!
//! ```text
//! prep -> A -> U1 -> e^{-iHt/2} -> B -> e^{-iHt/2} -> C -> U2 -> D -> Z-measure
//! ```
//!
//! with one configurable CPTP channel per attachment point. Channels at
//! `prep`, `u1`, and the two evolution slots follow their stage; channels at
//! `b_layer`, `c_layer`, `u2`, and `d_layer` precede theirs; the
//! `measurement` channel acts right before the ideal Z readout. Identity
//! gates occupy explicit layer slots so error channels attach uniformly to
//! target and trap circuits.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::engine::{
    apply_channel, apply_single_qubit_unitary, apply_unitary_full, prepare_zero, z_distribution,
    DensityState, EngineError, ErrorChannel, Propagator, UNITARY_TOL,
};
use crate::linalg::{is_unitary, CMat};
use crate::pauli::WeightedPauliSum;

/// Where in the circuit a channel attaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttachmentPoint {
    Prep,
    U1,
    Evolution1,
    BLayer,
    Evolution2,
    CLayer,
    U2,
    DLayer,
    Measurement,
}

impl AttachmentPoint {
    pub const ALL: [AttachmentPoint; 9] = [
        AttachmentPoint::Prep,
        AttachmentPoint::U1,
        AttachmentPoint::Evolution1,
        AttachmentPoint::BLayer,
        AttachmentPoint::Evolution2,
        AttachmentPoint::CLayer,
        AttachmentPoint::U2,
        AttachmentPoint::DLayer,
        AttachmentPoint::Measurement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttachmentPoint::Prep => "prep",
            AttachmentPoint::U1 => "u1",
            AttachmentPoint::Evolution1 => "evolution_1",
            AttachmentPoint::BLayer => "b_layer",
            AttachmentPoint::Evolution2 => "evolution_2",
            AttachmentPoint::CLayer => "c_layer",
            AttachmentPoint::U2 => "u2",
            AttachmentPoint::DLayer => "d_layer",
            AttachmentPoint::Measurement => "measurement",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }
}

impl fmt::Display for AttachmentPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Whether a configuration promises the full error model.
///
/// `ModelCompliant` declares channels fixed per configuration and defined
/// without reference to the single-qubit gate values. The no-distance-
/// reduction assumption about added single-qubit gates is a statement about
/// nature, not checkable by the simulator; `Unconstrained` marks fixtures
/// built to demonstrate what happens when it fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplianceMode {
    ModelCompliant,
    Unconstrained,
}

/// Channels bound to attachment points, plus the compliance declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorConfig {
    channels: BTreeMap<AttachmentPoint, ErrorChannel>,
    mode: ComplianceMode,
}

impl ErrorConfig {
    pub fn new(mode: ComplianceMode) -> Self {
        ErrorConfig {
            channels: BTreeMap::new(),
            mode,
        }
    }

    /// No channels anywhere; model-compliant by construction.
    pub fn noiseless() -> Self {
        ErrorConfig::new(ComplianceMode::ModelCompliant)
    }

    pub fn with_channel(mut self, point: AttachmentPoint, channel: ErrorChannel) -> Self {
        self.channels.insert(point, channel);
        self
    }

    pub fn channel(&self, point: AttachmentPoint) -> Option<&ErrorChannel> {
        self.channels.get(&point)
    }

    pub fn channels(&self) -> impl Iterator<Item = (AttachmentPoint, &ErrorChannel)> {
        self.channels.iter().map(|(&p, c)| (p, c))
    }

    pub fn mode(&self) -> ComplianceMode {
        self.mode
    }

    pub fn is_model_compliant(&self) -> bool {
        self.mode == ComplianceMode::ModelCompliant
    }
}

/// The circuit skeleton: per-qubit single-qubit layers A/B/C/D (compiled to
/// one 2x2 unitary each), optional encoder/decoder unitaries, and the
/// Hamiltonian evolution split into two half-durations.
#[derive(Debug, Clone, PartialEq)]
pub struct HqsCircuit {
    qubits: usize,
    pub a_layer: Vec<CMat>,
    pub b_layer: Vec<CMat>,
    pub c_layer: Vec<CMat>,
    pub d_layer: Vec<CMat>,
    /// Encoder; `None` stands for the identity.
    pub u1: Option<CMat>,
    /// Decoder; `None` stands for the identity.
    pub u2: Option<CMat>,
    pub hamiltonian: WeightedPauliSum,
    pub t: f64,
}

impl HqsCircuit {
    /// All-identity layers over the Hamiltonian's register.
    pub fn new(hamiltonian: WeightedPauliSum, t: f64) -> Self {
        let n = hamiltonian.qubit_count();
        let id = || (0..n).map(|_| CMat::identity(2, 2)).collect::<Vec<_>>();
        HqsCircuit {
            qubits: n,
            a_layer: id(),
            b_layer: id(),
            c_layer: id(),
            d_layer: id(),
            u1: None,
            u2: None,
            hamiltonian,
            t,
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    /// Check layer lengths and unitarity of every gate and sub-circuit.
    pub fn validate(&self) -> Result<(), EngineError> {
        let dim = 1usize << self.qubits;
        for layer in [&self.a_layer, &self.b_layer, &self.c_layer, &self.d_layer] {
            if layer.len() != self.qubits {
                return Err(EngineError::QubitCountMismatch {
                    expected: self.qubits,
                    got: layer.len(),
                });
            }
            for g in layer {
                if g.nrows() != 2 || g.ncols() != 2 {
                    return Err(EngineError::KrausShapeMismatch {
                        expected_dim: 2,
                        got: g.nrows(),
                    });
                }
                if !is_unitary(g, UNITARY_TOL) {
                    return Err(EngineError::NotUnitary {
                        max_deviation: crate::linalg::max_abs_diff(
                            &(g.adjoint() * g),
                            &CMat::identity(2, 2),
                        ),
                    });
                }
            }
        }
        for u in [&self.u1, &self.u2].into_iter().flatten() {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(EngineError::KrausShapeMismatch {
                    expected_dim: dim,
                    got: u.nrows(),
                });
            }
            if !is_unitary(u, UNITARY_TOL) {
                return Err(EngineError::NotUnitary { max_deviation: 0.0 });
            }
        }
        Ok(())
    }
}

/// Reusable execution context: the half-evolution propagator is computed
/// once and shared by every circuit with the same Hamiltonian and duration
/// (all runs of one protocol execution).
#[derive(Debug, Clone)]
pub struct ExecContext {
    hamiltonian: WeightedPauliSum,
    t: f64,
    half_forward: Propagator,
    half_backward: Propagator,
}

impl ExecContext {
    pub fn new(hamiltonian: &WeightedPauliSum, t: f64) -> Result<Self, EngineError> {
        Ok(ExecContext {
            hamiltonian: hamiltonian.clone(),
            t,
            half_forward: Propagator::new(hamiltonian, t / 2.0)?,
            half_backward: Propagator::new(hamiltonian, -t / 2.0)?,
        })
    }

    pub fn for_circuit(circuit: &HqsCircuit) -> Result<Self, EngineError> {
        ExecContext::new(&circuit.hamiltonian, circuit.t)
    }

    fn check_matches(&self, circuit: &HqsCircuit) -> Result<(), EngineError> {
        if circuit.hamiltonian != self.hamiltonian || circuit.t != self.t {
            return Err(EngineError::QubitCountMismatch {
                expected: self.hamiltonian.qubit_count(),
                got: circuit.qubit_count(),
            });
        }
        Ok(())
    }

    /// Run the circuit under the error configuration; returns the
    /// pre-measurement state (the `measurement` channel already applied).
    pub fn execute(
        &self,
        circuit: &HqsCircuit,
        errors: &ErrorConfig,
    ) -> Result<DensityState, EngineError> {
        self.check_matches(circuit)?;
        circuit.validate()?;
        let n = circuit.qubit_count();
        let chan = |s: DensityState, point: AttachmentPoint| -> Result<DensityState, EngineError> {
            match errors.channel(point) {
                Some(c) => apply_channel(&s, c),
                None => Ok(s),
            }
        };

        let mut s = prepare_zero(n)?;
        s = chan(s, AttachmentPoint::Prep)?;
        s = apply_layer(&s, &circuit.a_layer)?;
        if let Some(u1) = &circuit.u1 {
            s = apply_unitary_full(&s, u1)?;
        }
        s = chan(s, AttachmentPoint::U1)?;
        s = self.half_forward.apply(&s)?;
        s = chan(s, AttachmentPoint::Evolution1)?;
        s = chan(s, AttachmentPoint::BLayer)?;
        s = apply_layer(&s, &circuit.b_layer)?;
        s = self.half_forward.apply(&s)?;
        s = chan(s, AttachmentPoint::Evolution2)?;
        s = chan(s, AttachmentPoint::CLayer)?;
        s = apply_layer(&s, &circuit.c_layer)?;
        s = chan(s, AttachmentPoint::U2)?;
        if let Some(u2) = &circuit.u2 {
            s = apply_unitary_full(&s, u2)?;
        }
        s = chan(s, AttachmentPoint::DLayer)?;
        s = apply_layer(&s, &circuit.d_layer)?;
        s = chan(s, AttachmentPoint::Measurement)?;
        Ok(s)
    }

    /// Execute the rewritten circuit in which all single-qubit layers are
    /// error-free and the mid-circuit errors are replaced by the two
    /// composite channels conjugated into the evolution slots. Produces the
    /// same distribution as [`ExecContext::execute`] whenever the channels
    /// are gate-independent; preparation and measurement channels stay put.
    pub fn execute_canonical_form(
        &self,
        circuit: &HqsCircuit,
        errors: &ErrorConfig,
    ) -> Result<DensityState, EngineError> {
        self.check_matches(circuit)?;
        circuit.validate()?;
        let n = circuit.qubit_count();
        let chan = |s: DensityState, point: AttachmentPoint| -> Result<DensityState, EngineError> {
            match errors.channel(point) {
                Some(c) => apply_channel(&s, c),
                None => Ok(s),
            }
        };

        let mut s = prepare_zero(n)?;
        s = chan(s, AttachmentPoint::Prep)?;
        s = apply_layer(&s, &circuit.a_layer)?;
        if let Some(u1) = &circuit.u1 {
            s = apply_unitary_full(&s, u1)?;
        }
        s = self.half_forward.apply(&s)?;

        // First composite channel, conjugated back through the first half
        // evolution. The encoder and its adjoint would sandwich an A-layer
        // error slot here; no such attachment point exists, so the pair
        // cancels outright.
        s = self.half_backward.apply(&s)?;
        s = chan(s, AttachmentPoint::U1)?;
        s = self.half_forward.apply(&s)?;
        s = chan(s, AttachmentPoint::Evolution1)?;
        s = chan(s, AttachmentPoint::BLayer)?;

        s = apply_layer(&s, &circuit.b_layer)?;
        s = self.half_forward.apply(&s)?;

        // Second composite channel: the C/U2/D-side errors conjugated back
        // before the C layer.
        s = chan(s, AttachmentPoint::Evolution2)?;
        s = chan(s, AttachmentPoint::CLayer)?;
        s = apply_layer(&s, &circuit.c_layer)?;
        s = chan(s, AttachmentPoint::U2)?;
        if let Some(u2) = &circuit.u2 {
            s = apply_unitary_full(&s, u2)?;
        }
        s = chan(s, AttachmentPoint::DLayer)?;
        if let Some(u2) = &circuit.u2 {
            s = apply_unitary_full(&s, &u2.adjoint())?;
        }
        s = apply_adjoint_layer(&s, &circuit.c_layer)?;

        // Error-free tail.
        s = apply_layer(&s, &circuit.c_layer)?;
        if let Some(u2) = &circuit.u2 {
            s = apply_unitary_full(&s, u2)?;
        }
        s = apply_layer(&s, &circuit.d_layer)?;
        s = chan(s, AttachmentPoint::Measurement)?;
        Ok(s)
    }
}

fn apply_layer(state: &DensityState, layer: &[CMat]) -> Result<DensityState, EngineError> {
    let mut s = state.clone();
    for (i, g) in layer.iter().enumerate() {
        s = apply_single_qubit_unitary(&s, g, i + 1)?;
    }
    Ok(s)
}

fn apply_adjoint_layer(state: &DensityState, layer: &[CMat]) -> Result<DensityState, EngineError> {
    let mut s = state.clone();
    for (i, g) in layer.iter().enumerate() {
        s = apply_single_qubit_unitary(&s, &g.adjoint(), i + 1)?;
    }
    Ok(s)
}

/// One-shot execution; builds the propagators on every call. Hot paths use
/// [`ExecContext`] directly.
pub fn execute(circuit: &HqsCircuit, errors: &ErrorConfig) -> Result<DensityState, EngineError> {
    ExecContext::for_circuit(circuit)?.execute(circuit, errors)
}

/// Z-basis outcome distribution of the executed circuit.
pub fn exact_output_distribution(
    circuit: &HqsCircuit,
    errors: &ErrorConfig,
) -> Result<Vec<f64>, EngineError> {
    Ok(z_distribution(&execute(circuit, errors)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{evolve, Gate, NamedGate};
    use crate::linalg::{max_abs_diff, random_unitary, C64};
    use crate::pauli::PauliLetter;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn xy_chain(n: usize) -> WeightedPauliSum {
        let mut h = WeightedPauliSum::new(n);
        for q in 1..n {
            for letter in [PauliLetter::X, PauliLetter::Y] {
                let mut letters = alloc::vec![PauliLetter::I; n];
                letters[q - 1] = letter;
                letters[q] = letter;
                h.add_term(1.0, letters).unwrap();
            }
        }
        h
    }

    #[test]
    fn error_free_target_matches_plain_evolution() {
        let h = xy_chain(2);
        let mut circuit = HqsCircuit::new(h.clone(), 0.9);
        circuit.a_layer[0] = NamedGate::X.matrix();
        let via_hqs = execute(&circuit, &ErrorConfig::noiseless()).unwrap();

        let s = prepare_zero(2).unwrap();
        let s = crate::engine::apply_gate(&s, &Gate::named(NamedGate::X, 1)).unwrap();
        let direct = evolve(&s, &h, 0.9).unwrap();
        assert!(max_abs_diff(via_hqs.rho(), direct.rho()) < 1e-10);
    }

    #[test]
    fn prep_bit_flip_flips_first_bit() {
        let h = WeightedPauliSum::new(2); // zero Hamiltonian
        let circuit = HqsCircuit::new(h, 1.0);
        let errors = ErrorConfig::new(ComplianceMode::ModelCompliant)
            .with_channel(AttachmentPoint::Prep, ErrorChannel::bit_flip(0.25, 1).unwrap());
        let probs = exact_output_distribution(&circuit, &errors).unwrap();
        assert!((probs[0] - 0.75).abs() < 1e-12);
        assert!((probs[2] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn swap_dynamics_reach_01() {
        let h = xy_chain(2);
        let mut circuit = HqsCircuit::new(h, core::f64::consts::FRAC_PI_4);
        circuit.a_layer[0] = NamedGate::X.matrix();
        let probs = exact_output_distribution(&circuit, &ErrorConfig::noiseless()).unwrap();
        assert!((probs[1] - 1.0).abs() < 1e-10, "{probs:?}");
    }

    #[test]
    fn full_depolarizing_wipes_to_uniform() {
        let h = xy_chain(2);
        let circuit = HqsCircuit::new(h, 0.4);
        let errors = ErrorConfig::new(ComplianceMode::ModelCompliant).with_channel(
            AttachmentPoint::Evolution2,
            ErrorChannel::depolarizing(1.0, alloc::vec![1, 2]).unwrap(),
        );
        let probs = exact_output_distribution(&circuit, &errors).unwrap();
        for p in probs {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn reexecution_is_bitwise_identical() {
        let h = xy_chain(3);
        let mut circuit = HqsCircuit::new(h, 0.6);
        circuit.a_layer[1] = NamedGate::H.matrix();
        let errors = ErrorConfig::new(ComplianceMode::ModelCompliant)
            .with_channel(AttachmentPoint::Evolution1, ErrorChannel::bit_flip(0.1, 2).unwrap())
            .with_channel(AttachmentPoint::Measurement, ErrorChannel::phase_flip(0.2, 3).unwrap());
        let a = exact_output_distribution(&circuit, &errors).unwrap();
        let b = exact_output_distribution(&circuit, &errors).unwrap();
        assert_eq!(a, b);
    }

    fn random_error_config(rng: &mut ChaCha8Rng, n: usize) -> ErrorConfig {
        let mut cfg = ErrorConfig::new(ComplianceMode::ModelCompliant);
        for point in AttachmentPoint::ALL {
            match rng.random_range(0..3) {
                0 => {}
                1 => {
                    let q = rng.random_range(1..=n);
                    cfg = cfg.with_channel(
                        point,
                        ErrorChannel::bit_flip(rng.random::<f64>() * 0.4, q).unwrap(),
                    );
                }
                _ => {
                    let q = rng.random_range(1..=n);
                    cfg = cfg.with_channel(
                        point,
                        ErrorChannel::amplitude_damping(rng.random::<f64>() * 0.3, q).unwrap(),
                    );
                }
            }
        }
        cfg
    }

    #[test]
    fn canonical_form_reproduces_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for n in 2..=3usize {
            let h = xy_chain(n);
            let ctx = ExecContext::new(&h, 0.8).unwrap();
            for _ in 0..3 {
                let mut circuit = HqsCircuit::new(h.clone(), 0.8);
                for layer in [
                    &mut circuit.a_layer,
                    &mut circuit.b_layer,
                    &mut circuit.c_layer,
                    &mut circuit.d_layer,
                ] {
                    for g in layer.iter_mut() {
                        *g = random_unitary(&mut rng, 2);
                    }
                }
                circuit.u2 = Some(random_unitary(&mut rng, 1 << n));
                let errors = random_error_config(&mut rng, n);
                let direct = z_distribution(&ctx.execute(&circuit, &errors).unwrap());
                let canonical =
                    z_distribution(&ctx.execute_canonical_form(&circuit, &errors).unwrap());
                let diff: f64 = direct
                    .iter()
                    .zip(&canonical)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-9, "n = {n}, diff = {diff:.3e}");
            }
        }
    }

    #[test]
    fn context_rejects_mismatched_circuit() {
        let ctx = ExecContext::new(&xy_chain(2), 0.5).unwrap();
        let other = HqsCircuit::new(xy_chain(2), 0.6);
        assert!(ctx.execute(&other, &ErrorConfig::noiseless()).is_err());
    }

    #[test]
    fn validate_catches_bad_layers() {
        let h = xy_chain(2);
        let mut circuit = HqsCircuit::new(h, 0.1);
        circuit.b_layer[0] = CMat::identity(2, 2) * C64::new(0.5, 0.0);
        assert!(matches!(circuit.validate(), Err(EngineError::NotUnitary { .. })));
        circuit.b_layer[0] = CMat::identity(2, 2);
        circuit.c_layer.pop();
        assert!(matches!(
            circuit.validate(),
            Err(EngineError::QubitCountMismatch { .. })
        ));
    }

    #[test]
    fn attachment_point_names_roundtrip() {
        for p in AttachmentPoint::ALL {
            assert_eq!(AttachmentPoint::from_name(p.name()), Some(p));
        }
        assert_eq!(AttachmentPoint::from_name("nowhere"), None);
    }
}

//! Core library for accrediting hybrid analogue-digital quantum simulators.
//!
//! An accreditation run interleaves one *target* simulation with many *trap*
//! simulations on the same circuit skeleton. Traps are built so that their
//! error-free output is the all-zero string with certainty; the observed trap
//! failure rate then yields an upper bound on the variation distance between
//! the erroneous and error-free output distributions of the target.
//!
//! The crate provides, bottom up:
//!
//! - [`pauli`] — exact symbolic algebra for Pauli strings and real-weighted
//!   Pauli sums, with dense matrix realization.
//! - [`graph`] — interaction graphs, 2-colourings, chromatic subsets, and the
//!   square-lattice checkerboard construction.
//! - [`hamiltonian`] — XY-interaction Hamiltonians on a coupling graph, plus
//!   the XY-model variant with onsite Z terms.
//! - [`inversion`] — synthesis and verification of time-inversion circuits
//!   `C` with `C H C† = -H`.
//! - [`engine`] — exact density-matrix simulation: gates, Hamiltonian
//!   evolution, CPTP channels, Z-basis distributions and sampling.
//! - [`hqs`] — the hybrid-simulator circuit skeleton with named error
//!   attachment points.
//! - [`trap`] — target and trap circuit construction with per-run
//!   randomization.
//! - [`protocol`] — the end-to-end accreditation protocol: trap counts, run
//!   scheduling, tallying, and the epsilon bound.
//! - [`oracle`] — independent brute-force computations (variation distance,
//!   exact trap-failure probability, process matrices, Pauli twirls) used to
//!   cross-check everything above.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the companion CLI
//! crate carries all IO, file formats, and parallel scheduling.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod engine;
pub mod graph;
pub mod hamiltonian;
pub mod hqs;
pub mod inversion;
pub mod linalg;
pub mod oracle;
pub mod pauli;
pub mod protocol;
pub mod trap;

pub use engine::{BitString, DensityState, ErrorChannel, Gate, GateKind};
pub use graph::{ChromaticSubset, InteractionGraph, TwoColoring};
pub use hamiltonian::{AccreditableHamiltonian, CouplingTable};
pub use hqs::{AttachmentPoint, ComplianceMode, ErrorConfig, HqsCircuit};
pub use inversion::InversionCircuit;
pub use pauli::{PauliLetter, PauliString, WeightedPauliSum};
pub use protocol::{ProtocolConfig, ProtocolResult};
pub use trap::{TargetSpec, TrapRandomness};

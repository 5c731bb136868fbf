//! Deterministic state-vector simulation of photon-mediated quantum-dot spin
//! gates: the (SWAP)^(1/m) and controlled-(swap)^(1/m) constructions built
//! from double-sided QD–cavity units, linear optics and feed-forward.
//!
//! The crate is organised bottom-up:
//!
//! * [`hilbert`]: labelled one-photon-plus-N-spins state vectors and the
//!   primitive operator applications.
//! * [`emitter`]: cavity scattering coefficients and the spin-dependent
//!   "round" maps, ideal and realistic.
//! * [`optics`]: Jones matrices, wave-plate recipes, beam splitters and spin
//!   single-qubit operations.
//! * [`circuits`]: the two gate pipelines, their target unitaries, printed
//!   checkpoint states and ideal-mode verification.
//! * [`metrics`]: angle-averaged fidelity/efficiency and parameter sweeps.
//! * [`cli`]: the `qdgate` command-line front end.

pub mod circuits;
pub mod cli;
pub mod emitter;
mod error;
pub mod hilbert;
pub mod metrics;
pub mod optics;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Tolerance for exactness assertions on composed ideal operations.
pub const EPS: f64 = 1e-12;

//! Synthesis and verification of position-controlled composite single-qubit gates.
//!
//! A composite gate here is a sequence of equal-duration laser pulses whose phases are
//! set by sub-wavelength ion displacements. The crate is organised bottom-up:
//!
//! * [`su2`] exact 2x2 unitary algebra; the oracle everything else is checked against.
//! * [`response`] the response functions `A[θ]`, `C[θ]` as parity-constrained
//!   trigonometric series, achievability checks, and phase extraction.
//! * [`synthesis`] the length-3 and length-4 constraint systems and their validity predicates.
//! * [`region`] validity maps over `(θ₀, θ_T)` and full-range base-rotation intervals.
//! * [`beam`] Gaussian beam, zone Rabi frequencies and DAC-quantized displacements.
//! * [`experiment`] Ramsey, composite and two-zone scan simulation with SPAM and shot noise.
//! * [`config`] JSON configuration documents shared by the model and experiment layers.
//!
//! Data-parallel sweeps run on rayon when the `parallel` feature is enabled (the default)
//! and fall back to plain iterators otherwise; results are identical either way.

pub mod beam;
pub mod config;
pub mod error;
pub mod experiment;
pub mod format;
mod linalg;
pub mod par;
pub mod region;
pub mod response;
pub mod su2;
pub mod synthesis;
pub mod tolerances;

pub use error::{Error, Result};
pub use su2::{PhaseSequence, Rotation, Unitary2};

//! Two-qubit polarization entanglement and CHSH Bell tests over the full
//! Poincaré–Bloch sphere.
//!
//! The crate models polarization qubits with |H⟩ at the north pole of the
//! sphere, measurement bases as antipodal point pairs, and great circles of
//! bases (linear, circular-elliptical, diagonal-elliptical families).  On top
//! of that it computes correlation tensors, CHSH values, violation
//! landscapes, maximal-violation searches, and a photon-counting Monte Carlo
//! with waveplate models of the detection pipeline.
//!
//! Modules:
//! - [`states`]: two-qubit state vectors, density matrices, named Bell-like
//!   states, fidelity, white-noise mixing.
//! - [`bases`]: measurement directions on the sphere, projector pairs, great
//!   circles, ellipticity, SU(2) rotations.
//! - [`correlations`]: joint probabilities, correlation tensors, measured and
//!   closed-form expectation values.
//! - [`chsh`]: CHSH ``S`` values, landscapes over detector angles, paths,
//!   maximal-violation searches, the Horodecki criterion.
//! - [`apparatus`]: Jones matrices for waveplates, projection settings,
//!   quartz-phase tuning, coincidence-count simulation.
//! - [`angle`]: radian parsing/printing helpers shared with the CLI.

pub mod angle;
pub mod apparatus;
pub mod bases;
pub mod chsh;
pub mod correlations;
pub mod error;
pub mod states;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// CHSH value at the Tsirelson bound, the quantum maximum 2√2.
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

/// CHSH value at the local-realist (classical) bound.
pub const CLASSICAL_BOUND: f64 = 2.0;

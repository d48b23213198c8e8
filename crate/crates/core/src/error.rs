//! Error type shared by all modules of the crate.

/// Errors reported by state construction, basis math, and scan setup.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A matrix expected to be unitary failed the ‖U†U − I‖ check.
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    /// A scalar argument fell outside its documented range.
    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Ellipticity is only defined on the circular (hr) and diagonal (dr)
    /// great circles.
    #[error("direction (theta={theta}, phi={phi}) lies on neither the hr nor the dr great circle")]
    NotOnEllipticityCircle { theta: f64, phi: f64 },

    /// Probabilities that should sum to one did not.
    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    /// No closed-form expectation is tabulated for this state/basis pair.
    #[error("no closed-form expectation for state {state} on basis pair {basis_pair}")]
    UnsupportedCombination {
        state: &'static str,
        basis_pair: &'static str,
    },

    /// Grids need at least two samples per axis.
    #[error("grid resolution {0} is too small; need at least 2 points per axis")]
    ResolutionTooSmall(usize),

    /// A state vector with zero norm cannot be normalized.
    #[error("cannot normalize a zero state vector")]
    ZeroNorm,

    /// A matrix failed the density-matrix checks (hermiticity, unit trace,
    /// positive semidefiniteness).
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// A string argument (angle, direction, state tag, …) failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Convenience alias used by every fallible operation in the crate.
pub type Result<T> = std::result::Result<T, Error>;

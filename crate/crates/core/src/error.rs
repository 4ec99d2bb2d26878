use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = QesError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QesError {
    #[error("domain error: {0}")]
    Domain(String),

    /// Quantization with a non-rotating frame.
    #[error(
        "no bound states: with Ω = 0 the rotational coupling vanishes and radial mode n = {n} admits no \
         terminating (polynomial) solution"
    )]
    NoBoundStates { n: u32 },

    #[error("radial mode n = {n} is outside the allowed range n ≥ {min}")]
    InvalidRadialMode { n: u32, min: u32 },

    #[error("inconsistent quantization: λ²/4 - |l| - l - 2 = {found}, expected {expected}")]
    Inconsistent { found: f64, expected: f64 },

    #[error("termination polynomial has no real roots (complex roots: {complex:?})")]
    NoRealRoots { complex: Vec<Complex64> },

    #[error("degenerate polynomial: all coefficients vanish")]
    DegeneratePolynomial,

    #[error(
        "potential not confining on the grid: V(r_max = {r_max}) = {v_max} < {required} \
         (suggested r_max ≥ {suggested_r_max})"
    )]
    Unconfined { r_max: f64, v_max: f64, required: f64, suggested_r_max: f64 },

    #[error("grid too small: {0}")]
    Grid(String),
}

impl QesError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        QesError::Domain(msg.into())
    }
}

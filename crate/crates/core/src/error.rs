use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("horizon delta = {delta} exceeds half the domain extent X/2 = {half_extent}; pass allow_wrap to build a periodically wrapped stencil")]
    HorizonTooLarge { delta: f64, half_extent: f64 },

    #[error("stencil radius {radius} wraps onto itself on an n = {n} grid (need 2r < n)")]
    StencilWraps { radius: usize, n: usize },

    #[error(
        "stencil quadrature did not converge: second-moment residual {estimate:e} exceeds tolerance {tolerance:e}"
    )]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("imaginary residue {residue:e} above bound {bound:e} after inverse transform")]
    ImaginaryResidue { residue: f64, bound: f64 },

    #[error("maximum principle violated at step {step}: max norm {max_norm}")]
    MaximumPrinciple { step: usize, max_norm: f64 },

    #[error("non-finite value in solution at step {step}")]
    NonFinite { step: usize },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

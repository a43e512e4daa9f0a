use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input: bad descriptor, empty grid, inconsistent window.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested quantity is undefined for these inputs.
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition on exponents (e.g. `sup q·β < n`) fails.
    #[error("admissibility error: {0}")]
    Admissibility(String),

    #[error(
        "quadrature did not converge after {panels} panels (best {best:e} ± {err_estimate:e})"
    )]
    Quadrature {
        best: f64,
        err_estimate: f64,
        panels: usize,
    },

    /// Tail beyond the dyadic window is too large; `required_k_max` is the
    /// window end that would make it negligible, `None` if the tail diverges.
    #[error("truncation error: tail {tail:e} exceeds tolerance {tolerance:e} (required k_max: {required_k_max:?})")]
    Truncation {
        tail: f64,
        tolerance: f64,
        required_k_max: Option<i32>,
    },

    #[error("divergence: {0}")]
    Divergence(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{context}: no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence {
        context: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("model: degenerate minimum (Hessian eigenvalues {min_eig:e} .. {max_eig:e})")]
    DegenerateMinimum { min_eig: f64, max_eig: f64 },

    #[error("model: hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("{context}: matrix is not symmetric positive definite")]
    NotPositiveDefinite { context: &'static str },

    #[error("propagator: singular matrix at s = {s}")]
    SingularMatrix { s: f64 },

    #[error("propagator: epsilon {eps} is not below eps1 = alpha/b1 = {eps1}")]
    EpsilonTooLarge { eps: f64, eps1: f64 },

    #[error("trees: order {k} exceeds the enumeration ceiling {ceiling}")]
    OrderTooLarge { k: usize, ceiling: usize },

    #[error("series: imaginary part {imag:e} leaked into a real field")]
    ComplexLeak { imag: f64 },

    #[error("verify: integrator step failure at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },

    #[error("verify: insufficient data: {0}")]
    InsufficientData(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("c·M = {value} is not an integer effective dimension")]
    NonIntegerEffectiveDimension { value: f64 },

    #[error("K = {k} users exceed the effective dimension c·M = {effective_dim}")]
    OverloadedSystem { k: usize, effective_dim: usize },

    #[error("{name} = {value} is out of range ({expected})")]
    BadRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("precondition matrix is singular: pivot {index} has magnitude {magnitude:e}")]
    SingularPrecondition { index: usize, magnitude: f64 },

    #[error("Gram matrix is not numerically positive definite")]
    SingularGram,

    #[error("ideal ZF is degenerate: load {load} must stay below {capacity}")]
    DegenerateZf { load: f64, capacity: f64 },

    #[error("{skipped} of {trials} trials were numerically degenerate (budget 0.1%)")]
    DegenerateBudgetExceeded { skipped: usize, trials: usize },

    #[error("invalid experiment plan: {0}")]
    Plan(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn range(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::BadRange {
            name,
            value,
            expected,
        }
    }
}

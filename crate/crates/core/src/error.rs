use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `d` must be at least 2.
    #[error("d = {0} is out of range (need d >= 2)")]
    OutOfRange(u64),

    #[error("{n} = {factorization} not squarefree")]
    NotSquarefree { n: u64, factorization: String },

    #[error("zero has no valuation")]
    ZeroValuation,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The input is a valid solution but lies in the irrelevant orbit.
    #[error("solution is irrelevant (rational)")]
    Irrelevant,

    #[error("parametrisation violated: {0}")]
    ParamViolation(String),

    #[error("m = {m} exceeds the factorization cap {cap}")]
    CapExceeded { m: u32, cap: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

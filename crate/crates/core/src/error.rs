use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("breakpoints must be strictly increasing (violated at index {index})")]
    NonMonotoneMesh { index: usize },

    #[error("expected {expected} values for {breakpoints} breakpoints, got {got}")]
    LengthMismatch {
        breakpoints: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },

    #[error("coefficients live on different intervals: [{a0}, {b0}] vs [{a1}, {b1}]")]
    DomainMismatch { a0: f64, b0: f64, a1: f64, b1: f64 },

    #[error("{what}: {value} lies outside the admissible domain {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("bc.{field} must lie in {range}, got {value}")]
    InvalidBoundaryAngle {
        field: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("problem is not right-definite: {0}")]
    NotRightDefinite(String),

    #[error("eigenvalue {index} not found before |λ| reached the cap {cap:e}")]
    EigenvalueNotFound { index: usize, cap: f64 },

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("Λ(λ) = {mu} has no root on the requested branch (minimum (πe)² ≈ 72.93)")]
    NoRoot { mu: f64 },

    #[error("sieve limit {limit} exceeds the memory guard {max}")]
    LimitTooLarge { limit: u64, max: u64 },

    #[error("epsilon {0} outside (0, 1/2)")]
    EpsilonOutOfRange(f64),

    #[error("max modulus never exceeded 10 on the sampled radii")]
    DegenerateModulus,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

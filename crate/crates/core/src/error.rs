use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no zero of |s|^(q-2)s - f(s) found on the {side} half-line")]
    NoZeroFound { side: &'static str },

    #[error("hypotheses on f violated: {0}")]
    HypothesisViolated(String),

    #[error("g(s) = f(s)/(|s|^(q-2)s) is undefined at s = 0")]
    DomainError,

    #[error("argument {value} outside the admissible interval ({lower}, {upper})")]
    OutOfRange { value: f64, lower: f64, upper: f64 },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature did not converge (last estimate {estimate}, change {change})")]
    QuadratureFailure { estimate: f64, change: f64 },

    #[error("root bracket does not change sign: f({a}) = {fa}, f({b}) = {fb}")]
    NoSignChange { a: f64, fa: f64, b: f64, fb: f64 },

    #[error("minimizers are only defined for q > p")]
    NotApplicable,

    #[error("core lengths sum to {sum}, expected {budget}")]
    BudgetMismatch { sum: f64, budget: f64 },

    #[error("expected {expected} core lengths, got {got}")]
    CoreCount { expected: usize, got: usize },

    #[error("assembled profile has length {length}, expected 1")]
    ShapeError { length: f64 },

    #[error("shooting trajectory blew up at x = {x} (|phi| = {value})")]
    Blowup { x: f64, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

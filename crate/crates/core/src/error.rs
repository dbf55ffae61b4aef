use thiserror::Error;

/// Errors raised by the verifiers.
///
/// Inequality violations are never errors: they are reported as negative
/// margins so a caller can decide what tolerance to apply.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Solver or run parameters are unusable (step too large, non-positive horizon, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A hypothesis required by the check is not satisfied.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A query falls outside the range a precomputed table covers.
    #[error("range error: {0}")]
    Range(String),

    /// The profile family cannot be used in this regime (e.g. a non-monotone bump
    /// where monotonicity is required).
    #[error("unsupported profile: {0}")]
    UnsupportedProfile(String),

    /// The model fails the curvature hypothesis; `margin` is the most negative
    /// value of `Ric + n + n λ` found on the grid.
    #[error("model is inadmissible for the curvature bound (margin {margin:e})")]
    Inadmissible { margin: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

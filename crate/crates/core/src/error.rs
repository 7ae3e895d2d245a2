use thiserror::Error;

/// Errors produced by the library.
///
/// The variants split into two families that the CLI maps onto exit codes:
/// caller mistakes (bad parameters, energies outside the bound window,
/// operations a variant does not support) and internal failures (quadrature
/// that refuses to converge, an algebraic identity that does not hold to
/// tolerance, a branch-safety precondition caught at runtime).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no bound motion: {0}")]
    NoBoundMotion(String),

    #[error("unsupported for {system}: {what}")]
    Unsupported { system: &'static str, what: String },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("algebra violation: {0}")]
    AlgebraViolation(String),

    #[error("branch safety violated: {0}")]
    BranchSafety(String),

    #[error("limit violation: {0}")]
    LimitViolation(String),
}

impl Error {
    /// True when the error reports a problem with the caller's input rather
    /// than an internal numerical failure.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::InvalidConfig(_)
                | Error::NoBoundMotion(_)
                | Error::Unsupported { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

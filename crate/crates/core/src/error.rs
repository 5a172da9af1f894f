use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input (bad parameter, point outside the domain, ...).
    #[error("input error: {0}")]
    Input(String),

    /// The subdivision violates one or more of its structural invariants.
    #[error("invalid subdivision: {}", .0.join("; "))]
    InvalidSubdivision(Vec<String>),

    /// A parameter combination the discretization cannot honour.
    #[error("configuration error: {0}")]
    Config(String),

    /// The input is degenerate for the requested construction (for example a zero lower bound).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A numerical routine failed to produce a usable answer.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// An invariant that should always hold did not.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error is caused by the caller's input rather than by the algorithms.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Input(_) | Error::InvalidSubdivision(_) | Error::Config(_) | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

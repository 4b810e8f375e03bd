use thiserror::Error;

/// Errors raised by the library. Mathematical verdicts (an invalid tuple, a
/// non-KSPI pair) are reported as values, not through this type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input: bad JSON, unknown ids, wrong shapes, unparsable values.
    #[error("schema error: {0}")]
    Schema(String),
    /// An argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The tuple does not satisfy the hypotheses an operation needs.
    #[error("unsupported tuple: {0}")]
    Unsupported(String),
    /// Rewriting did not reach a normal form within the step cap.
    #[error("rewriting exceeded the cap of {0} steps")]
    Divergence(usize),
    #[error("element is not in the ideal K: {0}")]
    NotInKernel(String),
    #[error("invalid Katsura triple: {0}")]
    Construction(String),
    #[error("unit cannot be encoded: {0}")]
    Encoding(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

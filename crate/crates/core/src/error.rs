use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dictionary size {size} exceeds the configured cap {cap}")]
    SizeLimit { size: u128, cap: u128 },

    #[error(
        "{count} supports exceed the combinatorial cap {cap}; use randomized mode for an estimate"
    )]
    CombinatorialLimit { count: u128, cap: u128 },

    #[error("search cap exceeded: {0}")]
    CapExceeded(String),

    #[error("Gram matrix is not numerically positive definite: {0}")]
    Conditioning(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("unsupported sampling mode: {0}")]
    UnsupportedMode(String),

    #[error("every dictionary column vanishes on the sample set")]
    DegenerateDictionary,

    #[error("coefficient grid does not cover the requested blocks: {0}")]
    Coverage(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for errors raised because a size or enumeration bound was hit.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::SizeLimit { .. } | Error::CombinatorialLimit { .. } | Error::CapExceeded(_)
        )
    }
}

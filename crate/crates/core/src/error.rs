use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),
    #[error("scalar domain mismatch: {0}")]
    ScalarDomainMismatch(String),
    #[error("unsupported group family: {0}")]
    UnsupportedFamily(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not certifiable: {0}")]
    NotCertifiable(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("singular compression: {0}")]
    Singular(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

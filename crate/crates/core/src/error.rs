use thiserror::Error;

use crate::certificate::BoundCertificate;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands disagree on species count or truncation order.
    #[error("structural mismatch: {0}")]
    Structural(String),
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The request exceeds the enumeration or desk-scale limits.
    #[error("capability limit: {0}")]
    Capability(String),
    #[error("invalid input: {0}")]
    Input(String),
    /// A convergence certificate failed; the certificate carries the margins.
    #[error("certificate refused: {}", .0.summary())]
    Refused(Box<BoundCertificate>),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point set is not open (not upward closed): {0}")]
    NotOpen(String),
    #[error("sections are not presented: {0}")]
    SectionsNotPresented(String),
    #[error("homomorphism is not presented as a localization: {0}")]
    NotLocalizationPresented(String),
    #[error("module or algebra is not graded: {0}")]
    UngradedModule(String),
    #[error("graded piece is not finite dimensional: {0}")]
    InfiniteGradedPiece(String),
    #[error("radical not certified within degree bound {0}")]
    DegreeBoundExceeded(u32),
    #[error("roof is not invertible: {0}")]
    NotInvertible(String),
    #[error("fields do not match: {0}")]
    FieldMismatch(String),
    #[error("invalid homomorphism: {0}")]
    InvalidHom(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

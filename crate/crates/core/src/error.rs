use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("invalid relation spec: {0}")]
    Spec(#[from] crate::chiodo::SpecError),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

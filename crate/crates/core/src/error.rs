use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("n too small: {n} < {min}")]
    GridTooSmall { n: usize, min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite sample {value} at node {node} (r = {r})")]
    NonFinite { node: usize, r: f64, value: f64 },

    #[error("field has {got} values but the grid has {expected} nodes")]
    LengthMismatch { got: usize, expected: usize },

    #[error("field is identically zero")]
    ZeroField,

    #[error("negative density {value} at node {node}")]
    NegativeDensity { node: usize, value: f64 },

    #[error("field violates the Dirichlet condition at node {node} (value {value})")]
    Dirichlet { node: usize, value: f64 },

    #[error("grid under-resolved: {0}")]
    UnderResolved(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown scenario {0:?}; expected one of: {1}")]
    UnknownScenario(String, String),
    #[error("empty parameter grid: {0}")]
    EmptyGrid(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{context}: {source}")]
    Module {
        context: String,
        #[source]
        source: spslab_core::Error,
    },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Attaches run context to module errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Context<T> for spslab_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| Error::Module {
            context: what(),
            source,
        })
    }
}

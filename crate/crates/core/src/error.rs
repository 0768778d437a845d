use thiserror::Error;

/// Errors raised anywhere in the ensemble pipeline.
#[derive(Debug, Error)]
pub enum WsceError {
    #[error("input error at row {row}, column {column}: {message}")]
    Input {
        row: usize,
        column: String,
        message: String,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("[{stage}] {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<WsceError>,
    },
}

impl WsceError {
    /// Tag an error with the pipeline stage that produced it.
    pub fn at(self, stage: &'static str) -> Self {
        WsceError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

impl From<csv::Error> for WsceError {
    fn from(err: csv::Error) -> Self {
        let row = err
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        WsceError::Input {
            row,
            column: String::new(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, WsceError>;

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}

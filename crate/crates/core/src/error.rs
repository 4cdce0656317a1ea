use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid architecture, hyperparameters, cell parameters or config file.
    #[error("configuration error: {0}")]
    Config(String),

    /// Shape mismatches, empty inputs, non-finite inputs.
    #[error("input error: {0}")]
    Input(String),

    /// Non-finite gradients or accumulators during an optimizer step.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Dataset-level problems such as a degenerate feature.
    #[error("data error: {0}")]
    Data(String),

    /// One or more rows of a telemetry CSV were rejected.
    #[error("ingestion of {} failed:\n{}", path.display(), problems.join("\n"))]
    Ingest {
        path: PathBuf,
        problems: Vec<String>,
    },

    #[error("training diverged at epoch {epoch}, batch {batch}: {reason}")]
    Diverged {
        epoch: usize,
        batch: usize,
        reason: String,
    },

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    /// A saved model does not fit the data or is internally inconsistent.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Strips [`Error::Fold`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Fold { source, .. } => source.root(),
            other => other,
        }
    }
}

use std::path::PathBuf;

use reversal_core::Error as CoreError;

/// Errors surfaced by ingestion and analysis.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// `row` counts the header as row 1.
    #[error("row {row}, column {column:?}: {message}")]
    Parse { row: usize, column: String, message: String },
    #[error("{0} contains no data rows")]
    EmptyFile(PathBuf),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("column {0:?} is used in more than one role")]
    RepeatedColumn(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] CoreError),
}

impl AppError {
    /// 2 for problems with the input itself, 3 for data that is well formed but
    /// numerically degenerate.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Numeric(e) => match e {
                CoreError::RankDeficient { .. }
                | CoreError::ZeroVariance { .. }
                | CoreError::DegenerateBaseline
                | CoreError::EmptyCell { .. } => 3,
                CoreError::InvalidColumn { .. }
                | CoreError::DimensionMismatch { .. }
                | CoreError::DuplicateLabel(_)
                | CoreError::Domain { .. }
                | CoreError::SubsetCeilingExceeded { .. }
                | CoreError::InvalidStudy(_) => 2,
            },
            _ => 2,
        }
    }
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;

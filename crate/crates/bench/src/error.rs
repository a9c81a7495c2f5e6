use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Codec(#[from] compact_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}: not a PGM or DICOM image")]
    UnrecognizedInput(PathBuf),

    #[error("sizes must be positive (raw {raw}, compressed {compressed})")]
    ZeroSize { raw: usize, compressed: usize },

    #[error("no samples to measure")]
    EmptyInput,

    #[error("no readable inputs")]
    NoInputs,

    #[error("unknown codec {0:?}")]
    UnknownCodec(String),

    #[error("{file}: {codec} output does not reproduce the original samples")]
    LosslessFailure { file: String, codec: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl BenchError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }

    /// Short name for diagnostics; codec errors report the core variant.
    pub fn name(&self) -> &'static str {
        match self {
            BenchError::Codec(e) => e.name(),
            BenchError::Io { .. } => "Io",
            BenchError::UnrecognizedInput(_) => "UnrecognizedInput",
            BenchError::ZeroSize { .. } => "ZeroSize",
            BenchError::EmptyInput => "EmptyInput",
            BenchError::NoInputs => "NoInputs",
            BenchError::UnknownCodec(_) => "UnknownCodec",
            BenchError::LosslessFailure { .. } => "LosslessFailure",
            BenchError::Csv(_) => "Csv",
        }
    }

    /// Only a lossless-verification failure stops a corpus run.
    pub fn is_fatal(&self) -> bool {
        matches!(self, BenchError::LosslessFailure { .. })
    }
}

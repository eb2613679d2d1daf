//! Domain types and loaders for the interchange formats: the JSON episode
//! manifest, CSV/JSON trajectories and `EWMB` binary embedding tensors.

mod embedding;
mod manifest;
mod trajectory_io;
mod types;

use std::path::PathBuf;

pub use embedding::{load_embedding, write_embedding, EmbeddingKind, EmbeddingTensor, EWMB_MAGIC};
pub use manifest::{
    load_manifest, load_manifest_with, CandidateRecord, EpisodeRecord, LoadOptions, LogicVerdict,
    Manifest, MissingEvidence, TaskRecord, TrajectoryRef, Verdict, SCHEMA_VERSION,
};
pub use trajectory_io::{load_trajectory, parse_trajectory_csv, parse_trajectory_json, write_trajectory_csv};
pub use types::{Coords, Hand, Point2, Point3, Points, Trajectory, DEFAULT_FRAME_RATE};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("missing evidence for episode {episode_id}: {path}")]
    MissingEvidence { episode_id: String, path: PathBuf },
    #[error("trajectory has no points")]
    EmptyTrajectory,
    #[error("non-finite point at row {row}")]
    NonFinitePoint { row: usize },
    #[error("frame rate must be positive and finite, got {0}")]
    InvalidFrameRate(f64),
    #[error("bad magic bytes, expected EWMB")]
    BadMagic,
    #[error("unsupported tensor format version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown embedding kind code {0}")]
    UnknownKind(u8),
    #[error("invalid tensor shape {shape:?}: {reason}")]
    InvalidShape { shape: Vec<usize>, reason: String },
    #[error("tensor file truncated: expected {expected} bytes, found {found}")]
    TruncatedFile { expected: usize, found: usize },
    #[error("tensor file has {0} trailing bytes after the payload")]
    TrailingData(usize),
    #[error("non-finite tensor value at flat index {index}")]
    NonFiniteValue { index: usize },
}

impl DataError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        DataError::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

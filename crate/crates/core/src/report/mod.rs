//! Aggregation into the per-model result table, score normalisation, the
//! perturbation study and rank correlation against human rankings.

mod aggregate;
mod normalize;
mod perturb;
mod rank;
mod render;

pub use aggregate::{aggregate, EpisodeScores, GroupDiversity, MetricReport, MissingPolicy, ModelRow};
pub use normalize::{normalize_scores, NormPolicy, Normalized};
pub use perturb::{
    perturb, perturb_seeded, perturbation_study, Perturbation, SignatureCheck, StudyConfig, StudyRow, StudyTable,
};
pub use rank::{average_ranks, kendall_tau_b, rank_correlation, scores_from_order, spearman, HumanRanking, RankCorrelation};
pub use render::{report_csv, report_json, report_markdown, study_csv, study_svg};

use crate::data::DataError;
use crate::motion::MotionError;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("model {model} has no {metric} evidence")]
    MissingDimension { model: String, metric: String },
    #[error("non-finite score: {0}")]
    NonFinite(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("trajectory of length {0} is too short to perturb (need 3)")]
    TooShort(usize),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("model sets differ: {0}")]
    ModelSetMismatch(String),
    #[error("invalid ranking: {0}")]
    InvalidRanking(String),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Data(#[from] DataError),
}

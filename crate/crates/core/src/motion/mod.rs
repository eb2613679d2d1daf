//! Trajectory motion metrics: symmetric Hausdorff consistency, normalised
//! DTW consistency and dynamic consistency, plus primary-hand and
//! best-of-N candidate selection.

mod dtw;
mod dynamics;
mod hand;
mod hausdorff;

use serde::{Deserialize, Serialize};

use crate::data::Trajectory;

pub use dtw::{dtw_by, dtw_cost, dtw_points, dtw_scalar, ndtw, ndtw_score, DtwAlignment, NdtwNormalization};
pub use dynamics::{
    amplitude_ratio, dyn_score, dynamics_profile, wasserstein_1d, DynConfig, DynMode, DynTerms, DynamicsProfile,
};
pub use hand::{convex_hull, primary_hand, spatial_extent};
pub use hausdorff::{hausdorff_points, hsd_score, symmetric_hausdorff};

#[derive(Debug, thiserror::Error)]
pub enum MotionError {
    #[error("trajectory has no points")]
    EmptyTrajectory,
    #[error("dimension mismatch: {left}-D vs {right}-D")]
    DimensionMismatch { left: usize, right: usize },
    #[error("trajectory of length {len} is too short (need {needed})")]
    TooShort { len: usize, needed: usize },
    #[error("sample set is empty")]
    EmptySamples,
    #[error("both hand trajectories are empty")]
    BothEmpty,
    #[error("no candidates to select from")]
    EmptyCandidateList,
    #[error("invalid motion config: {0}")]
    InvalidConfig(String),
}

/// Everything the three motion scores depend on.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MotionConfig {
    pub dyn_cfg: DynConfig,
    pub dyn_mode: DynMode,
    pub ndtw_norm: NdtwNormalization,
}

impl MotionConfig {
    /// Stabiliser shared by all reciprocal scores.
    pub fn epsilon(&self) -> f64 {
        self.dyn_cfg.epsilon
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionScores {
    pub hsd: f64,
    pub ndtw: f64,
    #[serde(rename = "dyn")]
    pub dyn_: f64,
    pub raw_hausdorff: f64,
    pub raw_ndtw_cost: f64,
}

/// All three motion scores of `pred` against `gt`.
pub fn motion_scores(gt: &Trajectory, pred: &Trajectory, cfg: &MotionConfig) -> Result<MotionScores, MotionError> {
    let eps = cfg.epsilon();
    let raw_hausdorff = symmetric_hausdorff(gt, pred)?;
    let raw_ndtw_cost = ndtw(gt, pred, cfg.ndtw_norm)?;
    let dyn_ = dyn_score(&dynamics_profile(gt)?, &dynamics_profile(pred)?, &cfg.dyn_cfg, cfg.dyn_mode)?;
    Ok(MotionScores {
        hsd: hsd_score(raw_hausdorff, eps),
        ndtw: 1.0 / (raw_ndtw_cost + eps),
        dyn_,
        raw_hausdorff,
        raw_ndtw_cost,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub scores: MotionScores,
}

/// Index of the candidate with the smallest Hausdorff distance to `gt`
/// (lowest index on ties) and its full scores.
pub fn best_of_n(gt: &Trajectory, candidates: &[Trajectory], cfg: &MotionConfig) -> Result<Selection, MotionError> {
    let index = select_by_hausdorff(gt, candidates.iter())?;
    let scores = motion_scores(gt, &candidates[index], cfg)?;
    Ok(Selection { index, scores })
}

/// Argmin of the Hausdorff distance over `candidates`.
pub fn select_by_hausdorff<'a>(
    gt: &Trajectory,
    candidates: impl IntoIterator<Item = &'a Trajectory>,
) -> Result<usize, MotionError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.into_iter().enumerate() {
        let d = symmetric_hausdorff(gt, c)?;
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i).ok_or(MotionError::EmptyCandidateList)
}

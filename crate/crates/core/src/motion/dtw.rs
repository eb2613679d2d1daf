use serde::{Deserialize, Serialize};

use crate::data::{Coords, Points, Trajectory};

use super::MotionError;

/// Optimal warping cost together with the number of cells on the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtwAlignment {
    pub cost: f64,
    pub path_len: usize,
}

/// Normaliser applied to the raw warping cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NdtwNormalization {
    /// cost / number of aligned pairs on the optimal path
    #[default]
    PathLength,
    /// cost / (|G| + |P|)
    SumOfLengths,
}

/// Classic boundary-to-boundary DTW over an `n × m` grid with steps
/// (1,0), (0,1), (1,1). Among equal-cost paths the shorter one wins.
pub fn dtw_by(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> DtwAlignment {
    assert!(n > 0 && m > 0, "dtw_by needs non-empty sequences");
    // one row of (accumulated cost, path length)
    let mut prev: Vec<(f64, usize)> = vec![(f64::INFINITY, 0); m];
    let mut cur: Vec<(f64, usize)> = vec![(f64::INFINITY, 0); m];
    for i in 0..n {
        for j in 0..m {
            let best = if i == 0 && j == 0 {
                (0.0, 0)
            } else {
                let mut best = (f64::INFINITY, usize::MAX);
                let mut offer = |c: (f64, usize)| {
                    if c.0 < best.0 || (c.0 == best.0 && c.1 < best.1) {
                        best = c;
                    }
                };
                if i > 0 && j > 0 {
                    offer(prev[j - 1]);
                }
                if i > 0 {
                    offer(prev[j]);
                }
                if j > 0 {
                    offer(cur[j - 1]);
                }
                best
            };
            cur[j] = (best.0 + cost(i, j), best.1 + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let (cost, path_len) = prev[m - 1];
    DtwAlignment { cost, path_len }
}

pub fn dtw_points<P: Coords>(a: &[P], b: &[P]) -> Result<DtwAlignment, MotionError> {
    if a.is_empty() || b.is_empty() {
        return Err(MotionError::EmptyTrajectory);
    }
    Ok(dtw_by(a.len(), b.len(), |i, j| a[i].distance(&b[j])))
}

/// DTW over scalar sequences with `|a - b|` as the local cost.
pub fn dtw_scalar(a: &[f64], b: &[f64]) -> Result<DtwAlignment, MotionError> {
    if a.is_empty() || b.is_empty() {
        return Err(MotionError::EmptyTrajectory);
    }
    Ok(dtw_by(a.len(), b.len(), |i, j| (a[i] - b[j]).abs()))
}

/// Euclidean-cost DTW between two trajectories.
pub fn dtw_cost(g: &Trajectory, p: &Trajectory) -> Result<DtwAlignment, MotionError> {
    match (g.points(), p.points()) {
        (Points::Planar(a), Points::Planar(b)) => dtw_points(a, b),
        (Points::Spatial(a), Points::Spatial(b)) => dtw_points(a, b),
        _ => Err(MotionError::DimensionMismatch {
            left: g.dim(),
            right: p.dim(),
        }),
    }
}

/// Normalised DTW distance.
pub fn ndtw(g: &Trajectory, p: &Trajectory, norm: NdtwNormalization) -> Result<f64, MotionError> {
    let a = dtw_cost(g, p)?;
    let denom = match norm {
        NdtwNormalization::PathLength => a.path_len,
        NdtwNormalization::SumOfLengths => g.len() + p.len(),
    };
    Ok(a.cost / denom as f64)
}

/// `1 / (nDTW + eps)`.
pub fn ndtw_score(
    g: &Trajectory,
    p: &Trajectory,
    norm: NdtwNormalization,
    eps: f64,
) -> Result<f64, MotionError> {
    Ok(1.0 / (ndtw(g, p, norm)? + eps))
}

use serde::{Deserialize, Serialize};

use crate::data::{Coords, Points, Trajectory};

use super::MotionError;

/// Weights of the velocity and acceleration terms of the dynamic
/// consistency score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynConfig {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
}

impl Default for DynConfig {
    fn default() -> Self {
        Self {
            alpha: 0.007,
            beta: 0.003,
            epsilon: 1e-8,
        }
    }
}

impl DynConfig {
    pub fn validate(&self) -> Result<(), MotionError> {
        let ok = self.alpha.is_finite()
            && self.beta.is_finite()
            && self.alpha >= 0.0
            && self.beta >= 0.0
            && self.epsilon.is_finite()
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(MotionError::InvalidConfig(format!(
                "alpha={} beta={} epsilon={} (need alpha, beta >= 0 and epsilon > 0)",
                self.alpha, self.beta, self.epsilon
            )))
        }
    }
}

/// Which series the Wasserstein terms compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynMode {
    /// speed and acceleration magnitudes
    #[default]
    Magnitude,
    /// signed per-axis components, one score per axis, averaged
    PerAxis,
}

/// Finite-difference velocity and acceleration of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsProfile {
    /// `|v_i|`, length `n - 1`
    pub speeds: Vec<f64>,
    /// `|a_i|`, length `n - 2`
    pub accel_mags: Vec<f64>,
    /// per axis: signed velocity components, length `n - 1`
    pub velocity_axes: Vec<Vec<f64>>,
    /// per axis: signed acceleration components, length `n - 2`
    pub accel_axes: Vec<Vec<f64>>,
}

fn profile_of<P: Coords>(points: &[P], rate: f64) -> DynamicsProfile {
    let dim = P::DIM;
    let vel: Vec<Vec<f64>> = points
        .windows(2)
        .map(|w| (0..dim).map(|a| (w[1].coord(a) - w[0].coord(a)) * rate).collect())
        .collect();
    let acc: Vec<Vec<f64>> = vel
        .windows(2)
        .map(|w| (0..dim).map(|a| (w[1][a] - w[0][a]) * rate).collect())
        .collect();
    let norm = |v: &Vec<f64>| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    DynamicsProfile {
        speeds: vel.iter().map(norm).collect(),
        accel_mags: acc.iter().map(norm).collect(),
        velocity_axes: (0..dim).map(|a| vel.iter().map(|v| v[a]).collect()).collect(),
        accel_axes: (0..dim).map(|a| acc.iter().map(|v| v[a]).collect()).collect(),
    }
}

/// Velocity `v_i = (p_{i+1} - p_i) · rate` and acceleration
/// `a_i = (v_{i+1} - v_i) · rate`. Needs at least three points.
pub fn dynamics_profile(t: &Trajectory) -> Result<DynamicsProfile, MotionError> {
    if t.len() < 3 {
        return Err(MotionError::TooShort {
            len: t.len(),
            needed: 3,
        });
    }
    Ok(match t.points() {
        Points::Planar(p) => profile_of(p, t.frame_rate()),
        Points::Spatial(p) => profile_of(p, t.frame_rate()),
    })
}

/// First Wasserstein distance between two empirical distributions with
/// uniform weights: the integral of `|F_u(x) - F_w(x)|` over the merged
/// support, which equals the quantile-function integral.
pub fn wasserstein_1d(u: &[f64], w: &[f64]) -> Result<f64, MotionError> {
    if u.is_empty() || w.is_empty() {
        return Err(MotionError::EmptySamples);
    }
    let mut a = u.to_vec();
    let mut b = w.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut total = 0.0;
    let mut x = a[0].min(b[0]);
    while i < a.len() || j < b.len() {
        // advance past every sample equal to the current breakpoint
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        let next = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => break,
        };
        let cdf_gap = (i as f64 / na - j as f64 / nb).abs();
        total += cdf_gap * (next - x);
        x = next;
    }
    Ok(total)
}

/// IoU-style ratio of the two value ranges: `(min + eps) / (max + eps)`.
pub fn amplitude_ratio(gt: &[f64], pred: &[f64], eps: f64) -> Result<f64, MotionError> {
    let range = |s: &[f64]| -> Option<f64> {
        let lo = s.iter().copied().reduce(f64::min)?;
        let hi = s.iter().copied().reduce(f64::max)?;
        Some(hi - lo)
    };
    let (rg, rp) = match (range(gt), range(pred)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(MotionError::EmptySamples),
    };
    Ok((rg.min(rp) + eps) / (rg.max(rp) + eps))
}

/// Terms of one dynamic consistency evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynTerms {
    pub velocity_ratio: f64,
    pub velocity_distance: f64,
    pub accel_ratio: f64,
    pub accel_distance: f64,
}

impl DynTerms {
    pub fn compute(gt_v: &[f64], pred_v: &[f64], gt_a: &[f64], pred_a: &[f64], eps: f64) -> Result<Self, MotionError> {
        Ok(Self {
            velocity_ratio: amplitude_ratio(gt_v, pred_v, eps)?,
            velocity_distance: wasserstein_1d(gt_v, pred_v)?,
            accel_ratio: amplitude_ratio(gt_a, pred_a, eps)?,
            accel_distance: wasserstein_1d(gt_a, pred_a)?,
        })
    }

    /// `α·VR/(W(v)+ε) + β·AR/(W(a)+ε)`
    pub fn score(&self, cfg: &DynConfig) -> f64 {
        cfg.alpha * self.velocity_ratio / (self.velocity_distance + cfg.epsilon)
            + cfg.beta * self.accel_ratio / (self.accel_distance + cfg.epsilon)
    }
}

/// Dynamic consistency between a ground-truth and a predicted profile.
pub fn dyn_score(
    gt: &DynamicsProfile,
    pred: &DynamicsProfile,
    cfg: &DynConfig,
    mode: DynMode,
) -> Result<f64, MotionError> {
    match mode {
        DynMode::Magnitude => {
            let terms = DynTerms::compute(&gt.speeds, &pred.speeds, &gt.accel_mags, &pred.accel_mags, cfg.epsilon)?;
            Ok(terms.score(cfg))
        }
        DynMode::PerAxis => {
            let axes = gt.velocity_axes.len();
            if axes != pred.velocity_axes.len() {
                return Err(MotionError::DimensionMismatch {
                    left: axes,
                    right: pred.velocity_axes.len(),
                });
            }
            let mut sum = 0.0;
            for a in 0..axes {
                let terms = DynTerms::compute(
                    &gt.velocity_axes[a],
                    &pred.velocity_axes[a],
                    &gt.accel_axes[a],
                    &pred.accel_axes[a],
                    cfg.epsilon,
                )?;
                sum += terms.score(cfg);
            }
            Ok(sum / axes as f64)
        }
    }
}

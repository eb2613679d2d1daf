//! Controlled trajectory perturbations and the metric-response study built
//! on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Coords, Point2, Point3, Points, Trajectory};
use crate::motion::{motion_scores, symmetric_hausdorff, MotionConfig};

use super::ReportError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Perturbation {
    /// exact order reversal
    Reverse,
    /// `count` points at `scale` × bounding-box diagonal from the centroid,
    /// inserted at random indices
    Outlier { count: usize, scale: f64 },
    /// every point repeated `times` times in place
    Repeat { times: usize },
}

impl Perturbation {
    pub fn name(&self) -> String {
        match self {
            Perturbation::Reverse => "reverse".into(),
            Perturbation::Outlier { count, scale } => format!("outlier(count={count},scale={scale})"),
            Perturbation::Repeat { times } => format!("repeat(x{times})"),
        }
    }
}

fn centroid_and_diagonal<P: Coords>(pts: &[P]) -> (Vec<f64>, f64) {
    let dim = P::DIM;
    let mut c = vec![0.0; dim];
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in pts {
        for a in 0..dim {
            let v = p.coord(a);
            c[a] += v;
            lo[a] = lo[a].min(v);
            hi[a] = hi[a].max(v);
        }
    }
    c.iter_mut().for_each(|v| *v /= pts.len() as f64);
    let diag = lo.iter().zip(&hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt();
    (c, diag)
}

/// Uniform random direction of unit length. Gaussian components are drawn
/// by Box-Muller so only uniform draws touch the generator.
fn direction(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                let u1: f64 = 1.0 - rng.random::<f64>();
                let u2: f64 = rng.random::<f64>();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn insert_outliers<P: Coords>(
    pts: &[P],
    count: usize,
    scale: f64,
    rng: &mut impl Rng,
    make: impl Fn(&[f64]) -> P,
) -> Vec<P> {
    let (c, diag) = centroid_and_diagonal(pts);
    let mut out = pts.to_vec();
    for _ in 0..count {
        let d = direction(rng, P::DIM);
        let coords: Vec<f64> = c.iter().zip(&d).map(|(ci, di)| ci + scale * diag * di).collect();
        let at = rng.random_range(0..=out.len());
        out.insert(at, make(&coords));
    }
    out
}

/// Applies one perturbation. Randomness (outlier placement) comes from `rng`.
pub fn perturb(t: &Trajectory, kind: &Perturbation, rng: &mut impl Rng) -> Result<Trajectory, ReportError> {
    if t.len() < 3 {
        return Err(ReportError::TooShort(t.len()));
    }
    let points = match *kind {
        Perturbation::Reverse => return Ok(t.reversed()),
        Perturbation::Repeat { times } => {
            if times == 0 {
                return Err(ReportError::InvalidConfig("repeat times must be >= 1".into()));
            }
            match t.points() {
                Points::Planar(p) => Points::Planar(p.iter().flat_map(|&q| std::iter::repeat_n(q, times)).collect()),
                Points::Spatial(p) => Points::Spatial(p.iter().flat_map(|&q| std::iter::repeat_n(q, times)).collect()),
            }
        }
        Perturbation::Outlier { count, scale } => {
            if !(scale.is_finite() && scale >= 0.0) {
                return Err(ReportError::InvalidConfig(format!("outlier scale must be >= 0, got {scale}")));
            }
            match t.points() {
                Points::Planar(p) => Points::Planar(insert_outliers(p, count, scale, rng, |c| Point2::new(c[0], c[1]))),
                Points::Spatial(p) => {
                    Points::Spatial(insert_outliers(p, count, scale, rng, |c| Point3::new(c[0], c[1], c[2])))
                }
            }
        }
    };
    Ok(t.with_points(points)?)
}

/// Seeded convenience wrapper around [`perturb`].
pub fn perturb_seeded(t: &Trajectory, kind: &Perturbation, seed: u64) -> Result<Trajectory, ReportError> {
    perturb(t, kind, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub motion: MotionConfig,
    pub perturbations: Vec<Perturbation>,
    /// Gaussian noise (fraction of the bounding-box diagonal) added to each
    /// ground truth to form the unperturbed prediction. 0 compares the
    /// ground truth with perturbed copies of itself.
    pub baseline_jitter: f64,
    pub seed: u64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            motion: MotionConfig::default(),
            perturbations: vec![
                Perturbation::Reverse,
                Perturbation::Outlier { count: 2, scale: 3.0 },
                Perturbation::Repeat { times: 2 },
            ],
            baseline_jitter: 0.01,
            seed: 0,
        }
    }
}

/// Mean response of each metric to one perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub perturbation: Perturbation,
    pub name: String,
    /// mean over trajectories of `(after - before) / before`
    pub hsd_change: f64,
    pub ndtw_change: f64,
    pub dyn_change: f64,
    /// largest `|after - before|` of the raw Hausdorff distance
    pub max_abs_hausdorff_delta: f64,
    pub mean_hsd_before: f64,
    pub mean_hsd_after: f64,
    pub mean_ndtw_before: f64,
    pub mean_ndtw_after: f64,
    pub mean_dyn_before: f64,
    pub mean_dyn_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyTable {
    pub trajectories: usize,
    pub rows: Vec<StudyRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignatureCheck {
    pub claim: &'static str,
    pub holds: bool,
}

impl StudyTable {
    pub fn row(&self, pred: impl Fn(&Perturbation) -> bool) -> Option<&StudyRow> {
        self.rows.iter().find(|r| pred(&r.perturbation))
    }

    /// Direction checks: reversal only hurts nDTW, outliers hurt HSD and
    /// Dyn, repetition hurts Dyn but not nDTW.
    pub fn signature(&self) -> Vec<SignatureCheck> {
        let mut out = Vec::new();
        if let Some(r) = self.row(|p| matches!(p, Perturbation::Reverse)) {
            out.push(SignatureCheck {
                claim: "reverse: raw Hausdorff unchanged",
                holds: r.max_abs_hausdorff_delta == 0.0,
            });
            out.push(SignatureCheck {
                claim: "reverse: nDTW drops",
                holds: r.ndtw_change < 0.0,
            });
        }
        if let Some(r) = self.row(|p| matches!(p, Perturbation::Outlier { .. })) {
            out.push(SignatureCheck {
                claim: "outlier: HSD drops",
                holds: r.hsd_change < 0.0,
            });
            out.push(SignatureCheck {
                claim: "outlier: Dyn drops",
                holds: r.dyn_change < 0.0,
            });
        }
        if let Some(r) = self.row(|p| matches!(p, Perturbation::Repeat { .. })) {
            out.push(SignatureCheck {
                claim: "repeat: Dyn drops",
                holds: r.dyn_change < 0.0,
            });
            out.push(SignatureCheck {
                claim: "repeat: nDTW does not drop",
                holds: r.ndtw_change >= 0.0,
            });
        }
        out
    }
}

fn jittered(t: &Trajectory, sigma_frac: f64, rng: &mut impl Rng) -> Result<Trajectory, ReportError> {
    if sigma_frac == 0.0 {
        return Ok(t.clone());
    }
    let rows = t.rows();
    let dim = t.dim();
    let diag = (0..dim)
        .map(|a| {
            let lo = rows.iter().map(|r| r[a]).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r[a]).fold(f64::NEG_INFINITY, f64::max);
            (hi - lo) * (hi - lo)
        })
        .sum::<f64>()
        .sqrt();
    let sigma = sigma_frac * diag;
    let mut noise = || {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random::<f64>();
        sigma * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let points = match t.points() {
        Points::Planar(p) => Points::Planar(p.iter().map(|q| Point2::new(q.x + noise(), q.y + noise())).collect()),
        Points::Spatial(p) => Points::Spatial(
            p.iter()
                .map(|q| Point3::new(q.x + noise(), q.y + noise(), q.z + noise()))
                .collect(),
        ),
    };
    Ok(t.with_points(points)?)
}

/// Scores each ground truth against a baseline prediction and against each
/// perturbed version of that prediction, then averages the relative change.
pub fn perturbation_study(gts: &[Trajectory], cfg: &StudyConfig) -> Result<StudyTable, ReportError> {
    if gts.len() < 10 {
        return Err(ReportError::InsufficientData(format!(
            "perturbation study needs at least 10 trajectories, got {}",
            gts.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut baselines = Vec::with_capacity(gts.len());
    for g in gts {
        if g.len() < 3 {
            return Err(ReportError::TooShort(g.len()));
        }
        if g.reversed().points() == g.points() {
            return Err(ReportError::InsufficientData("palindromic trajectory in study set".into()));
        }
        let pred = jittered(g, cfg.baseline_jitter, &mut rng)?;
        let before = motion_scores(g, &pred, &cfg.motion)?;
        baselines.push((pred, before));
    }
    let n = gts.len() as f64;
    let mut rows = Vec::with_capacity(cfg.perturbations.len());
    for kind in &cfg.perturbations {
        let mut acc = [0.0f64; 9];
        let mut max_delta = 0.0f64;
        for (g, (pred, before)) in gts.iter().zip(&baselines) {
            let perturbed = perturb(pred, kind, &mut rng)?;
            let after = motion_scores(g, &perturbed, &cfg.motion)?;
            let raw_h = symmetric_hausdorff(g, &perturbed)?;
            max_delta = max_delta.max((raw_h - before.raw_hausdorff).abs());
            let rel = |a: f64, b: f64| (a - b) / b;
            acc[0] += rel(after.hsd, before.hsd);
            acc[1] += rel(after.ndtw, before.ndtw);
            acc[2] += rel(after.dyn_, before.dyn_);
            acc[3] += before.hsd;
            acc[4] += after.hsd;
            acc[5] += before.ndtw;
            acc[6] += after.ndtw;
            acc[7] += before.dyn_;
            acc[8] += after.dyn_;
        }
        let m = acc.map(|v| v / n);
        rows.push(StudyRow {
            perturbation: *kind,
            name: kind.name(),
            hsd_change: m[0],
            ndtw_change: m[1],
            dyn_change: m[2],
            max_abs_hausdorff_delta: max_delta,
            mean_hsd_before: m[3],
            mean_hsd_after: m[4],
            mean_ndtw_before: m[5],
            mean_ndtw_after: m[6],
            mean_dyn_before: m[7],
            mean_dyn_after: m[8],
        });
    }
    Ok(StudyTable {
        trajectories: gts.len(),
        rows,
    })
}

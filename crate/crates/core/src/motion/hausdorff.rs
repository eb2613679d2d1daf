use crate::data::{Coords, Points, Trajectory};

use super::MotionError;

/// Directed Hausdorff distance, squared. Uses the early-break scan: once a
/// point of `b` is closer to `x` than the running maximum, `x` cannot raise
/// the maximum and the inner loop stops. The result is exact.
fn directed_squared<P: Coords>(a: &[P], b: &[P]) -> f64 {
    let mut cmax = 0.0_f64;
    for x in a {
        let mut cmin = f64::INFINITY;
        for y in b {
            let d = x.squared_distance(y);
            if d < cmax {
                cmin = d;
                break;
            }
            if d < cmin {
                cmin = d;
            }
        }
        if cmin > cmax {
            cmax = cmin;
        }
    }
    cmax
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff_points<P: Coords>(a: &[P], b: &[P]) -> Result<f64, MotionError> {
    if a.is_empty() || b.is_empty() {
        return Err(MotionError::EmptyTrajectory);
    }
    // sqrt is monotone, so taking it once at the end is exact.
    Ok(directed_squared(a, b).max(directed_squared(b, a)).sqrt())
}

/// Largest nearest-neighbour deviation between `g` and `p`, in the
/// trajectories' coordinate units. Ignores point order.
pub fn symmetric_hausdorff(g: &Trajectory, p: &Trajectory) -> Result<f64, MotionError> {
    match (g.points(), p.points()) {
        (Points::Planar(a), Points::Planar(b)) => hausdorff_points(a, b),
        (Points::Spatial(a), Points::Spatial(b)) => hausdorff_points(a, b),
        _ => Err(MotionError::DimensionMismatch {
            left: g.dim(),
            right: p.dim(),
        }),
    }
}

/// Reciprocal score `1 / (d + eps)`.
pub fn hsd_score(distance: f64, eps: f64) -> f64 {
    1.0 / (distance + eps)
}

use crate::data::{Coords, Point2, Points, Trajectory};

use super::MotionError;

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex hull by Andrew's monotone chain, counter-clockwise, collinear
/// points dropped. Degenerate inputs return one or two vertices.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

fn diameter<P: Coords>(points: &[P]) -> f64 {
    let mut best = 0.0_f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max(a.squared_distance(b));
        }
    }
    best.sqrt()
}

/// Spatial extent of a trajectory: the largest distance between two of its
/// points. Planar tracks go through their convex hull first; spatial tracks
/// are scanned directly.
pub fn spatial_extent(t: &Trajectory) -> f64 {
    match t.points() {
        Points::Planar(p) => diameter(&convex_hull(p)),
        Points::Spatial(p) => diameter(p),
    }
}

/// Picks the hand whose track covers more space. A missing hand yields the
/// other; ties go to the left hand.
pub fn primary_hand<'a>(
    left: Option<&'a Trajectory>,
    right: Option<&'a Trajectory>,
) -> Result<&'a Trajectory, MotionError> {
    match (left, right) {
        (None, None) => Err(MotionError::BothEmpty),
        (Some(l), None) => Ok(l),
        (None, Some(r)) => Ok(r),
        (Some(l), Some(r)) => Ok(if spatial_extent(r) > spatial_extent(l) { r } else { l }),
    }
}

use serde::{Deserialize, Serialize};

use super::DataError;

/// Frame rate assumed when a trajectory carries no timestamps.
pub const DEFAULT_FRAME_RATE: f64 = 30.0;

/// A detected end-effector position in image coordinates (pixels).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// An end-effector position in workspace coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Coordinate access shared by planar and spatial points so the metrics
/// can be written once.
pub trait Coords: Copy {
    const DIM: usize;

    fn coord(&self, axis: usize) -> f64;

    fn is_finite(&self) -> bool {
        (0..Self::DIM).all(|a| self.coord(a).is_finite())
    }

    fn squared_distance(&self, other: &Self) -> f64 {
        (0..Self::DIM)
            .map(|a| {
                let d = self.coord(a) - other.coord(a);
                d * d
            })
            .sum()
    }

    fn distance(&self, other: &Self) -> f64 {
        self.squared_distance(other).sqrt()
    }
}

impl Coords for Point2 {
    const DIM: usize = 2;

    #[inline]
    fn coord(&self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            _ => self.y,
        }
    }

    #[inline]
    fn squared_distance(&self, other: &Self) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl Coords for Point3 {
    const DIM: usize = 3;

    #[inline]
    fn coord(&self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    #[inline]
    fn squared_distance(&self, other: &Self) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hand {
    Left,
    Right,
    #[default]
    Unknown,
}

/// Point storage of a trajectory. Both variants are ordered in time.
#[derive(Debug, Clone, PartialEq)]
pub enum Points {
    Planar(Vec<Point2>),
    Spatial(Vec<Point3>),
}

impl Points {
    pub fn len(&self) -> usize {
        match self {
            Points::Planar(p) => p.len(),
            Points::Spatial(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Points::Planar(_) => 2,
            Points::Spatial(_) => 3,
        }
    }
}

/// A timestamped end-effector track. Construction validates the
/// invariants, so every `Trajectory` in circulation is non-empty, finite
/// and has a positive frame rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    points: Points,
    frame_rate: f64,
    hand: Hand,
}

impl Trajectory {
    pub fn new(points: Points, frame_rate: f64) -> Result<Self, DataError> {
        if points.is_empty() {
            return Err(DataError::EmptyTrajectory);
        }
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(DataError::InvalidFrameRate(frame_rate));
        }
        let bad = match &points {
            Points::Planar(p) => p.iter().position(|q| !q.is_finite()),
            Points::Spatial(p) => p.iter().position(|q| !q.is_finite()),
        };
        if let Some(row) = bad {
            return Err(DataError::NonFinitePoint { row });
        }
        Ok(Self {
            points,
            frame_rate,
            hand: Hand::Unknown,
        })
    }

    pub fn planar(points: Vec<Point2>, frame_rate: f64) -> Result<Self, DataError> {
        Self::new(Points::Planar(points), frame_rate)
    }

    pub fn spatial(points: Vec<Point3>, frame_rate: f64) -> Result<Self, DataError> {
        Self::new(Points::Spatial(points), frame_rate)
    }

    /// Planar trajectory at the default frame rate from `(x, y)` pairs.
    pub fn from_xy(xy: &[(f64, f64)]) -> Result<Self, DataError> {
        Self::planar(
            xy.iter().map(|&(x, y)| Point2::new(x, y)).collect(),
            DEFAULT_FRAME_RATE,
        )
    }

    pub fn with_hand(mut self, hand: Hand) -> Self {
        self.hand = hand;
        self
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false for a constructed trajectory; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn hand(&self) -> Hand {
        self.hand
    }

    /// Returns a copy with the point order reversed.
    pub fn reversed(&self) -> Self {
        let points = match &self.points {
            Points::Planar(p) => Points::Planar(p.iter().rev().copied().collect()),
            Points::Spatial(p) => Points::Spatial(p.iter().rev().copied().collect()),
        };
        Self {
            points,
            frame_rate: self.frame_rate,
            hand: self.hand,
        }
    }

    pub(crate) fn with_points(&self, points: Points) -> Result<Self, DataError> {
        Ok(Self::new(points, self.frame_rate)?.with_hand(self.hand))
    }

    /// Flat coordinate rows, one `Vec` of length `dim` per point.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        match &self.points {
            Points::Planar(p) => p.iter().map(|q| vec![q.x, q.y]).collect(),
            Points::Spatial(p) => p.iter().map(|q| vec![q.x, q.y, q.z]).collect(),
        }
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{Point3, Points, Trajectory};

use super::DiversityError;

/// Default voxel edge length in meters.
pub const DEFAULT_VOXEL_SIZE: f64 = 0.05;

/// How visits to a cell are recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Occupancy {
    /// a cell is 1 iff any point falls inside it
    #[default]
    Binary,
    /// a cell holds the number of points inside it
    Counts,
}

/// Axis-aligned box in workspace coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Point3,
    pub max: Point3,
}

impl Bounds {
    pub fn translated(&self, by: Point3) -> Self {
        Self {
            min: Point3::new(self.min.x + by.x, self.min.y + by.y, self.min.z + by.z),
            max: Point3::new(self.max.x + by.x, self.max.y + by.y, self.max.z + by.z),
        }
    }
}

/// Placement of a grid in space. Grids in the same frame are comparable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridFrame {
    pub origin: Point3,
    pub voxel_size: f64,
    pub dims: [usize; 3],
    /// explicit bounds reject points outside them; auto frames cannot
    /// contain outside points by construction
    explicit: bool,
    /// lattice cell of `origin` for auto frames
    base: Option<[i64; 3]>,
}

fn check_size(voxel_size: f64) -> Result<(), DiversityError> {
    if voxel_size.is_finite() && voxel_size > 0.0 {
        Ok(())
    } else {
        Err(DiversityError::NonPositiveVoxelSize(voxel_size))
    }
}

fn spatial(t: &Trajectory) -> Result<&[Point3], DiversityError> {
    match t.points() {
        Points::Spatial(p) => Ok(p),
        Points::Planar(_) => Err(DiversityError::NotSpatial),
    }
}

fn lattice(v: f64, voxel_size: f64) -> i64 {
    (v / voxel_size).floor() as i64
}

impl GridFrame {
    /// Frame spanning explicit bounds with `origin = bounds.min`.
    pub fn from_bounds(bounds: Bounds, voxel_size: f64) -> Result<Self, DiversityError> {
        check_size(voxel_size)?;
        let extent = |lo: f64, hi: f64| (((hi - lo) / voxel_size).ceil() as usize).max(1);
        Ok(Self {
            origin: bounds.min,
            voxel_size,
            dims: [
                extent(bounds.min.x, bounds.max.x),
                extent(bounds.min.y, bounds.max.y),
                extent(bounds.min.z, bounds.max.z),
            ],
            explicit: true,
            base: None,
        })
    }

    /// Union bounding box of every trajectory on the voxel lattice, padded
    /// by one voxel.
    pub fn enclosing<'a>(
        trajectories: impl IntoIterator<Item = &'a Trajectory>,
        voxel_size: f64,
    ) -> Result<Self, DiversityError> {
        check_size(voxel_size)?;
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for t in trajectories {
            for p in spatial(t)? {
                for (a, v) in [p.x, p.y, p.z].into_iter().enumerate() {
                    lo[a] = lo[a].min(v);
                    hi[a] = hi[a].max(v);
                }
            }
        }
        if lo[0] > hi[0] {
            return Err(DiversityError::NoPoints);
        }
        // cells sit on the global lattice `floor(p / size)`, padded by one
        // cell on each side, so two nearby points share a cell regardless of
        // where the bounding box happens to start
        let base = [0, 1, 2].map(|a| lattice(lo[a], voxel_size) - 1);
        let dims = [0, 1, 2].map(|a| (lattice(hi[a], voxel_size) - base[a] + 2) as usize);
        let origin = Point3::new(
            base[0] as f64 * voxel_size,
            base[1] as f64 * voxel_size,
            base[2] as f64 * voxel_size,
        );
        Ok(Self {
            origin,
            voxel_size,
            dims,
            explicit: false,
            base: Some(base),
        })
    }

    pub fn cell_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Linear cell index of a point.
    pub fn index_of(&self, p: &Point3) -> Result<usize, DiversityError> {
        let c = [p.x, p.y, p.z];
        let o = [self.origin.x, self.origin.y, self.origin.z];
        let mut idx = [0usize; 3];
        for a in 0..3 {
            let cell = match self.base {
                Some(base) => lattice(c[a], self.voxel_size) - base[a],
                None => {
                    let rel = c[a] - o[a];
                    if self.explicit && (rel < 0.0 || rel > self.voxel_size * self.dims[a] as f64) {
                        return Err(DiversityError::PointOutOfBounds { x: p.x, y: p.y, z: p.z });
                    }
                    (rel / self.voxel_size).floor() as i64
                }
            };
            // the upper face of an explicit box belongs to the last cell
            idx[a] = (cell.max(0) as usize).min(self.dims[a] - 1);
        }
        Ok(idx[0] + self.dims[0] * (idx[1] + self.dims[1] * idx[2]))
    }

    pub fn grid(&self, t: Option<&Trajectory>, occupancy: Occupancy) -> Result<VoxelGrid, DiversityError> {
        let mut cells = BTreeMap::new();
        if let Some(t) = t {
            for p in spatial(t)? {
                let c = cells.entry(self.index_of(p)?).or_insert(0u32);
                *c = match occupancy {
                    Occupancy::Binary => 1,
                    Occupancy::Counts => *c + 1,
                };
            }
        }
        Ok(VoxelGrid { frame: *self, cells })
    }
}

/// Sparse occupancy grid: linear cell index → value (1 for binary grids).
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    frame: GridFrame,
    cells: BTreeMap<usize, u32>,
}

impl VoxelGrid {
    pub fn frame(&self) -> &GridFrame {
        &self.frame
    }

    pub fn occupied(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.cells.iter().map(|(&k, &v)| (k, v))
    }

    pub fn total(&self) -> u64 {
        self.cells.values().map(|&v| v as u64).sum()
    }

    /// `(Σ min, Σ max)` cellwise against `other`.
    pub fn min_max_sums(&self, other: &VoxelGrid) -> (u64, u64) {
        let mut inter = 0u64;
        let mut union = 0u64;
        let mut a = self.cells.iter().peekable();
        let mut b = other.cells.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ka, va)), Some((kb, vb))) => {
                    if ka == kb {
                        inter += (**va).min(**vb) as u64;
                        union += (**va).max(**vb) as u64;
                        a.next();
                        b.next();
                    } else if ka < kb {
                        union += **va as u64;
                        a.next();
                    } else {
                        union += **vb as u64;
                        b.next();
                    }
                }
                (Some((_, v)), None) => {
                    union += **v as u64;
                    a.next();
                }
                (None, Some((_, v))) => {
                    union += **v as u64;
                    b.next();
                }
                (None, None) => break,
            }
        }
        (inter, union)
    }
}

/// Voxelises a left/right end-effector pair into two grids sharing one
/// frame. Without `bounds` the frame is the pair's padded bounding box.
pub fn voxelize(
    left: Option<&Trajectory>,
    right: Option<&Trajectory>,
    voxel_size: f64,
    bounds: Option<Bounds>,
    occupancy: Occupancy,
) -> Result<(VoxelGrid, VoxelGrid), DiversityError> {
    let frame = match bounds {
        Some(b) => GridFrame::from_bounds(b, voxel_size)?,
        None => GridFrame::enclosing(left.into_iter().chain(right), voxel_size)?,
    };
    Ok((frame.grid(left, occupancy)?, frame.grid(right, occupancy)?))
}

/// Similarity of two bimanual grid pairs:
/// `(Σmin(Lᵢ,Lⱼ) + Σmin(Rᵢ,Rⱼ)) / (Σmax(Lᵢ,Lⱼ) + Σmax(Rᵢ,Rⱼ) + ε)`.
pub fn pair_iou(
    a: (&VoxelGrid, &VoxelGrid),
    b: (&VoxelGrid, &VoxelGrid),
    eps: f64,
) -> Result<f64, DiversityError> {
    for (x, y) in [(a.0, b.0), (a.1, b.1), (a.0, a.1)] {
        if x.frame != y.frame {
            return Err(DiversityError::GridMismatch);
        }
    }
    let (il, ul) = a.0.min_max_sums(b.0);
    let (ir, ur) = a.1.min_max_sums(b.1);
    Ok((il + ir) as f64 / ((ul + ur) as f64 + eps))
}

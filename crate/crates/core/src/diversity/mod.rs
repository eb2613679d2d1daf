//! Trajectory voxelisation, pairwise voxel-IoU similarity and greedy
//! selection of maximally diverse episodes.

mod sampler;
mod voxel;

pub use sampler::{greedy_diverse_select, similarity_matrix, SimilarityMatrix};
pub use voxel::{pair_iou, voxelize, Bounds, GridFrame, Occupancy, VoxelGrid, DEFAULT_VOXEL_SIZE};

#[derive(Debug, thiserror::Error)]
pub enum DiversityError {
    #[error("voxel size must be positive, got {0}")]
    NonPositiveVoxelSize(f64),
    #[error("point ({x}, {y}, {z}) lies outside the explicit bounds")]
    PointOutOfBounds { x: f64, y: f64, z: f64 },
    #[error("voxel grids do not share origin, dims and voxel size")]
    GridMismatch,
    #[error("k = {k} outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("voxelisation needs 3-D trajectories")]
    NotSpatial,
    #[error("no points to voxelise")]
    NoPoints,
    #[error("invalid similarity matrix: {0}")]
    InvalidMatrix(String),
}

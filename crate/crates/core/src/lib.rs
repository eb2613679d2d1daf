//! Evaluation metrics for embodied world models: scene consistency from
//! patch embeddings, trajectory motion consistency against ground truth,
//! and semantic alignment and diversity, aggregated into a per-model table.

pub mod data;
pub mod diversity;
pub mod motion;
pub mod report;
pub mod scene;
pub mod semantic;

pub mod cli;
pub mod eval;

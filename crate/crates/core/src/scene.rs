//! Scene consistency from per-frame patch embeddings.

use serde::{Deserialize, Serialize};

use crate::data::{EmbeddingKind, EmbeddingTensor};

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("frame shapes differ: {0}")]
    ShapeMismatch(String),
    #[error("patch {patch} has zero norm")]
    ZeroNormPatch { patch: usize },
    #[error("scene scoring needs at least 2 frames, got {0}")]
    TooFewFrames(usize),
    #[error("expected a patch_per_frame tensor, got {0:?}")]
    WrongKind(EmbeddingKind),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneScore {
    /// similarity of frame i to frame i+1
    pub per_frame_consecutive: Vec<f64>,
    /// similarity of frame 0 to frame i+1
    pub per_frame_to_initial: Vec<f64>,
    /// mean of both streams, mapped from [-1, 1] to [0, 1]
    pub aggregate: f64,
}

/// Mean over patch positions of the cosine between matching patches of two
/// frames, each given as a flattened `patches × dim` slice.
pub fn patch_cosine(fa: &[f32], fb: &[f32], dim: usize) -> Result<f64, SceneError> {
    if fa.len() != fb.len() {
        return Err(SceneError::ShapeMismatch(format!("{} vs {} values", fa.len(), fb.len())));
    }
    if dim == 0 || fa.is_empty() || !fa.len().is_multiple_of(dim) {
        return Err(SceneError::ShapeMismatch(format!("{} values do not split into {dim}-dim patches", fa.len())));
    }
    let mut total = 0.0;
    let patches = fa.len() / dim;
    for (patch, (a, b)) in fa.chunks_exact(dim).zip(fb.chunks_exact(dim)).enumerate() {
        let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
        for (&x, &y) in a.iter().zip(b) {
            let (x, y) = (x as f64, y as f64);
            dot += x * y;
            na += x * x;
            nb += y * y;
        }
        if na == 0.0 || nb == 0.0 {
            return Err(SceneError::ZeroNormPatch { patch });
        }
        total += (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0);
    }
    Ok(total / patches as f64)
}

pub fn scene_score(e: &EmbeddingTensor) -> Result<SceneScore, SceneError> {
    if e.kind() != EmbeddingKind::PatchPerFrame {
        return Err(SceneError::WrongKind(e.kind()));
    }
    let frames = e.outer_len();
    if frames < 2 {
        return Err(SceneError::TooFewFrames(frames));
    }
    let dim = e.dim();
    let first = e.outer(0);
    let mut consecutive = Vec::with_capacity(frames - 1);
    let mut to_initial = Vec::with_capacity(frames - 1);
    for i in 0..frames - 1 {
        let next = e.outer(i + 1);
        consecutive.push(patch_cosine(e.outer(i), next, dim)?);
        to_initial.push(patch_cosine(first, next, dim)?);
    }
    let mean = consecutive
        .iter()
        .zip(&to_initial)
        .map(|(c, t)| 0.5 * (c + t))
        .sum::<f64>()
        / consecutive.len() as f64;
    Ok(SceneScore {
        per_frame_consecutive: consecutive,
        per_frame_to_initial: to_initial,
        aggregate: ((mean + 1.0) / 2.0).clamp(0.0, 1.0),
    })
}

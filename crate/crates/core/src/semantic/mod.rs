//! Semantic scores: global-caption BLEU, step-level embedding alignment,
//! logic verdicts and within-group diversity.

mod bleu;

use serde::{Deserialize, Serialize};

use crate::data::{EmbeddingTensor, Verdict};

pub use bleu::{bleu, bleu_text, clipped_matches, tokenize};

#[derive(Debug, thiserror::Error)]
pub enum SemanticError {
    #[error("reference has no tokens")]
    EmptyReference,
    #[error("BLEU order must be at least 1")]
    InvalidOrder,
    #[error("embedding dims differ: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("no step embeddings")]
    EmptySteps,
    #[error("no logic verdicts")]
    EmptyVerdicts,
    #[error("diversity needs at least 2 videos, got {0}")]
    TooFewVideos(usize),
    #[error("embedding vector has zero norm")]
    ZeroNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemanticScores {
    pub bleu: f64,
    pub step_clip: f64,
    pub logic: f64,
    pub diversity: f64,
}

/// How generated steps are paired with ground-truth steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepMatching {
    /// step i with step i, up to the shorter list
    #[default]
    Index,
    /// repeatedly take the most similar unused pair
    Greedy,
}

pub fn cosine(a: &[f32], b: &[f32]) -> Result<f64, SemanticError> {
    if a.len() != b.len() {
        return Err(SemanticError::DimMismatch(a.len(), b.len()));
    }
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(SemanticError::ZeroNorm);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

/// Step-level similarity in [0, 1]: mean of `(cos + 1) / 2` over matched
/// step pairs, scaled by `min(len) / max(len)`.
pub fn step_alignment(gen: &EmbeddingTensor, gt: &EmbeddingTensor, matching: StepMatching) -> Result<f64, SemanticError> {
    if gen.dim() != gt.dim() {
        return Err(SemanticError::DimMismatch(gen.dim(), gt.dim()));
    }
    let a: Vec<&[f32]> = gen.rows().collect();
    let b: Vec<&[f32]> = gt.rows().collect();
    step_alignment_rows(&a, &b, matching)
}

pub fn step_alignment_rows(gen: &[&[f32]], gt: &[&[f32]], matching: StepMatching) -> Result<f64, SemanticError> {
    if gen.is_empty() || gt.is_empty() {
        return Err(SemanticError::EmptySteps);
    }
    let (short, long) = (gen.len().min(gt.len()), gen.len().max(gt.len()));
    let sims: Vec<f64> = match matching {
        StepMatching::Index => (0..short).map(|i| cosine(gen[i], gt[i])).collect::<Result<_, _>>()?,
        StepMatching::Greedy => {
            let mut pairs = Vec::with_capacity(gen.len() * gt.len());
            for (i, a) in gen.iter().enumerate() {
                for (j, b) in gt.iter().enumerate() {
                    pairs.push((cosine(a, b)?, i, j));
                }
            }
            // highest similarity first, index order on ties
            pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
            let mut used_a = vec![false; gen.len()];
            let mut used_b = vec![false; gt.len()];
            let mut out = Vec::with_capacity(short);
            for (s, i, j) in pairs {
                if !used_a[i] && !used_b[j] {
                    used_a[i] = true;
                    used_b[j] = true;
                    out.push(s);
                }
            }
            out
        }
    };
    let mean = sims.iter().map(|c| (c + 1.0) / 2.0).sum::<f64>() / sims.len() as f64;
    Ok(mean * short as f64 / long as f64)
}

/// Fraction of `pass` verdicts.
pub fn logic_score(verdicts: &[Verdict]) -> Result<f64, SemanticError> {
    if verdicts.is_empty() {
        return Err(SemanticError::EmptyVerdicts);
    }
    let pass = verdicts.iter().filter(|v| **v == Verdict::Pass).count();
    Ok(pass as f64 / verdicts.len() as f64)
}

/// `1 - mean pairwise cosine` over a group of global video embeddings,
/// clamped to [0, 1].
pub fn semantic_diversity(globals: &[&EmbeddingTensor]) -> Result<f64, SemanticError> {
    let vectors: Vec<&[f32]> = globals.iter().map(|t| t.data()).collect();
    semantic_diversity_vectors(&vectors)
}

pub fn semantic_diversity_vectors(vectors: &[&[f32]]) -> Result<f64, SemanticError> {
    if vectors.len() < 2 {
        return Err(SemanticError::TooFewVideos(vectors.len()));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, a) in vectors.iter().enumerate() {
        for b in &vectors[i + 1..] {
            sum += cosine(a, b)?;
            count += 1;
        }
    }
    Ok((1.0 - sum / count as f64).clamp(0.0, 1.0))
}

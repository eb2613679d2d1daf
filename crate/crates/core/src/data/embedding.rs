//! `EWMB` tensor files.
//!
//! Layout, all little-endian:
//!
//! | bytes        | field                         |
//! |--------------|-------------------------------|
//! | 4            | magic `EWMB`                  |
//! | 4            | `u32` format version (1)      |
//! | 1            | `u8` kind code                |
//! | 1            | `u8` rank (1..=3)             |
//! | 4 × rank     | `u32` dimensions              |
//! | 4 × product  | `f32` payload, row-major      |

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DataError;

pub const EWMB_MAGIC: [u8; 4] = *b"EWMB";
const FORMAT_VERSION: u32 = 1;
const FIXED_HEADER: usize = 4 + 4 + 1 + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    /// frames × patches × dim
    PatchPerFrame,
    GlobalVideo,
    /// one row per step caption
    StepText,
    GlobalText,
}

impl EmbeddingKind {
    pub fn code(self) -> u8 {
        match self {
            EmbeddingKind::PatchPerFrame => 0,
            EmbeddingKind::GlobalVideo => 1,
            EmbeddingKind::StepText => 2,
            EmbeddingKind::GlobalText => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, DataError> {
        Ok(match code {
            0 => EmbeddingKind::PatchPerFrame,
            1 => EmbeddingKind::GlobalVideo,
            2 => EmbeddingKind::StepText,
            3 => EmbeddingKind::GlobalText,
            other => return Err(DataError::UnknownKind(other)),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTensor {
    kind: EmbeddingKind,
    shape: Vec<usize>,
    data: Vec<f32>,
}

impl EmbeddingTensor {
    pub fn new(kind: EmbeddingKind, shape: Vec<usize>, data: Vec<f32>) -> Result<Self, DataError> {
        let bad = |reason: &str| DataError::InvalidShape {
            shape: shape.clone(),
            reason: reason.to_string(),
        };
        if shape.is_empty() || shape.len() > 3 {
            return Err(bad("rank must be 1, 2 or 3"));
        }
        if shape.iter().any(|&d| d == 0 || d > u32::MAX as usize) {
            return Err(bad("dimensions must be positive u32 values"));
        }
        if kind == EmbeddingKind::PatchPerFrame && shape.len() != 3 {
            return Err(bad("patch_per_frame tensors are frames x patches x dim"));
        }
        let count = shape
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| bad("element count overflows"))?;
        if count != data.len() {
            return Err(bad(&format!("expected {count} elements, got {}", data.len())));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(DataError::NonFiniteValue { index });
        }
        Ok(Self { kind, shape, data })
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// Size of the innermost axis.
    pub fn dim(&self) -> usize {
        *self.shape.last().expect("rank >= 1")
    }

    /// Number of rows when the tensor is viewed as `(-1, dim)`.
    pub fn row_count(&self) -> usize {
        self.data.len() / self.dim()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.dim())
    }

    /// Number of leading-axis slices (frames for patch tensors).
    pub fn outer_len(&self) -> usize {
        self.shape[0]
    }

    /// Leading-axis slice `i`, flattened.
    pub fn outer(&self, i: usize) -> &[f32] {
        let stride = self.data.len() / self.shape[0];
        &self.data[i * stride..(i + 1) * stride]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(FIXED_HEADER + 4 * self.shape.len() + 4 * self.data.len());
        out.extend_from_slice(&EWMB_MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(self.kind.code());
        out.push(self.shape.len() as u8);
        for &d in &self.shape {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DataError> {
        if bytes.len() < 4 || bytes[..4] != EWMB_MAGIC {
            return Err(DataError::BadMagic);
        }
        if bytes.len() < FIXED_HEADER {
            return Err(DataError::TruncatedFile {
                expected: FIXED_HEADER,
                found: bytes.len(),
            });
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        if version != FORMAT_VERSION {
            return Err(DataError::UnsupportedVersion(version));
        }
        let kind = EmbeddingKind::from_code(bytes[8])?;
        let rank = bytes[9] as usize;
        if rank == 0 || rank > 3 {
            return Err(DataError::InvalidShape {
                shape: vec![],
                reason: format!("rank {rank} outside 1..=3"),
            });
        }
        let header_len = FIXED_HEADER + 4 * rank;
        if bytes.len() < header_len {
            return Err(DataError::TruncatedFile {
                expected: header_len,
                found: bytes.len(),
            });
        }
        let shape: Vec<usize> = bytes[FIXED_HEADER..header_len]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")) as usize)
            .collect();
        let count = shape.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        let expected = count
            .and_then(|c| c.checked_mul(4))
            .and_then(|b| b.checked_add(header_len))
            .ok_or_else(|| DataError::InvalidShape {
                shape: shape.clone(),
                reason: "element count overflows".into(),
            })?;
        if bytes.len() < expected {
            return Err(DataError::TruncatedFile {
                expected,
                found: bytes.len(),
            });
        }
        if bytes.len() > expected {
            return Err(DataError::TrailingData(bytes.len() - expected));
        }
        let data = bytes[header_len..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        Self::new(kind, shape, data)
    }
}

pub fn load_embedding(path: impl AsRef<Path>) -> Result<EmbeddingTensor, DataError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| DataError::io(path, e))?;
    EmbeddingTensor::from_bytes(&bytes)
}

pub fn write_embedding(tensor: &EmbeddingTensor, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    std::fs::write(path, tensor.to_bytes()).map_err(|e| DataError::io(path, e))
}

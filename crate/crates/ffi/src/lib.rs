//! C ABI over the `ewmeval` metric core.
//!
//! Trajectories and embedding tensors cross the boundary as opaque handles
//! created by `*_new` / `*_load` and released with the matching `*_free`.
//! Every fallible call returns an `EwmStatus`; on failure, a message for
//! the most recent error on the calling thread is available from
//! `ewm_last_error`. Output pointers are written only on success.
//!
//! Handles are immutable once created and may be shared across threads.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ewmeval::data::{
    load_embedding, load_trajectory, DataError, EmbeddingKind, EmbeddingTensor, Point2, Point3, Trajectory,
};
use ewmeval::diversity::{greedy_diverse_select, DiversityError, SimilarityMatrix};
use ewmeval::motion::{
    best_of_n, dtw_cost, dyn_score, dynamics_profile, motion_scores, ndtw_score, symmetric_hausdorff, wasserstein_1d,
    DynConfig, DynMode, MotionConfig, MotionError, MotionScores, NdtwNormalization,
};
use ewmeval::scene::{scene_score, SceneError};
use ewmeval::semantic::{bleu_text, SemanticError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EwmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EmptyInput = 3,
    DimensionMismatch = 4,
    TooShort = 5,
    Io = 6,
    Parse = 7,
    InvalidFormat = 8,
    OutOfRange = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EwmNdtwNorm {
    /// cost divided by the warping path length
    PathLength = 0,
    /// cost divided by the sum of both sequence lengths
    SumOfLengths = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EwmDynMode {
    /// speed and acceleration magnitudes
    Magnitude = 0,
    /// per-axis components, distances summed over axes
    PerAxis = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EwmEmbeddingKind {
    PatchPerFrame = 0,
    GlobalVideo = 1,
    StepText = 2,
    GlobalText = 3,
}

/// Motion scoring parameters. `ewm_motion_config_default` fills the
/// defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EwmMotionConfig {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub ndtw_norm: EwmNdtwNorm,
    pub dyn_mode: EwmDynMode,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EwmMotionScores {
    pub hsd: f64,
    pub ndtw: f64,
    pub dyn_score: f64,
    pub raw_hausdorff: f64,
    pub raw_ndtw: f64,
}

/// Opaque trajectory handle.
pub struct EwmTrajectory {
    inner: Trajectory,
}

/// Opaque embedding tensor handle.
pub struct EwmEmbedding {
    inner: EmbeddingTensor,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(EwmStatus, String);

impl Failure {
    fn new(status: EwmStatus, msg: impl Into<String>) -> Self {
        Self(status, msg.into())
    }
}

impl From<MotionError> for Failure {
    fn from(e: MotionError) -> Self {
        let status = match e {
            MotionError::EmptyTrajectory
            | MotionError::EmptySamples
            | MotionError::BothEmpty
            | MotionError::EmptyCandidateList => EwmStatus::EmptyInput,
            MotionError::DimensionMismatch { .. } => EwmStatus::DimensionMismatch,
            MotionError::TooShort { .. } => EwmStatus::TooShort,
            MotionError::InvalidConfig(_) => EwmStatus::InvalidArgument,
        };
        Self(status, e.to_string())
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        let status = match e {
            DataError::Io { .. } | DataError::MissingEvidence { .. } => EwmStatus::Io,
            DataError::Parse { .. } | DataError::Schema(_) => EwmStatus::Parse,
            DataError::EmptyTrajectory => EwmStatus::EmptyInput,
            DataError::NonFinitePoint { .. } | DataError::InvalidFrameRate(_) | DataError::NonFiniteValue { .. } => {
                EwmStatus::InvalidArgument
            }
            _ => EwmStatus::InvalidFormat,
        };
        Self(status, e.to_string())
    }
}

impl From<SceneError> for Failure {
    fn from(e: SceneError) -> Self {
        let status = match e {
            SceneError::TooFewFrames(_) => EwmStatus::TooShort,
            SceneError::ShapeMismatch { .. } => EwmStatus::DimensionMismatch,
            _ => EwmStatus::InvalidArgument,
        };
        Self(status, e.to_string())
    }
}

impl From<SemanticError> for Failure {
    fn from(e: SemanticError) -> Self {
        let status = match e {
            SemanticError::EmptyReference => EwmStatus::EmptyInput,
            _ => EwmStatus::InvalidArgument,
        };
        Self(status, e.to_string())
    }
}

impl From<DiversityError> for Failure {
    fn from(e: DiversityError) -> Self {
        let status = match e {
            DiversityError::KOutOfRange { .. } => EwmStatus::OutOfRange,
            _ => EwmStatus::InvalidArgument,
        };
        Self(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> EwmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EwmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            EwmStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(EwmStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(EwmStatus::NullPointer, format!("{name} is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(EwmStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn string<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(EwmStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(EwmStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

impl EwmMotionConfig {
    fn to_core(self) -> MotionConfig {
        MotionConfig {
            dyn_cfg: DynConfig {
                alpha: self.alpha,
                beta: self.beta,
                epsilon: self.epsilon,
            },
            dyn_mode: match self.dyn_mode {
                EwmDynMode::Magnitude => DynMode::Magnitude,
                EwmDynMode::PerAxis => DynMode::PerAxis,
            },
            ndtw_norm: norm(self.ndtw_norm),
        }
    }
}

fn norm(n: EwmNdtwNorm) -> NdtwNormalization {
    match n {
        EwmNdtwNorm::PathLength => NdtwNormalization::PathLength,
        EwmNdtwNorm::SumOfLengths => NdtwNormalization::SumOfLengths,
    }
}

impl From<MotionScores> for EwmMotionScores {
    fn from(m: MotionScores) -> Self {
        Self {
            hsd: m.hsd,
            ndtw: m.ndtw,
            dyn_score: m.dyn_,
            raw_hausdorff: m.raw_hausdorff,
            raw_ndtw: m.raw_ndtw_cost,
        }
    }
}

unsafe fn motion_config(cfg: *const EwmMotionConfig) -> Result<MotionConfig, Failure> {
    let cfg = if cfg.is_null() {
        MotionConfig::default()
    } else {
        (*cfg).to_core()
    };
    cfg.dyn_cfg.validate()?;
    Ok(cfg)
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ewm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ewm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn ewm_motion_config_default() -> EwmMotionConfig {
    let d = DynConfig::default();
    EwmMotionConfig {
        alpha: d.alpha,
        beta: d.beta,
        epsilon: d.epsilon,
        ndtw_norm: EwmNdtwNorm::PathLength,
        dyn_mode: EwmDynMode::Magnitude,
    }
}

/// Builds a trajectory from `n` points of `dim` (2 or 3) interleaved
/// coordinates. `frame_rate` must be positive.
#[no_mangle]
pub unsafe extern "C" fn ewm_trajectory_new(
    coords: *const f64,
    n: usize,
    dim: usize,
    frame_rate: f64,
    out_handle: *mut *mut EwmTrajectory,
) -> EwmStatus {
    guard(|| {
        let out_handle = out(out_handle, "out_handle")?;
        if dim != 2 && dim != 3 {
            return Err(Failure::new(EwmStatus::InvalidArgument, format!("dim must be 2 or 3, got {dim}")));
        }
        let len = n
            .checked_mul(dim)
            .ok_or_else(|| Failure::new(EwmStatus::InvalidArgument, "point count overflows"))?;
        let c = slice(coords, len, "coords")?;
        let t = if dim == 2 {
            Trajectory::planar(c.chunks_exact(2).map(|p| Point2::new(p[0], p[1])).collect(), frame_rate)?
        } else {
            Trajectory::spatial(c.chunks_exact(3).map(|p| Point3::new(p[0], p[1], p[2])).collect(), frame_rate)?
        };
        *out_handle = Box::into_raw(Box::new(EwmTrajectory { inner: t }));
        Ok(())
    })
}

/// Loads a CSV or JSON trajectory file.
#[no_mangle]
pub unsafe extern "C" fn ewm_trajectory_load(path: *const c_char, out_handle: *mut *mut EwmTrajectory) -> EwmStatus {
    guard(|| {
        let out_handle = out(out_handle, "out_handle")?;
        let t = load_trajectory(Path::new(string(path, "path")?))?;
        *out_handle = Box::into_raw(Box::new(EwmTrajectory { inner: t }));
        Ok(())
    })
}

/// Number of points; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ewm_trajectory_len(t: *const EwmTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.inner.len())
}

/// Coordinates per point (2 or 3); 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ewm_trajectory_dim(t: *const EwmTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.inner.dim())
}

/// Releases a trajectory. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ewm_trajectory_free(t: *mut EwmTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Symmetric Hausdorff distance.
#[no_mangle]
pub unsafe extern "C" fn ewm_hausdorff(
    g: *const EwmTrajectory,
    p: *const EwmTrajectory,
    out_distance: *mut f64,
) -> EwmStatus {
    guard(|| {
        let d = symmetric_hausdorff(&deref(g, "g")?.inner, &deref(p, "p")?.inner)?;
        *out(out_distance, "out_distance")? = d;
        Ok(())
    })
}

/// Unnormalised DTW cost and warping path length.
#[no_mangle]
pub unsafe extern "C" fn ewm_dtw(
    g: *const EwmTrajectory,
    p: *const EwmTrajectory,
    out_cost: *mut f64,
    out_path_len: *mut usize,
) -> EwmStatus {
    guard(|| {
        let a = dtw_cost(&deref(g, "g")?.inner, &deref(p, "p")?.inner)?;
        let cost = out(out_cost, "out_cost")?;
        let len = out(out_path_len, "out_path_len")?;
        *cost = a.cost;
        *len = a.path_len;
        Ok(())
    })
}

/// `1 / (nDTW + epsilon)`.
#[no_mangle]
pub unsafe extern "C" fn ewm_ndtw_score(
    g: *const EwmTrajectory,
    p: *const EwmTrajectory,
    normalization: EwmNdtwNorm,
    epsilon: f64,
    out_score: *mut f64,
) -> EwmStatus {
    guard(|| {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Failure::new(EwmStatus::InvalidArgument, "epsilon must be positive"));
        }
        let s = ndtw_score(&deref(g, "g")?.inner, &deref(p, "p")?.inner, norm(normalization), epsilon)?;
        *out(out_score, "out_score")? = s;
        Ok(())
    })
}

/// Dynamic consistency score. A null `cfg` uses the defaults.
#[no_mangle]
pub unsafe extern "C" fn ewm_dyn_score(
    g: *const EwmTrajectory,
    p: *const EwmTrajectory,
    cfg: *const EwmMotionConfig,
    out_score: *mut f64,
) -> EwmStatus {
    guard(|| {
        let cfg = motion_config(cfg)?;
        let gp = dynamics_profile(&deref(g, "g")?.inner)?;
        let pp = dynamics_profile(&deref(p, "p")?.inner)?;
        *out(out_score, "out_score")? = dyn_score(&gp, &pp, &cfg.dyn_cfg, cfg.dyn_mode)?;
        Ok(())
    })
}

/// All motion scores of `p` against `g`. A null `cfg` uses the defaults.
#[no_mangle]
pub unsafe extern "C" fn ewm_motion_scores(
    g: *const EwmTrajectory,
    p: *const EwmTrajectory,
    cfg: *const EwmMotionConfig,
    out_scores: *mut EwmMotionScores,
) -> EwmStatus {
    guard(|| {
        let cfg = motion_config(cfg)?;
        let m = motion_scores(&deref(g, "g")?.inner, &deref(p, "p")?.inner, &cfg)?;
        *out(out_scores, "out_scores")? = m.into();
        Ok(())
    })
}

/// 1-D Wasserstein distance between two sample sets.
#[no_mangle]
pub unsafe extern "C" fn ewm_wasserstein_1d(
    u: *const f64,
    nu: usize,
    w: *const f64,
    nw: usize,
    out_distance: *mut f64,
) -> EwmStatus {
    guard(|| {
        let u = slice(u, nu, "u")?;
        let w = slice(w, nw, "w")?;
        if u.iter().chain(w).any(|v| !v.is_finite()) {
            return Err(Failure::new(EwmStatus::InvalidArgument, "samples must be finite"));
        }
        *out(out_distance, "out_distance")? = wasserstein_1d(u, w)?;
        Ok(())
    })
}

/// Candidate closest to `g` in Hausdorff distance (lowest index on ties)
/// and its scores. `out_scores` may be null.
#[no_mangle]
pub unsafe extern "C" fn ewm_best_of_n(
    g: *const EwmTrajectory,
    candidates: *const *const EwmTrajectory,
    n: usize,
    cfg: *const EwmMotionConfig,
    out_index: *mut usize,
    out_scores: *mut EwmMotionScores,
) -> EwmStatus {
    guard(|| {
        let cfg = motion_config(cfg)?;
        let g = &deref(g, "g")?.inner;
        let handles = slice(candidates, n, "candidates")?;
        let mut cands = Vec::with_capacity(n);
        for (i, &h) in handles.iter().enumerate() {
            cands.push(deref(h, &format!("candidates[{i}]"))?.inner.clone());
        }
        let sel = best_of_n(g, &cands, &cfg)?;
        *out(out_index, "out_index")? = sel.index;
        if let Some(s) = out_scores.as_mut() {
            *s = sel.scores.into();
        }
        Ok(())
    })
}

/// Smoothed BLEU of `candidate` against `reference` up to order `max_n`.
#[no_mangle]
pub unsafe extern "C" fn ewm_bleu(
    candidate: *const c_char,
    reference: *const c_char,
    max_n: usize,
    out_score: *mut f64,
) -> EwmStatus {
    guard(|| {
        let s = bleu_text(string(candidate, "candidate")?, string(reference, "reference")?, max_n)?;
        *out(out_score, "out_score")? = s;
        Ok(())
    })
}

/// Builds a tensor from row-major `data` of `len` floats and `rank` dims.
#[no_mangle]
pub unsafe extern "C" fn ewm_embedding_new(
    kind: EwmEmbeddingKind,
    shape: *const usize,
    rank: usize,
    data: *const f32,
    len: usize,
    out_handle: *mut *mut EwmEmbedding,
) -> EwmStatus {
    guard(|| {
        let out_handle = out(out_handle, "out_handle")?;
        let kind = EmbeddingKind::from_code(kind as u8)?;
        let shape = slice(shape, rank, "shape")?.to_vec();
        let data = slice(data, len, "data")?.to_vec();
        let t = EmbeddingTensor::new(kind, shape, data)?;
        *out_handle = Box::into_raw(Box::new(EwmEmbedding { inner: t }));
        Ok(())
    })
}

/// Loads an `EWMB` tensor file.
#[no_mangle]
pub unsafe extern "C" fn ewm_embedding_load(path: *const c_char, out_handle: *mut *mut EwmEmbedding) -> EwmStatus {
    guard(|| {
        let out_handle = out(out_handle, "out_handle")?;
        let t = load_embedding(Path::new(string(path, "path")?))?;
        *out_handle = Box::into_raw(Box::new(EwmEmbedding { inner: t }));
        Ok(())
    })
}

/// Releases a tensor. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ewm_embedding_free(e: *mut EwmEmbedding) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Scene consistency in [0, 1] of a patch-per-frame tensor.
#[no_mangle]
pub unsafe extern "C" fn ewm_scene_score(e: *const EwmEmbedding, out_score: *mut f64) -> EwmStatus {
    guard(|| {
        let s = scene_score(&deref(e, "e")?.inner)?;
        *out(out_score, "out_score")? = s.aggregate;
        Ok(())
    })
}

/// Greedy diverse selection over a row-major `n`×`n` similarity matrix.
/// Writes `k` indices in selection order to `out_indices`.
#[no_mangle]
pub unsafe extern "C" fn ewm_greedy_select(
    matrix: *const f64,
    n: usize,
    k: usize,
    out_indices: *mut usize,
) -> EwmStatus {
    guard(|| {
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Failure::new(EwmStatus::InvalidArgument, "matrix size overflows"))?;
        let values = slice(matrix, len, "matrix")?.to_vec();
        let s = SimilarityMatrix::new(n, values)?;
        let picks = greedy_diverse_select(&s, k)?;
        if out_indices.is_null() {
            return Err(Failure::new(EwmStatus::NullPointer, "out_indices is null"));
        }
        std::slice::from_raw_parts_mut(out_indices, k).copy_from_slice(&picks);
        Ok(())
    })
}

//! The episode manifest (`schema_version: 1`).
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "models": ["model_a"],
//!   "tasks": [{
//!     "task_id": "pour_water",
//!     "episodes": [{
//!       "episode_id": "ep01",
//!       "instruction": "pour water into the cup",
//!       "initial_images": ["ep01/head.png"],
//!       "gt_trajectory_path": "ep01/gt.csv",
//!       "gt_step_captions": ["grasp the kettle", "tilt the kettle"],
//!       "gt_step_embeddings_path": "ep01/gt_steps.ewmb",
//!       "candidates": [{
//!         "model_id": "model_a",
//!         "trajectory_path": {"left": "ep01/a0_l.csv", "right": "ep01/a0_r.csv"},
//!         "scene_embeddings_path": "ep01/a0_scene.ewmb",
//!         "global_video_embedding_path": "ep01/a0_video.ewmb",
//!         "caption": "the robot pours water",
//!         "step_captions": ["grasp kettle", "pour"],
//!         "step_text_embeddings_path": "ep01/a0_steps.ewmb",
//!         "logic_verdict": {"verdict": "pass", "tags": []}
//!       }]
//!     }]
//!   }]
//! }
//! ```
//!
//! Relative paths resolve against the manifest's directory. Unknown fields
//! are ignored.

use std::collections::{BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::DataError;

pub const SCHEMA_VERSION: u32 = 1;

/// A trajectory reference: either one file or one file per hand. With two
/// hands the primary hand is chosen at scoring time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrajectoryRef {
    Single(PathBuf),
    Bimanual {
        #[serde(default)]
        left: Option<PathBuf>,
        #[serde(default)]
        right: Option<PathBuf>,
    },
}

impl TrajectoryRef {
    pub fn paths(&self) -> Vec<&Path> {
        match self {
            TrajectoryRef::Single(p) => vec![p.as_path()],
            TrajectoryRef::Bimanual { left, right } => {
                left.iter().chain(right.iter()).map(PathBuf::as_path).collect()
            }
        }
    }

    fn paths_mut(&mut self) -> Vec<&mut PathBuf> {
        match self {
            TrajectoryRef::Single(p) => vec![p],
            TrajectoryRef::Bimanual { left, right } => left.iter_mut().chain(right.iter_mut()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicVerdict {
    pub verdict: Verdict,
    #[serde(default)]
    pub tags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub model_id: String,
    #[serde(default)]
    pub trajectory_path: Option<TrajectoryRef>,
    #[serde(default)]
    pub scene_embeddings_path: Option<PathBuf>,
    #[serde(default)]
    pub global_video_embedding_path: Option<PathBuf>,
    #[serde(default)]
    pub caption: Option<String>,
    #[serde(default)]
    pub step_captions: Vec<String>,
    #[serde(default)]
    pub step_text_embeddings_path: Option<PathBuf>,
    #[serde(default)]
    pub logic_verdict: Option<LogicVerdict>,
}

impl CandidateRecord {
    fn has_evidence(&self) -> bool {
        self.trajectory_path.is_some()
            || self.scene_embeddings_path.is_some()
            || self.global_video_embedding_path.is_some()
            || self.caption.is_some()
            || !self.step_captions.is_empty()
            || self.step_text_embeddings_path.is_some()
            || self.logic_verdict.is_some()
    }

    fn paths_mut(&mut self) -> Vec<&mut PathBuf> {
        let mut out = Vec::new();
        if let Some(t) = self.trajectory_path.as_mut() {
            out.extend(t.paths_mut());
        }
        out.extend(self.scene_embeddings_path.as_mut());
        out.extend(self.global_video_embedding_path.as_mut());
        out.extend(self.step_text_embeddings_path.as_mut());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode_id: String,
    pub instruction: String,
    #[serde(default)]
    pub initial_images: Vec<PathBuf>,
    pub gt_trajectory_path: TrajectoryRef,
    #[serde(default)]
    pub gt_step_captions: Vec<String>,
    #[serde(default)]
    pub gt_step_embeddings_path: Option<PathBuf>,
    #[serde(default)]
    pub action_trajectory_path: Option<PathBuf>,
    pub candidates: Vec<CandidateRecord>,
}

impl EpisodeRecord {
    fn paths_mut(&mut self) -> Vec<&mut PathBuf> {
        let mut out: Vec<&mut PathBuf> = self.initial_images.iter_mut().collect();
        out.extend(self.gt_trajectory_path.paths_mut());
        out.extend(self.gt_step_embeddings_path.as_mut());
        out.extend(self.action_trajectory_path.as_mut());
        for c in &mut self.candidates {
            out.extend(c.paths_mut());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task_id: String,
    pub episodes: Vec<EpisodeRecord>,
}

/// A dangling evidence reference found while loading with
/// `require_evidence = false`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingEvidence {
    pub task_id: String,
    pub episode_id: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub models: Vec<String>,
    pub tasks: Vec<TaskRecord>,
    #[serde(skip)]
    pub missing: Vec<MissingEvidence>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn episode_count(&self) -> usize {
        self.tasks.iter().map(|t| t.episodes.len()).sum()
    }

    pub fn candidate_count(&self) -> usize {
        self.tasks
            .iter()
            .flat_map(|t| &t.episodes)
            .map(|e| e.candidates.len())
            .sum()
    }

    pub fn is_missing(&self, path: &Path) -> bool {
        self.missing.iter().any(|m| m.path == path)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Fail on the first dangling file reference instead of recording it.
    pub require_evidence: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            require_evidence: true,
        }
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest, DataError> {
    load_manifest_with(path, LoadOptions::default())
}

pub fn load_manifest_with(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Manifest, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    let mut manifest: Manifest = serde_json::from_str(&text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => DataError::Schema(e.to_string()),
        _ => DataError::parse(path, e),
    })?;
    validate(&mut manifest)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    resolve_and_check(&mut manifest, base, opts)?;
    Ok(manifest)
}

fn validate(m: &mut Manifest) -> Result<(), DataError> {
    if m.schema_version != SCHEMA_VERSION {
        return Err(DataError::Schema(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            m.schema_version
        )));
    }
    let mut models = HashSet::new();
    for model in &m.models {
        if !models.insert(model.as_str()) {
            return Err(DataError::Schema(format!("duplicate model_id {model:?}")));
        }
    }
    let mut task_ids = HashSet::new();
    for task in &m.tasks {
        if !task_ids.insert(task.task_id.as_str()) {
            return Err(DataError::Schema(format!("duplicate task_id {:?}", task.task_id)));
        }
        let mut episode_ids = HashSet::new();
        for ep in &task.episodes {
            let id = &ep.episode_id;
            if !episode_ids.insert(id.as_str()) {
                return Err(DataError::Schema(format!(
                    "duplicate episode_id {id:?} in task {:?}",
                    task.task_id
                )));
            }
            if ep.candidates.is_empty() {
                return Err(DataError::Schema(format!("episode {id:?} has no candidates")));
            }
            if !(1..=4).contains(&ep.initial_images.len()) {
                return Err(DataError::Schema(format!(
                    "episode {id:?} lists {} initial images (allowed 1-4)",
                    ep.initial_images.len()
                )));
            }
            let steps = ep.gt_step_captions.len();
            if !(1..=20).contains(&steps) {
                return Err(DataError::Schema(format!(
                    "episode {id:?} has {steps} step captions (allowed 1-20)"
                )));
            }
            if !(4..=10).contains(&steps) {
                m.warnings
                    .push(format!("episode {id:?}: {steps} step captions is outside the usual 4-10"));
            }
            for (i, c) in ep.candidates.iter().enumerate() {
                if !models.contains(c.model_id.as_str()) {
                    return Err(DataError::Schema(format!(
                        "episode {id:?} candidate {i}: model_id {:?} not in models",
                        c.model_id
                    )));
                }
                if !c.has_evidence() {
                    return Err(DataError::Schema(format!(
                        "episode {id:?} candidate {i} carries no evidence"
                    )));
                }
            }
        }
    }
    for w in &m.warnings {
        log::warn!("{w}");
    }
    Ok(())
}

fn resolve_and_check(m: &mut Manifest, base: &Path, opts: LoadOptions) -> Result<(), DataError> {
    let mut missing = Vec::new();
    let mut seen = BTreeSet::new();
    for task in &mut m.tasks {
        for ep in &mut task.episodes {
            let episode_id = ep.episode_id.clone();
            for p in ep.paths_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
                if !p.exists() {
                    if opts.require_evidence {
                        return Err(DataError::MissingEvidence {
                            episode_id,
                            path: p.clone(),
                        });
                    }
                    if seen.insert(p.clone()) {
                        missing.push(MissingEvidence {
                            task_id: task.task_id.clone(),
                            episode_id: episode_id.clone(),
                            path: p.clone(),
                        });
                    }
                }
            }
        }
    }
    m.missing = missing;
    Ok(())
}

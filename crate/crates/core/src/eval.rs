//! The batch sweep behind `ewmeval evaluate`: per-episode best-of-N scoring
//! over a manifest, per-group diversity, and the final aggregation.
//!
//! Episodes are scored on a bounded worker pool. Each episode's scores are
//! cached as JSON under a key derived from the scoring configuration and
//! the bytes of every file the episode references, so an interrupted sweep
//! resumes where it stopped. Output never depends on the pool size or on
//! which episodes came from the cache.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{
    load_embedding, load_manifest_with, load_trajectory, CandidateRecord, DataError, EmbeddingKind, EmbeddingTensor,
    EpisodeRecord, Hand, LoadOptions, Manifest, TrajectoryRef, Verdict,
};
use crate::motion::{motion_scores, primary_hand, select_by_hausdorff, MotionConfig, MotionError};
use crate::report::{
    aggregate, normalize_scores, EpisodeScores, GroupDiversity, MetricReport, MissingPolicy, NormPolicy, ReportError,
};
use crate::scene::{scene_score, SceneError};
use crate::semantic::{bleu_text, semantic_diversity, step_alignment, SemanticError, StepMatching};

/// Bumped whenever cached episode scores would change meaning.
const CACHE_FORMAT: &str = "ewmeval-episode-cache-1";

/// How the unbounded reciprocal motion scores reach [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "policy")]
pub enum MotionNorm {
    /// per-episode `clamp(score / ceiling, 0, 1)` before averaging
    Clamp { hsd: f64, ndtw: f64, dyn_: f64 },
    /// raw per-episode scores are averaged, then min-max scaled across models
    MinMax,
}

impl MotionNorm {
    pub const DEFAULT_CLAMP: MotionNorm = MotionNorm::Clamp {
        hsd: 1.0,
        ndtw: 1.0,
        dyn_: 0.01,
    };
}

impl Default for MotionNorm {
    fn default() -> Self {
        Self::DEFAULT_CLAMP
    }
}

/// Which generated videos form one semantic-diversity group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiversityGroup {
    /// every candidate of a model within a task
    #[default]
    TaskModel,
    /// the candidates of one episode; a task's value is the mean over episodes
    EpisodeCandidates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub motion: MotionConfig,
    pub norm: MotionNorm,
    pub step_matching: StepMatching,
    pub diversity_group: DiversityGroup,
    pub bleu_order: usize,
    /// score what is present instead of failing on dangling evidence
    pub allow_partial: bool,
    /// recorded in the cache key; the sweep itself draws no random numbers
    pub seed: u64,
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            motion: MotionConfig::default(),
            norm: MotionNorm::default(),
            step_matching: StepMatching::default(),
            diversity_group: DiversityGroup::default(),
            bleu_order: 4,
            allow_partial: false,
            seed: 0,
            jobs: 1,
            cache_dir: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScoreError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{path}: expected a {expected:?} tensor, found {found:?}")]
    WrongKind {
        path: PathBuf,
        expected: EmbeddingKind,
        found: EmbeddingKind,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Manifest(DataError),
    #[error("task {task_id}, episode {episode_id}: {source}")]
    Score {
        task_id: String,
        episode_id: String,
        #[source]
        source: ScoreError,
    },
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("cache i/o on {path}: {source}")]
    Cache {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl EvalError {
    /// Process exit status: 2 for dangling evidence, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            EvalError::Manifest(DataError::MissingEvidence { .. }) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutput {
    pub report: MetricReport,
    pub cache_hits: usize,
    pub cache_misses: usize,
}

/// Episode id and the global video embeddings of one model's candidates.
type EpisodeVideos<'a> = (&'a str, Vec<&'a Path>);

/// Diversity of a group, or a warning explaining why it was skipped.
type GroupOutcome = (Option<f64>, Option<String>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CachedEpisode {
    scores: Vec<EpisodeScores>,
    warnings: Vec<String>,
}

/// Loads `manifest_path` and runs the full sweep.
pub fn evaluate_manifest(manifest_path: &Path, cfg: &EvalConfig) -> Result<EvalOutput, EvalError> {
    let opts = LoadOptions {
        require_evidence: !cfg.allow_partial,
    };
    let manifest = load_manifest_with(manifest_path, opts).map_err(EvalError::Manifest)?;
    evaluate(&manifest, cfg)
}

pub fn evaluate(manifest: &Manifest, cfg: &EvalConfig) -> Result<EvalOutput, EvalError> {
    cfg.motion.dyn_cfg.validate().map_err(|e| EvalError::InvalidConfig(e.to_string()))?;
    if cfg.jobs == 0 {
        return Err(EvalError::InvalidConfig("jobs must be at least 1".into()));
    }
    if cfg.bleu_order == 0 {
        return Err(EvalError::InvalidConfig("BLEU order must be at least 1".into()));
    }
    if let MotionNorm::Clamp { hsd, ndtw, dyn_ } = cfg.norm {
        if ![hsd, ndtw, dyn_].iter().all(|c| c.is_finite() && *c > 0.0) {
            return Err(EvalError::InvalidConfig("clamp ceilings must be positive".into()));
        }
    }
    let ctx = Context {
        manifest,
        cfg,
        missing: manifest.missing.iter().map(|m| m.path.clone()).collect(),
    };
    if let Some(dir) = &cfg.cache_dir {
        fs::create_dir_all(dir).map_err(|source| EvalError::Cache {
            path: dir.clone(),
            source,
        })?;
    }

    let jobs: Vec<(&str, &EpisodeRecord)> = manifest
        .tasks
        .iter()
        .flat_map(|t| t.episodes.iter().map(move |e| (t.task_id.as_str(), e)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| EvalError::InvalidConfig(e.to_string()))?;
    let results: Vec<Result<(CachedEpisode, bool), EvalError>> =
        pool.install(|| jobs.par_iter().map(|(task, ep)| ctx.episode_cached(task, ep)).collect());

    let mut episodes = Vec::new();
    let mut warnings: Vec<String> = manifest.warnings.clone();
    warnings.extend(
        manifest
            .missing
            .iter()
            .map(|m| format!("task {} episode {}: missing {}", m.task_id, m.episode_id, m.path.display())),
    );
    let (mut hits, mut misses) = (0, 0);
    for r in results {
        let (cached, hit) = r?;
        if hit {
            hits += 1;
        } else {
            misses += 1;
        }
        episodes.extend(cached.scores);
        warnings.extend(cached.warnings);
    }

    let diversity = pool.install(|| ctx.diversity(&mut warnings))?;
    let policy = if cfg.allow_partial {
        MissingPolicy::Zero
    } else {
        MissingPolicy::Error
    };
    let mut report = aggregate(&episodes, &diversity, policy)?;
    warnings.append(&mut report.warnings);
    report.warnings = warnings;
    if cfg.norm == MotionNorm::MinMax {
        report.apply_min_max_motion()?;
    }
    Ok(EvalOutput {
        report,
        cache_hits: hits,
        cache_misses: misses,
    })
}

struct Context<'a> {
    manifest: &'a Manifest,
    cfg: &'a EvalConfig,
    missing: HashSet<PathBuf>,
}

impl Context<'_> {
    fn available(&self, p: &Path) -> bool {
        !self.missing.contains(p)
    }

    fn episode_cached(&self, task_id: &str, ep: &EpisodeRecord) -> Result<(CachedEpisode, bool), EvalError> {
        let wrap = |source: ScoreError| EvalError::Score {
            task_id: task_id.to_string(),
            episode_id: ep.episode_id.clone(),
            source,
        };
        let Some(dir) = &self.cfg.cache_dir else {
            return Ok((self.score_episode(task_id, ep).map_err(wrap)?, false));
        };
        let key = self.cache_key(task_id, ep);
        let path = dir.join(format!("{key}.json"));
        if let Ok(text) = fs::read_to_string(&path) {
            match serde_json::from_str::<CachedEpisode>(&text) {
                Ok(c) => return Ok((c, true)),
                Err(e) => log::warn!("ignoring unreadable cache entry {}: {e}", path.display()),
            }
        }
        let scored = self.score_episode(task_id, ep).map_err(wrap)?;
        let body = serde_json::to_string(&scored).expect("episode scores serialise");
        let tmp = dir.join(format!("{key}.json.tmp{}", std::process::id()));
        let io = |source| EvalError::Cache {
            path: path.clone(),
            source,
        };
        fs::write(&tmp, body).map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)?;
        Ok((scored, false))
    }

    /// sha256 over the scoring configuration, the episode record and the
    /// contents of every file it references.
    fn cache_key(&self, task_id: &str, ep: &EpisodeRecord) -> String {
        let mut h = Sha256::new();
        let mut field = |bytes: &[u8]| {
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(bytes);
        };
        field(CACHE_FORMAT.as_bytes());
        field(serde_json::to_string(self.cfg).expect("config serialises").as_bytes());
        field(serde_json::to_string(&self.manifest.models).expect("models serialise").as_bytes());
        field(task_id.as_bytes());
        field(serde_json::to_string(ep).expect("episode serialises").as_bytes());
        for p in episode_paths(ep) {
            match fs::read(p) {
                Ok(bytes) => field(&bytes),
                Err(_) => field(b"\0missing"),
            }
        }
        hex::encode(h.finalize())
    }

    fn load_ref(&self, r: &TrajectoryRef) -> Result<Option<crate::data::Trajectory>, DataError> {
        let load = |p: &PathBuf, hand: Hand| -> Result<Option<crate::data::Trajectory>, DataError> {
            if self.available(p) {
                Ok(Some(load_trajectory(p)?.with_hand(hand)))
            } else {
                Ok(None)
            }
        };
        match r {
            TrajectoryRef::Single(p) => load(p, Hand::Unknown),
            TrajectoryRef::Bimanual { left, right } => {
                let l = left.as_ref().map(|p| load(p, Hand::Left)).transpose()?.flatten();
                let r = right.as_ref().map(|p| load(p, Hand::Right)).transpose()?.flatten();
                Ok(primary_hand(l.as_ref(), r.as_ref()).ok().cloned())
            }
        }
    }

    fn load_kind(&self, p: &Path, expected: EmbeddingKind) -> Result<Option<EmbeddingTensor>, ScoreError> {
        if !self.available(p) {
            return Ok(None);
        }
        let t = load_embedding(p)?;
        if t.kind() != expected {
            return Err(ScoreError::WrongKind {
                path: p.to_path_buf(),
                expected,
                found: t.kind(),
            });
        }
        Ok(Some(t))
    }

    fn score_episode(&self, task_id: &str, ep: &EpisodeRecord) -> Result<CachedEpisode, ScoreError> {
        let cfg = self.cfg;
        let mut warnings = Vec::new();
        let gt = self.load_ref(&ep.gt_trajectory_path)?;
        if gt.is_none() {
            warnings.push(format!(
                "task {task_id} episode {}: no ground-truth trajectory, motion not scored",
                ep.episode_id
            ));
        }
        let gt_steps = match &ep.gt_step_embeddings_path {
            Some(p) => self.load_kind(p, EmbeddingKind::StepText)?,
            None => None,
        };

        let mut by_model: BTreeMap<&str, Vec<&CandidateRecord>> = BTreeMap::new();
        for c in &ep.candidates {
            by_model.entry(c.model_id.as_str()).or_default().push(c);
        }
        let mut scores = Vec::with_capacity(by_model.len());
        for (model, cands) in by_model {
            let mut trajs = Vec::new();
            for (i, c) in cands.iter().enumerate() {
                if let Some(r) = &c.trajectory_path {
                    if let Some(t) = self.load_ref(r)? {
                        trajs.push((i, t));
                    }
                }
            }
            let mut e = EpisodeScores {
                model_id: model.to_string(),
                task_id: task_id.to_string(),
                episode_id: ep.episode_id.clone(),
                ..EpisodeScores::default()
            };
            // best-of-N needs both sides; without trajectories the first
            // candidate carries the non-motion scores
            let selected = match (&gt, trajs.is_empty()) {
                (Some(g), false) => {
                    let best = select_by_hausdorff(g, trajs.iter().map(|(_, t)| t))?;
                    let m = motion_scores(g, &trajs[best].1, &cfg.motion)?;
                    e.raw_motion = Some(m);
                    let (h, n, d) = match cfg.norm {
                        MotionNorm::Clamp { hsd, ndtw, dyn_ } => (
                            clamp(m.hsd, hsd)?,
                            clamp(m.ndtw, ndtw)?,
                            clamp(m.dyn_, dyn_)?,
                        ),
                        MotionNorm::MinMax => (m.hsd, m.ndtw, m.dyn_),
                    };
                    (e.hsd, e.ndtw, e.dyn_) = (Some(h), Some(n), Some(d));
                    trajs[best].0
                }
                _ => 0,
            };
            e.selected_candidate = Some(selected);
            let c = cands[selected];

            if let Some(p) = &c.scene_embeddings_path {
                if let Some(t) = self.load_kind(p, EmbeddingKind::PatchPerFrame)? {
                    e.scene_c = Some(scene_score(&t)?.aggregate);
                }
            }
            if let Some(caption) = &c.caption {
                e.bleu = Some(bleu_text(caption, &ep.instruction, cfg.bleu_order)?);
            }
            if let (Some(p), Some(gt_steps)) = (&c.step_text_embeddings_path, &gt_steps) {
                if let Some(t) = self.load_kind(p, EmbeddingKind::StepText)? {
                    e.clip = Some(step_alignment(&t, gt_steps, cfg.step_matching)?);
                }
            }
            if let Some(v) = &c.logic_verdict {
                e.logic = Some(if v.verdict == Verdict::Pass { 1.0 } else { 0.0 });
            }
            scores.push(e);
        }
        Ok(CachedEpisode { scores, warnings })
    }

    fn diversity(&self, warnings: &mut Vec<String>) -> Result<Vec<GroupDiversity>, EvalError> {
        // (model, task) → per-episode lists of global video embeddings
        let mut groups: BTreeMap<(&str, &str), Vec<EpisodeVideos>> = BTreeMap::new();
        for task in &self.manifest.tasks {
            for ep in &task.episodes {
                let mut per_model: BTreeMap<&str, Vec<&Path>> = BTreeMap::new();
                for c in &ep.candidates {
                    if let Some(p) = &c.global_video_embedding_path {
                        if self.available(p) {
                            per_model.entry(c.model_id.as_str()).or_default().push(p);
                        }
                    }
                }
                for (model, paths) in per_model {
                    groups
                        .entry((model, task.task_id.as_str()))
                        .or_default()
                        .push((ep.episode_id.as_str(), paths));
                }
            }
        }
        let entries: Vec<_> = groups.into_iter().collect();
        let results: Vec<Result<GroupOutcome, EvalError>> = entries
            .par_iter()
            .map(|((model, task), eps)| self.group_diversity(model, task, eps))
            .collect();
        let mut out = Vec::new();
        for (((model, task), _), r) in entries.iter().zip(results) {
            let (value, warning) = r?;
            warnings.extend(warning);
            if let Some(diversity) = value {
                out.push(GroupDiversity {
                    model_id: model.to_string(),
                    task_id: task.to_string(),
                    diversity,
                });
            }
        }
        Ok(out)
    }

    fn group_diversity(
        &self,
        model: &str,
        task: &str,
        episodes: &[EpisodeVideos],
    ) -> Result<GroupOutcome, EvalError> {
        let wrap = |episode_id: &str, source: ScoreError| EvalError::Score {
            task_id: task.to_string(),
            episode_id: episode_id.to_string(),
            source,
        };
        let load_all = |episode_id: &str, paths: &[&Path]| -> Result<Vec<EmbeddingTensor>, EvalError> {
            paths
                .iter()
                .map(|p| {
                    self.load_kind(p, EmbeddingKind::GlobalVideo)
                        .map(|t| t.expect("availability checked"))
                        .map_err(|e| wrap(episode_id, e))
                })
                .collect()
        };
        let too_few = || Some(format!("model {model} task {task}: fewer than 2 videos, diversity not scored"));
        match self.cfg.diversity_group {
            DiversityGroup::TaskModel => {
                let mut all = Vec::new();
                for (id, paths) in episodes {
                    all.extend(load_all(id, paths)?);
                }
                if all.len() < 2 {
                    return Ok((None, too_few()));
                }
                let refs: Vec<&EmbeddingTensor> = all.iter().collect();
                let d = semantic_diversity(&refs).map_err(|e| wrap(episodes[0].0, e.into()))?;
                Ok((Some(d), None))
            }
            DiversityGroup::EpisodeCandidates => {
                let mut sum = 0.0;
                let mut n = 0usize;
                for (id, paths) in episodes {
                    let ts = load_all(id, paths)?;
                    if ts.len() < 2 {
                        continue;
                    }
                    let refs: Vec<&EmbeddingTensor> = ts.iter().collect();
                    sum += semantic_diversity(&refs).map_err(|e| wrap(id, e.into()))?;
                    n += 1;
                }
                if n == 0 {
                    return Ok((None, too_few()));
                }
                Ok((Some(sum / n as f64), None))
            }
        }
    }
}

fn clamp(v: f64, ceiling: f64) -> Result<f64, ReportError> {
    Ok(normalize_scores(&[v], NormPolicy::ClampCeiling { ceiling })?.values[0])
}

fn episode_paths(ep: &EpisodeRecord) -> Vec<&Path> {
    let mut out: Vec<&Path> = ep.initial_images.iter().map(PathBuf::as_path).collect();
    out.extend(ep.gt_trajectory_path.paths());
    out.extend(ep.gt_step_embeddings_path.as_deref());
    out.extend(ep.action_trajectory_path.as_deref());
    for c in &ep.candidates {
        if let Some(t) = &c.trajectory_path {
            out.extend(t.paths());
        }
        out.extend(c.scene_embeddings_path.as_deref());
        out.extend(c.global_video_embedding_path.as_deref());
        out.extend(c.step_text_embeddings_path.as_deref());
    }
    out
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::motion::MotionScores;

use super::normalize::{normalize_scores, NormPolicy};
use super::ReportError;

/// Scores of the selected candidate of one (model, episode).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EpisodeScores {
    pub model_id: String,
    pub task_id: String,
    pub episode_id: String,
    /// index of the scored candidate among this model's candidates
    pub selected_candidate: Option<usize>,
    /// unnormalised motion scores of the selected candidate
    pub raw_motion: Option<MotionScores>,
    pub scene_c: Option<f64>,
    pub hsd: Option<f64>,
    #[serde(rename = "dyn")]
    pub dyn_: Option<f64>,
    pub ndtw: Option<f64>,
    pub bleu: Option<f64>,
    pub clip: Option<f64>,
    /// 1 for a pass verdict, 0 for a violation
    pub logic: Option<f64>,
}

/// Semantic diversity of one (model, task) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDiversity {
    pub model_id: String,
    pub task_id: String,
    pub diversity: f64,
}

/// One model's row in the result table. Dimension sums are plain sums of
/// their member columns.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelRow {
    pub model_id: String,
    pub scene_c: f64,
    pub hsd: f64,
    #[serde(rename = "dyn")]
    pub dyn_: f64,
    pub ndtw: f64,
    pub motion_sum: f64,
    pub diversity: f64,
    pub bleu: f64,
    pub clip: f64,
    pub logics: f64,
    pub semantics_sum: f64,
    pub overall: f64,
}

impl ModelRow {
    pub fn recompute_sums(&mut self) {
        self.motion_sum = self.hsd + self.dyn_ + self.ndtw;
        self.semantics_sum = self.diversity + self.bleu + self.clip + self.logics;
        self.overall = self.scene_c + self.motion_sum + self.semantics_sum;
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricReport {
    pub models: Vec<ModelRow>,
    pub episodes: Vec<EpisodeScores>,
    pub diversity_groups: Vec<GroupDiversity>,
    pub warnings: Vec<String>,
}

/// What to do when a model has no value at all for a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    Error,
    /// report 0 and record a warning
    Zero,
}

#[derive(Default)]
struct Acc {
    sum: f64,
    n: usize,
}

impl Acc {
    fn push(&mut self, v: Option<f64>) {
        if let Some(v) = v {
            self.sum += v;
            self.n += 1;
        }
    }

    fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

const METRICS: [&str; 8] = ["SceneC", "HSD", "Dyn", "nDTW", "Diversity", "BLEU", "CLIP", "Logics"];

/// Folds per-episode scores into per-model rows. Each metric is the mean
/// over the model's episodes; diversity is the mean over its task groups.
/// Rows come out sorted by model id, so the result does not depend on
/// input order.
pub fn aggregate(
    episodes: &[EpisodeScores],
    diversity: &[GroupDiversity],
    missing: MissingPolicy,
) -> Result<MetricReport, ReportError> {
    let mut accs: BTreeMap<&str, [Acc; 8]> = BTreeMap::new();
    for e in episodes {
        let a = accs.entry(e.model_id.as_str()).or_default();
        a[0].push(e.scene_c);
        a[1].push(e.hsd);
        a[2].push(e.dyn_);
        a[3].push(e.ndtw);
        a[5].push(e.bleu);
        a[6].push(e.clip);
        a[7].push(e.logic);
    }
    for d in diversity {
        accs.entry(d.model_id.as_str()).or_default()[4].push(Some(d.diversity));
    }

    let mut warnings = Vec::new();
    let mut rows = Vec::with_capacity(accs.len());
    for (model, a) in &accs {
        let mut vals = [0.0; 8];
        for (k, acc) in a.iter().enumerate() {
            vals[k] = match (acc.mean(), missing) {
                (Some(v), _) => v,
                (None, MissingPolicy::Error) => {
                    return Err(ReportError::MissingDimension {
                        model: model.to_string(),
                        metric: METRICS[k].to_string(),
                    })
                }
                (None, MissingPolicy::Zero) => {
                    warnings.push(format!("model {model}: no {} values, reported as 0", METRICS[k]));
                    0.0
                }
            };
        }
        let mut row = ModelRow {
            model_id: model.to_string(),
            scene_c: vals[0],
            hsd: vals[1],
            dyn_: vals[2],
            ndtw: vals[3],
            diversity: vals[4],
            bleu: vals[5],
            clip: vals[6],
            logics: vals[7],
            ..ModelRow::default()
        };
        row.recompute_sums();
        rows.push(row);
    }

    let mut episodes = episodes.to_vec();
    episodes.sort_by(|a, b| {
        (&a.model_id, &a.task_id, &a.episode_id).cmp(&(&b.model_id, &b.task_id, &b.episode_id))
    });
    let mut diversity_groups = diversity.to_vec();
    diversity_groups.sort_by(|a, b| (&a.model_id, &a.task_id).cmp(&(&b.model_id, &b.task_id)));
    Ok(MetricReport {
        models: rows,
        episodes,
        diversity_groups,
        warnings,
    })
}

impl MetricReport {
    /// Min-max normalises the three motion columns across models and
    /// refreshes the sums.
    pub fn apply_min_max_motion(&mut self) -> Result<(), ReportError> {
        type Field = fn(&mut ModelRow) -> &mut f64;
        let fields: [(&str, Field); 3] = [
            ("HSD", |r| &mut r.hsd),
            ("Dyn", |r| &mut r.dyn_),
            ("nDTW", |r| &mut r.ndtw),
        ];
        for (name, field) in fields {
            let raw: Vec<f64> = self.models.iter_mut().map(|r| *field(r)).collect();
            let n = normalize_scores(&raw, NormPolicy::MinMax)?;
            if n.degenerate {
                self.warnings.push(format!("{name}: all models equal under min-max, mapped to 1"));
            }
            for (r, v) in self.models.iter_mut().zip(n.values) {
                *field(r) = v;
            }
        }
        for r in &mut self.models {
            r.recompute_sums();
        }
        Ok(())
    }

    pub fn row(&self, model: &str) -> Option<&ModelRow> {
        self.models.iter().find(|r| r.model_id == model)
    }
}

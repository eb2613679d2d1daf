use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ReportError;

/// Per-sample human orderings of models, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanRanking {
    pub samples: Vec<Vec<String>>,
    /// Points by position. Defaults to `n-1, n-2, ..., 0` for `n` models.
    #[serde(default)]
    pub points: Option<Vec<f64>>,
}

impl HumanRanking {
    /// Total points per model over all samples.
    pub fn totals(&self) -> Result<BTreeMap<String, f64>, ReportError> {
        let mut totals = BTreeMap::new();
        let mut model_set: Option<BTreeSet<&str>> = None;
        for (i, sample) in self.samples.iter().enumerate() {
            let set: BTreeSet<&str> = sample.iter().map(String::as_str).collect();
            if set.len() != sample.len() {
                return Err(ReportError::InvalidRanking(format!("sample {i} lists a model twice")));
            }
            match &model_set {
                None => model_set = Some(set),
                Some(s) if *s != set => return Err(ReportError::ModelSetMismatch(format!("sample {i} ranks a different model set"))),
                Some(_) => {}
            }
            let n = sample.len();
            let points: Vec<f64> = match &self.points {
                Some(p) if p.len() == n => p.clone(),
                Some(p) => {
                    return Err(ReportError::InvalidRanking(format!(
                        "{} point values for {n} ranked models",
                        p.len()
                    )))
                }
                None => (0..n).rev().map(|v| v as f64).collect(),
            };
            for (pos, model) in sample.iter().enumerate() {
                *totals.entry(model.clone()).or_insert(0.0) += points[pos];
            }
        }
        if totals.is_empty() {
            return Err(ReportError::InvalidRanking("no ranked samples".into()));
        }
        Ok(totals)
    }
}

/// Average ranks (1-based) of `values`, highest value ranked first. Tied
/// values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    pearson(&average_ranks(a), &average_ranks(b))
}

/// Kendall's tau-b, which corrects for ties on either side.
pub fn kendall_tau_b(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len();
    let (mut concordant, mut discordant, mut ties_a, mut ties_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let da = a[i].total_cmp(&a[j]) as i64;
            let db = b[i].total_cmp(&b[j]) as i64;
            match (da, db) {
                (0, 0) => {}
                (0, _) => ties_a += 1,
                (_, 0) => ties_b += 1,
                _ if da == db => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n1 = (concordant + discordant + ties_a) as f64;
    let n2 = (concordant + discordant + ties_b) as f64;
    (n1 > 0.0 && n2 > 0.0).then(|| (concordant - discordant) as f64 / (n1 * n2).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankCorrelation {
    pub spearman: f64,
    pub kendall: f64,
}

/// Correlates two model scorings (higher is better on both sides).
pub fn rank_correlation(
    metric: &BTreeMap<String, f64>,
    human: &BTreeMap<String, f64>,
) -> Result<RankCorrelation, ReportError> {
    let a: BTreeSet<&String> = metric.keys().collect();
    let b: BTreeSet<&String> = human.keys().collect();
    if a != b {
        let only: Vec<&&String> = a.symmetric_difference(&b).collect();
        return Err(ReportError::ModelSetMismatch(format!("models on one side only: {only:?}")));
    }
    let x: Vec<f64> = metric.values().copied().collect();
    let y: Vec<f64> = human.values().copied().collect();
    let degenerate = || ReportError::InvalidRanking("ranking is constant or has fewer than 2 models".into());
    Ok(RankCorrelation {
        spearman: spearman(&x, &y).ok_or_else(degenerate)?,
        kendall: kendall_tau_b(&x, &y).ok_or_else(degenerate)?,
    })
}

/// Scores `n-1 .. 0` for an ordered list, best first.
pub fn scores_from_order(order: &[String]) -> BTreeMap<String, f64> {
    let n = order.len();
    order.iter().enumerate().map(|(i, m)| (m.clone(), (n - 1 - i) as f64)).collect()
}

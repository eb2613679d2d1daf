use serde::{Deserialize, Serialize};

use super::ReportError;

/// Mapping of unbounded scores into [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "policy")]
pub enum NormPolicy {
    /// `clamp(x / ceiling, 0, 1)`
    ClampCeiling { ceiling: f64 },
    /// `(x - min) / (max - min)` across the given values
    MinMax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub values: Vec<f64>,
    /// min-max over values that are all equal; every output is 1
    pub degenerate: bool,
}

pub fn normalize_scores(raw: &[f64], policy: NormPolicy) -> Result<Normalized, ReportError> {
    if let Some(i) = raw.iter().position(|v| !v.is_finite()) {
        return Err(ReportError::NonFinite(format!("score {i} is {}", raw[i])));
    }
    match policy {
        NormPolicy::ClampCeiling { ceiling } => {
            if !(ceiling.is_finite() && ceiling > 0.0) {
                return Err(ReportError::InvalidConfig(format!("ceiling must be positive, got {ceiling}")));
            }
            Ok(Normalized {
                values: raw.iter().map(|v| (v / ceiling).clamp(0.0, 1.0)).collect(),
                degenerate: false,
            })
        }
        NormPolicy::MinMax => {
            let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if raw.is_empty() || hi == lo {
                if !raw.is_empty() {
                    log::warn!("min-max normalisation over {} equal values; mapping all to 1", raw.len());
                }
                return Ok(Normalized {
                    values: vec![1.0; raw.len()],
                    degenerate: !raw.is_empty(),
                });
            }
            Ok(Normalized {
                values: raw.iter().map(|v| ((v - lo) / (hi - lo)).clamp(0.0, 1.0)).collect(),
                degenerate: false,
            })
        }
    }
}

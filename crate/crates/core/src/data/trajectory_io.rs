use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use super::types::{Hand, Point2, Point3, Points, Trajectory, DEFAULT_FRAME_RATE};
use super::DataError;

/// Loads a trajectory from a `.csv` or `.json` file. The extension picks
/// the parser; anything other than `.json` is read as CSV.
pub fn load_trajectory(path: impl AsRef<Path>) -> Result<Trajectory, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        parse_trajectory_json(&text, path)
    } else {
        parse_trajectory_csv(&text, path)
    }
}

/// Parses CSV with header `t,x,y`, `t,x,y,z`, `x,y` or `x,y,z`.
pub fn parse_trajectory_csv(text: &str, origin: &Path) -> Result<Trajectory, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::parse(origin, e))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let (has_t, dim) = match header.as_slice() {
        ["t", "x", "y"] => (true, 2),
        ["t", "x", "y", "z"] => (true, 3),
        ["x", "y"] => (false, 2),
        ["x", "y", "z"] => (false, 3),
        other => {
            return Err(DataError::parse(
                origin,
                format!("unexpected header {other:?}, expected t,x,y[,z]"),
            ))
        }
    };

    let mut times = Vec::new();
    let mut coords: Vec<Vec<f64>> = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DataError::parse(origin, e))?;
        let values = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|e| {
                    DataError::parse(origin, format!("row {row}: {field:?}: {e}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DataError::NonFinitePoint { row });
        }
        let (t, xyz) = if has_t {
            (Some(values[0]), values[1..].to_vec())
        } else {
            (None, values)
        };
        if let Some(t) = t {
            times.push(t);
        }
        coords.push(xyz);
    }
    build(coords, dim, has_t.then_some(times), None, Hand::Unknown, origin)
}

#[derive(Deserialize)]
struct JsonTrajectory {
    #[serde(default)]
    schema_version: Option<u32>,
    #[serde(default)]
    frame_rate: Option<f64>,
    #[serde(default)]
    hand: Hand,
    #[serde(default)]
    timestamps: Option<Vec<f64>>,
    points: Vec<Vec<f64>>,
}

/// Parses the JSON trajectory schema:
/// `{"frame_rate": 30, "hand": "left", "timestamps": [...], "points": [[x, y], ...]}`.
/// Only `points` is required.
pub fn parse_trajectory_json(text: &str, origin: &Path) -> Result<Trajectory, DataError> {
    let doc: JsonTrajectory = serde_json::from_str(text).map_err(|e| DataError::parse(origin, e))?;
    if let Some(v) = doc.schema_version {
        if v != 1 {
            return Err(DataError::parse(origin, format!("unsupported schema_version {v}")));
        }
    }
    let dim = doc.points.first().map_or(2, Vec::len);
    if !(dim == 2 || dim == 3) {
        return Err(DataError::parse(origin, format!("points must have 2 or 3 coordinates, got {dim}")));
    }
    if let Some(row) = doc.points.iter().position(|p| p.len() != dim) {
        return Err(DataError::parse(origin, format!("row {row}: mixed dimensionality")));
    }
    if let Some(row) = doc.points.iter().position(|p| p.iter().any(|v| !v.is_finite())) {
        return Err(DataError::NonFinitePoint { row });
    }
    build(doc.points, dim, doc.timestamps, doc.frame_rate, doc.hand, origin)
}

fn build(
    coords: Vec<Vec<f64>>,
    dim: usize,
    times: Option<Vec<f64>>,
    declared_rate: Option<f64>,
    hand: Hand,
    origin: &Path,
) -> Result<Trajectory, DataError> {
    if coords.is_empty() {
        return Err(DataError::EmptyTrajectory);
    }
    let inferred = match &times {
        Some(t) => {
            if t.len() != coords.len() {
                return Err(DataError::parse(origin, "timestamp count differs from point count"));
            }
            if let Some(row) = t.iter().position(|v| !v.is_finite()) {
                return Err(DataError::NonFinitePoint { row });
            }
            if let Some(i) = t.windows(2).position(|w| w[1] < w[0]) {
                return Err(DataError::parse(
                    origin,
                    format!("timestamps decrease at row {}", i + 1),
                ));
            }
            median_rate(t)
        }
        None => None,
    };
    let frame_rate = declared_rate.or(inferred).unwrap_or(DEFAULT_FRAME_RATE);
    let points = if dim == 2 {
        Points::Planar(coords.iter().map(|c| Point2::new(c[0], c[1])).collect())
    } else {
        Points::Spatial(coords.iter().map(|c| Point3::new(c[0], c[1], c[2])).collect())
    };
    Ok(Trajectory::new(points, frame_rate)?.with_hand(hand))
}

/// Frame rate from the median timestamp step. `None` for single-point
/// tracks or when the median step is zero.
fn median_rate(times: &[f64]) -> Option<f64> {
    let mut steps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    if steps.is_empty() {
        return None;
    }
    steps.sort_by(f64::total_cmp);
    let n = steps.len();
    let median = if n % 2 == 1 {
        steps[n / 2]
    } else {
        0.5 * (steps[n / 2 - 1] + steps[n / 2])
    };
    (median > 0.0).then(|| 1.0 / median)
}

/// Writes a trajectory as CSV with a `t` column derived from its frame rate.
pub fn write_trajectory_csv(traj: &Trajectory, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(if traj.dim() == 2 { "t,x,y\n" } else { "t,x,y,z\n" });
    for (i, row) in traj.rows().iter().enumerate() {
        let t = i as f64 / traj.frame_rate();
        out.push_str(&format!("{t}"));
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    let mut f = std::fs::File::create(path).map_err(|e| DataError::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| DataError::io(path, e))
}

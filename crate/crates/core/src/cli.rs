//! Command-line front end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::data::{load_manifest, load_trajectory, Hand, TrajectoryRef, Trajectory};
use crate::diversity::{greedy_diverse_select, similarity_matrix, GridFrame, Occupancy, DEFAULT_VOXEL_SIZE};
use crate::eval::{evaluate_manifest, DiversityGroup, EvalConfig, MotionNorm};
use crate::motion::{primary_hand, DynConfig, DynMode, MotionConfig, NdtwNormalization};
use crate::report::{
    perturbation_study, rank_correlation, report_csv, report_json, report_markdown, scores_from_order, study_csv,
    study_svg, HumanRanking, MetricReport, Perturbation, StudyConfig,
};
use crate::semantic::StepMatching;

/// Environment variable overriding the per-episode cache directory.
pub const CACHE_DIR_ENV: &str = "EWMEVAL_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(name = "ewmeval", version, about = "Scene, motion and semantic scoring for embodied world model videos")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score every episode of a manifest and write report.{json,csv,md}
    Evaluate(EvaluateArgs),
    /// Pick the k most mutually dissimilar trajectories of a directory
    SampleDiverse(SampleArgs),
    /// Measure how each motion metric responds to controlled perturbations
    Perturb(PerturbArgs),
    /// Regenerate report.md and report.csv from a report.json
    Report(ReportArgs),
    /// Rank correlation between a metric ranking and a human ranking
    RankCorr(RankArgs),
}

#[derive(Debug, Args)]
struct MotionArgs {
    #[arg(long, default_value_t = 0.007)]
    alpha: f64,
    #[arg(long, default_value_t = 0.003)]
    beta: f64,
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    /// nDTW normaliser
    #[arg(long, value_enum, default_value_t = NdtwNormArg::PathLength)]
    ndtw_norm: NdtwNormArg,
    /// distributions compared by Dyn
    #[arg(long, value_enum, default_value_t = DynModeArg::Magnitude)]
    dyn_mode: DynModeArg,
}

impl MotionArgs {
    fn config(&self) -> MotionConfig {
        MotionConfig {
            dyn_cfg: DynConfig {
                alpha: self.alpha,
                beta: self.beta,
                epsilon: self.epsilon,
            },
            dyn_mode: match self.dyn_mode {
                DynModeArg::Magnitude => DynMode::Magnitude,
                DynModeArg::PerAxis => DynMode::PerAxis,
            },
            ndtw_norm: match self.ndtw_norm {
                NdtwNormArg::PathLength => NdtwNormalization::PathLength,
                NdtwNormArg::SumOfLengths => NdtwNormalization::SumOfLengths,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NdtwNormArg {
    PathLength,
    SumOfLengths,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DynModeArg {
    Magnitude,
    PerAxis,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormArg {
    Clamp,
    Minmax,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StepMatchingArg {
    Index,
    Greedy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DiversityGroupArg {
    TaskModel,
    EpisodeCandidates,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OccupancyArg {
    Binary,
    Counts,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// output directory
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    motion: MotionArgs,
    #[arg(long, value_enum, default_value_t = NormArg::Clamp)]
    norm: NormArg,
    /// clamp ceiling of the HSD score
    #[arg(long, default_value_t = 1.0)]
    hsd_ceiling: f64,
    /// clamp ceiling of the nDTW score
    #[arg(long, default_value_t = 1.0)]
    ndtw_ceiling: f64,
    /// clamp ceiling of the Dyn score
    #[arg(long, default_value_t = 0.01)]
    dyn_ceiling: f64,
    #[arg(long, value_enum, default_value_t = StepMatchingArg::Index)]
    step_matching: StepMatchingArg,
    #[arg(long, value_enum, default_value_t = DiversityGroupArg::TaskModel)]
    diversity_group: DiversityGroupArg,
    /// worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// score whatever evidence exists instead of failing on dangling paths
    #[arg(long)]
    allow_partial: bool,
    /// skip the per-episode cache
    #[arg(long)]
    no_cache: bool,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// directory of `<id>.left.csv` / `<id>.right.csv` 3-D trajectories
    #[arg(long)]
    dir: PathBuf,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// voxel edge length in meters
    #[arg(long, default_value_t = DEFAULT_VOXEL_SIZE)]
    voxel_size: f64,
    #[arg(long, value_enum, default_value_t = OccupancyArg::Binary)]
    occupancy: OccupancyArg,
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    /// output directory for selected.json and similarity.csv
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PerturbKind {
    Reverse,
    Outlier,
    Repeat,
}

#[derive(Debug, Args)]
struct PerturbArgs {
    /// directory of ground-truth trajectories (.csv or .json)
    #[arg(long, conflicts_with = "manifest", required_unless_present = "manifest")]
    dir: Option<PathBuf>,
    /// use the ground-truth trajectories of a manifest instead
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    motion: MotionArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [PerturbKind::Reverse, PerturbKind::Outlier, PerturbKind::Repeat])]
    kinds: Vec<PerturbKind>,
    #[arg(long, default_value_t = 2)]
    outlier_count: usize,
    #[arg(long, default_value_t = 3.0)]
    outlier_scale: f64,
    #[arg(long, default_value_t = 2)]
    repeat_times: usize,
    /// baseline prediction noise as a fraction of the bounding-box diagonal
    #[arg(long, default_value_t = 0.01)]
    jitter: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// a report.json written by `evaluate`
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RankArgs {
    /// metric side: a report.json (Overall column) or a ranking file
    #[arg(long)]
    metric: PathBuf,
    /// human side: a ranking file
    #[arg(long)]
    human: PathBuf,
    /// also write the result here
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed command: message for stderr plus exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Self::usage(error_chain(&e))
    }
}

fn error_chain(e: &dyn std::error::Error) -> String {
    let mut s = e.to_string();
    let mut src = e.source();
    while let Some(inner) = src {
        let msg = inner.to_string();
        if !s.contains(&msg) {
            let _ = write!(s, ": {msg}");
        }
        src = inner.source();
    }
    s
}

/// Entry point of the binary; returns the process exit status.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::SampleDiverse(a) => cmd_sample_diverse(a),
        Command::Perturb(a) => cmd_perturb(a),
        Command::Report(a) => cmd_report(a),
        Command::RankCorr(a) => cmd_rank_corr(a),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| Failure::usage(format!("writing {}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<(), Failure> {
    fs::create_dir_all(path).map_err(|e| Failure::usage(format!("creating {}: {e}", path.display())))
}

fn write_report(report: &MetricReport, out: &Path) -> Result<(), Failure> {
    create_dir(out)?;
    write_file(&out.join("report.json"), &report_json(report))?;
    write_file(&out.join("report.csv"), &report_csv(report))?;
    write_file(&out.join("report.md"), &report_markdown(report))
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<(), Failure> {
    let cache_dir = match (a.no_cache, std::env::var_os(CACHE_DIR_ENV)) {
        (true, _) => None,
        (false, Some(dir)) => Some(PathBuf::from(dir)),
        (false, None) => Some(a.out.join(".cache")),
    };
    let cfg = EvalConfig {
        motion: a.motion.config(),
        norm: match a.norm {
            NormArg::Clamp => MotionNorm::Clamp {
                hsd: a.hsd_ceiling,
                ndtw: a.ndtw_ceiling,
                dyn_: a.dyn_ceiling,
            },
            NormArg::Minmax => MotionNorm::MinMax,
        },
        step_matching: match a.step_matching {
            StepMatchingArg::Index => StepMatching::Index,
            StepMatchingArg::Greedy => StepMatching::Greedy,
        },
        diversity_group: match a.diversity_group {
            DiversityGroupArg::TaskModel => DiversityGroup::TaskModel,
            DiversityGroupArg::EpisodeCandidates => DiversityGroup::EpisodeCandidates,
        },
        bleu_order: 4,
        allow_partial: a.allow_partial,
        seed: a.seed,
        jobs: a.jobs,
        cache_dir,
    };
    let out = evaluate_manifest(&a.manifest, &cfg).map_err(|e| Failure {
        code: e.exit_code(),
        message: error_chain(&e),
    })?;
    log::info!("{} episodes from cache, {} scored", out.cache_hits, out.cache_misses);
    for w in &out.report.warnings {
        log::warn!("{w}");
    }
    write_report(&out.report, &a.out)
}

#[derive(Serialize)]
struct Selected<'a> {
    k: usize,
    voxel_size: f64,
    selected: Vec<&'a str>,
}

/// `<id>.left.<ext>` / `<id>.right.<ext>` pairs of a directory, by id.
fn hand_pairs(dir: &Path) -> Result<BTreeMap<String, [Option<PathBuf>; 2]>, Failure> {
    let mut pairs: BTreeMap<String, [Option<PathBuf>; 2]> = BTreeMap::new();
    let entries = fs::read_dir(dir).map_err(|e| Failure::usage(format!("reading {}: {e}", dir.display())))?;
    for entry in entries {
        let path = entry.map_err(|e| Failure::usage(e.to_string()))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let Some(stem) = name.strip_suffix(".csv").or_else(|| name.strip_suffix(".json")) else {
            continue;
        };
        let (id, slot) = if let Some(id) = stem.strip_suffix(".left") {
            (id, 0)
        } else if let Some(id) = stem.strip_suffix(".right") {
            (id, 1)
        } else {
            continue;
        };
        let e = pairs.entry(id.to_string()).or_default();
        if e[slot].is_some() {
            return Err(Failure::usage(format!("trajectory {id} has two {} files", ["left", "right"][slot])));
        }
        e[slot] = Some(path);
    }
    Ok(pairs)
}

fn cmd_sample_diverse(a: SampleArgs) -> Result<(), Failure> {
    let pairs = hand_pairs(&a.dir)?;
    let n = pairs.len();
    if a.k == 0 || a.k > n {
        return Err(Failure::usage(format!("--k must be in 1..={n}, got {}", a.k)));
    }
    let mut ids = Vec::with_capacity(n);
    let mut hands = Vec::with_capacity(n);
    for (id, [l, r]) in &pairs {
        let load = |p: &Option<PathBuf>| p.as_ref().map(load_trajectory).transpose();
        ids.push(id.as_str());
        hands.push((load(l)?, load(r)?));
    }
    let all = hands.iter().flat_map(|(l, r)| l.iter().chain(r.iter()));
    let frame = GridFrame::enclosing(all, a.voxel_size)?;
    let occupancy = match a.occupancy {
        OccupancyArg::Binary => Occupancy::Binary,
        OccupancyArg::Counts => Occupancy::Counts,
    };
    let grids = hands
        .iter()
        .map(|(l, r)| Ok((frame.grid(l.as_ref(), occupancy)?, frame.grid(r.as_ref(), occupancy)?)))
        .collect::<Result<Vec<_>, crate::diversity::DiversityError>>()?;
    let s = similarity_matrix(&grids, a.epsilon)?;
    let picks = greedy_diverse_select(&s, a.k)?;

    create_dir(&a.out)?;
    let selected = Selected {
        k: a.k,
        voxel_size: a.voxel_size,
        selected: picks.iter().map(|&i| ids[i]).collect(),
    };
    let mut json = serde_json::to_string_pretty(&selected).expect("selection serialises");
    json.push('\n');
    write_file(&a.out.join("selected.json"), &json)?;
    let mut csv = format!("id,{}\n", ids.join(","));
    for (i, id) in ids.iter().enumerate() {
        let row: Vec<String> = s.row(i).iter().map(|v| v.to_string()).collect();
        let _ = writeln!(csv, "{id},{}", row.join(","));
    }
    write_file(&a.out.join("similarity.csv"), &csv)
}

fn trajectory_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::usage(format!("reading {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let p = entry.map_err(|e| Failure::usage(e.to_string()))?.path();
        if matches!(p.extension().and_then(|e| e.to_str()), Some("csv" | "json")) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

fn load_ref(r: &TrajectoryRef) -> Result<Trajectory, Failure> {
    match r {
        TrajectoryRef::Single(p) => Ok(load_trajectory(p)?),
        TrajectoryRef::Bimanual { left, right } => {
            let l = left.as_ref().map(load_trajectory).transpose()?.map(|t| t.with_hand(Hand::Left));
            let r = right.as_ref().map(load_trajectory).transpose()?.map(|t| t.with_hand(Hand::Right));
            Ok(primary_hand(l.as_ref(), r.as_ref())?.clone())
        }
    }
}

#[derive(Serialize)]
struct StudyOutput<'a> {
    table: &'a crate::report::StudyTable,
    signature: Vec<crate::report::SignatureCheck>,
}

fn cmd_perturb(a: PerturbArgs) -> Result<(), Failure> {
    let gts: Vec<Trajectory> = match (&a.dir, &a.manifest) {
        (Some(dir), _) => trajectory_files(dir)?
            .iter()
            .map(|p| load_trajectory(p).map_err(Failure::from))
            .collect::<Result<_, _>>()?,
        (None, Some(m)) => {
            let m = load_manifest(m).map_err(|e| Failure {
                code: if matches!(e, crate::data::DataError::MissingEvidence { .. }) { 2 } else { 1 },
                message: e.to_string(),
            })?;
            m.tasks
                .iter()
                .flat_map(|t| &t.episodes)
                .map(|e| load_ref(&e.gt_trajectory_path))
                .collect::<Result<_, _>>()?
        }
        (None, None) => return Err(Failure::usage("one of --dir or --manifest is required")),
    };
    let perturbations = a
        .kinds
        .iter()
        .map(|k| match k {
            PerturbKind::Reverse => Perturbation::Reverse,
            PerturbKind::Outlier => Perturbation::Outlier {
                count: a.outlier_count,
                scale: a.outlier_scale,
            },
            PerturbKind::Repeat => Perturbation::Repeat { times: a.repeat_times },
        })
        .collect();
    let cfg = StudyConfig {
        motion: a.motion.config(),
        perturbations,
        baseline_jitter: a.jitter,
        seed: a.seed,
    };
    let table = perturbation_study(&gts, &cfg)?;
    create_dir(&a.out)?;
    write_file(&a.out.join("study.csv"), &study_csv(&table))?;
    write_file(&a.out.join("study.svg"), &study_svg(&table))?;
    let out = StudyOutput {
        signature: table.signature(),
        table: &table,
    };
    let mut json = serde_json::to_string_pretty(&out).expect("study serialises");
    json.push('\n');
    write_file(&a.out.join("study.json"), &json)
}

fn cmd_report(a: ReportArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&a.input).map_err(|e| Failure::usage(format!("reading {}: {e}", a.input.display())))?;
    let report: MetricReport =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", a.input.display())))?;
    create_dir(&a.out)?;
    write_file(&a.out.join("report.md"), &report_markdown(&report))?;
    write_file(&a.out.join("report.csv"), &report_csv(&report))
}

/// Reads one side of a rank comparison as model → score (higher is better).
///
/// Accepted shapes: `{"ranking": [best, ..., worst]}`, `{"scores": {model:
/// score}}`, `{"samples": [[best, ...], ...], "points": [..]?}`, or a
/// report.json, whose Overall column is used.
pub fn load_scores(path: &Path) -> Result<BTreeMap<String, f64>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let bad = |e: serde_json::Error| format!("{}: {e}", path.display());
    if value.get("models").is_some() {
        let report: MetricReport = serde_json::from_value(value).map_err(bad)?;
        return Ok(report.models.iter().map(|r| (r.model_id.clone(), r.overall)).collect());
    }
    if let Some(order) = value.get("ranking") {
        let order: Vec<String> = serde_json::from_value(order.clone()).map_err(bad)?;
        let n = order.len();
        let scores = scores_from_order(&order);
        if scores.len() != n {
            return Err(format!("{}: ranking lists a model twice", path.display()));
        }
        return Ok(scores);
    }
    if let Some(scores) = value.get("scores") {
        return serde_json::from_value(scores.clone()).map_err(bad);
    }
    if value.get("samples").is_some() {
        let h: HumanRanking = serde_json::from_value(value).map_err(bad)?;
        return h.totals().map_err(|e| format!("{}: {e}", path.display()));
    }
    Err(format!(
        "{}: expected a report or a file with \"ranking\", \"scores\" or \"samples\"",
        path.display()
    ))
}

fn cmd_rank_corr(a: RankArgs) -> Result<(), Failure> {
    let metric = load_scores(&a.metric).map_err(Failure::usage)?;
    let human = load_scores(&a.human).map_err(Failure::usage)?;
    let r = rank_correlation(&metric, &human)?;
    let mut json = serde_json::to_string_pretty(&r).expect("correlation serialises");
    json.push('\n');
    if let Some(out) = &a.out {
        write_file(out, &json)?;
    }
    print!("{json}");
    Ok(())
}

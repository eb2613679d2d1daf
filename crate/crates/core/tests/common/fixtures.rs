//! Deterministic generators for test inputs and checked-in fixtures.

use std::fs;
use std::path::Path;

use ewmeval::data::{write_embedding, EmbeddingKind, EmbeddingTensor, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Fifty smooth planar reaching arcs of 45 to 69 frames in pixel units.
pub fn arc_suite() -> Vec<Trajectory> {
    (0..50)
        .map(|k| {
            let kf = k as f64;
            let n = 45 + (k % 5) * 6;
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|i| {
                    let s = i as f64 / (n - 1) as f64;
                    let a = s * (1.2 + 0.03 * kf);
                    let w = 0.5 - 0.5 * (std::f64::consts::PI * s).cos();
                    (
                        120.0 + 6.0 * kf + 300.0 * w + 40.0 * a.sin(),
                        380.0 - 200.0 * s * s - 30.0 * (3.0 * a).sin(),
                    )
                })
                .collect();
            Trajectory::from_xy(&pts).unwrap()
        })
        .collect()
}

/// A published result row: per-metric inputs and the three printed sums.
pub struct PublishedRow {
    pub model: &'static str,
    /// SceneC, HSD, Dyn, nDTW, Diversity, BLEU, CLIP, Logics
    pub metrics: [f64; 8],
    pub motion_sum: f64,
    pub semantics_sum: f64,
    pub overall: f64,
}

pub const PUBLISHED: [PublishedRow; 7] = [
    PublishedRow { model: "EnerVerse_FT", metrics: [0.9427, 0.5356, 0.5363, 0.5957, 0.0691, 0.1800, 0.8638, 0.9778], motion_sum: 1.6676, semantics_sum: 2.0907, overall: 4.7010 },
    PublishedRow { model: "LTX_FT", metrics: [0.9436, 0.4758, 0.6197, 0.5208, 0.0162, 0.1740, 0.8548, 0.9444], motion_sum: 1.6163, semantics_sum: 1.9894, overall: 4.5493 },
    PublishedRow { model: "Kling", metrics: [0.8888, 0.3231, 0.3047, 0.3162, 0.0493, 0.1675, 0.8535, 0.9667], motion_sum: 0.9440, semantics_sum: 2.0370, overall: 3.8698 },
    PublishedRow { model: "Hailuo", metrics: [0.8577, 0.2229, 0.1344, 0.1789, 0.0370, 0.1848, 0.8857, 0.9111], motion_sum: 0.5362, semantics_sum: 2.0186, overall: 3.4125 },
    PublishedRow { model: "COSMOS", metrics: [0.7963, 0.2500, 0.2052, 0.2533, 0.0803, 0.1230, 0.8458, 0.7333], motion_sum: 0.7085, semantics_sum: 1.7824, overall: 3.2872 },
    PublishedRow { model: "OpenSora", metrics: [0.9210, 0.1548, 0.0474, 0.1420, 0.0415, 0.1598, 0.8505, 0.8222], motion_sum: 0.3442, semantics_sum: 1.8739, overall: 3.1392 },
    PublishedRow { model: "LTX", metrics: [0.9156, 0.1575, 0.1002, 0.1425, 0.0174, 0.0687, 0.8324, 0.7333], motion_sum: 0.4002, semantics_sum: 1.6518, overall: 2.9676 },
];

/// Quality settings of one synthetic model.
struct SynthModel {
    id: &'static str,
    track_noise: f64,
    scene_drift: f32,
    spread: f32,
    step_noise: f32,
}

const MODELS: [SynthModel; 3] = [
    SynthModel { id: "alpha", track_noise: 1.5, scene_drift: 0.02, spread: 0.30, step_noise: 0.10 },
    SynthModel { id: "beta", track_noise: 6.0, scene_drift: 0.08, spread: 0.15, step_noise: 0.35 },
    SynthModel { id: "gamma", track_noise: 18.0, scene_drift: 0.25, spread: 0.05, step_noise: 0.80 },
];

const TASKS: [(&str, &str); 2] = [
    ("pick_cup", "pick up the red cup and place it on the tray"),
    ("open_drawer", "pull the top drawer open with the right gripper"),
];

/// A 1×1 RGBA PNG used as the initial observation.
const PIXEL_PNG: &[u8] = &[
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52, 0x00, 0x00, 0x00,
    0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x06, 0x00, 0x00, 0x00, 0x1f, 0x15, 0xc4, 0x89, 0x00, 0x00, 0x00, 0x0d, 0x49,
    0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x00, 0x01, 0x00, 0x00, 0x05, 0x00, 0x01, 0x0d, 0x0a, 0x2d, 0xb4, 0x00, 0x00,
    0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82,
];

const STEP_CAPTIONS: [&str; 4] = [
    "move the gripper above the target",
    "lower the gripper",
    "close the gripper on the target",
    "carry the target to the goal",
];

const EPISODES: usize = 2;
const CANDIDATES: usize = 3;
const FRAMES: usize = 36;
const DIM: usize = 8;

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn write_xy(path: &Path, pts: &[(f64, f64)]) {
    let mut out = String::from("t,x,y\n");
    for (i, (x, y)) in pts.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", round3(i as f64 / 30.0), round3(*x), round3(*y)));
    }
    fs::write(path, out).unwrap();
}

fn uniform_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f32> {
    (0..n).map(|_| rng.random_range(-1.0f32..1.0)).collect()
}

fn tensor(path: &Path, kind: EmbeddingKind, shape: Vec<usize>, data: Vec<f32>) {
    write_embedding(&EmbeddingTensor::new(kind, shape, data).unwrap(), path).unwrap();
}

fn gt_track(task: usize, ep: usize, hand: usize) -> Vec<(f64, f64)> {
    let reach = if hand == 1 { 260.0 } else { 40.0 };
    (0..FRAMES)
        .map(|i| {
            let s = i as f64 / (FRAMES - 1) as f64;
            let w = 0.5 - 0.5 * (std::f64::consts::PI * s).cos();
            let x0 = if hand == 1 { 380.0 } else { 160.0 };
            (
                x0 - 20.0 * task as f64 + reach * w * (1.0 + 0.1 * ep as f64),
                400.0 - 0.6 * reach * (std::f64::consts::PI * w).sin() - 15.0 * ep as f64,
            )
        })
        .collect()
}

/// Writes a small three-model benchmark (2 tasks × 2 episodes × 3
/// candidates) with every evidence file under `dir`. Output depends only on
/// the code, so rerunning reproduces the same bytes.
pub fn write_bench(dir: &Path) {
    for sub in ["gt", "cand"] {
        fs::create_dir_all(dir.join(sub)).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let mut tasks = Vec::new();
    for (ti, (task_id, instruction)) in TASKS.iter().enumerate() {
        let global_base = uniform_vec(&mut rng, DIM);
        let mut episodes = Vec::new();
        for ep in 0..EPISODES {
            let stem = format!("{task_id}_ep{ep}");
            let left = gt_track(ti, ep, 0);
            let right = gt_track(ti, ep, 1);
            fs::write(dir.join(format!("gt/{stem}_first.png")), PIXEL_PNG).unwrap();
            write_xy(&dir.join(format!("gt/{stem}_left.csv")), &left);
            write_xy(&dir.join(format!("gt/{stem}_right.csv")), &right);
            let gt_steps = uniform_vec(&mut rng, 4 * DIM);
            tensor(&dir.join(format!("gt/{stem}_steps.ewmb")), EmbeddingKind::StepText, vec![4, DIM], gt_steps.clone());
            let patches = uniform_vec(&mut rng, 4 * DIM);

            let mut candidates = Vec::new();
            for m in &MODELS {
                for c in 0..CANDIDATES {
                    let cstem = format!("cand/{}_{stem}_c{c}", m.id);
                    let offset = (rng.random_range(-1.0..1.0) * m.track_noise, rng.random_range(-1.0..1.0) * m.track_noise);
                    let track: Vec<(f64, f64)> = right
                        .iter()
                        .map(|&(x, y)| {
                            (
                                x + offset.0 + rng.random_range(-1.0..1.0) * m.track_noise,
                                y + offset.1 + rng.random_range(-1.0..1.0) * m.track_noise,
                            )
                        })
                        .collect();
                    write_xy(&dir.join(format!("{cstem}.csv")), &track);

                    let mut scene = Vec::with_capacity(6 * patches.len());
                    for f in 0..6 {
                        for &v in &patches {
                            scene.push(v + m.scene_drift * f as f32 * rng.random_range(-1.0f32..1.0));
                        }
                    }
                    tensor(&dir.join(format!("{cstem}_scene.ewmb")), EmbeddingKind::PatchPerFrame, vec![6, 4, DIM], scene);

                    let global: Vec<f32> = global_base.iter().map(|v| v + m.spread * rng.random_range(-1.0f32..1.0)).collect();
                    tensor(&dir.join(format!("{cstem}_global.ewmb")), EmbeddingKind::GlobalVideo, vec![DIM], global);

                    let steps = if m.id == "gamma" && c % 2 == 1 { 3 } else { 4 };
                    let rows: Vec<f32> = gt_steps[..steps * DIM]
                        .iter()
                        .map(|v| v + m.step_noise * rng.random_range(-1.0f32..1.0))
                        .collect();
                    tensor(&dir.join(format!("{cstem}_steps.ewmb")), EmbeddingKind::StepText, vec![steps, DIM], rows);

                    let caption = match m.id {
                        "alpha" => instruction.to_string(),
                        "beta" => instruction.replacen(" the", "", 1),
                        _ => "a gripper moves near the table".to_string(),
                    };
                    let pass = match m.id {
                        "alpha" => true,
                        "beta" => !(ep == 1 && c == 2),
                        _ => (c + ep) % 2 == 0,
                    };
                    candidates.push(json!({
                        "model_id": m.id,
                        "trajectory_path": format!("{cstem}.csv"),
                        "scene_embeddings_path": format!("{cstem}_scene.ewmb"),
                        "global_video_embedding_path": format!("{cstem}_global.ewmb"),
                        "caption": caption,
                        "step_captions": &STEP_CAPTIONS[..steps],
                        "step_text_embeddings_path": format!("{cstem}_steps.ewmb"),
                        "logic_verdict": {"verdict": if pass { "pass" } else { "violation" }, "tags": []},
                    }));
                }
            }
            episodes.push(json!({
                "episode_id": format!("ep{ep}"),
                "instruction": instruction,
                "initial_images": [format!("gt/{stem}_first.png")],
                "gt_step_captions": STEP_CAPTIONS,
                "gt_trajectory_path": {"left": format!("gt/{stem}_left.csv"), "right": format!("gt/{stem}_right.csv")},
                "gt_step_embeddings_path": format!("gt/{stem}_steps.ewmb"),
                "candidates": candidates,
            }));
        }
        tasks.push(json!({"task_id": task_id, "episodes": episodes}));
    }
    let manifest = json!({
        "schema_version": 1,
        "models": MODELS.iter().map(|m| m.id).collect::<Vec<_>>(),
        "tasks": tasks,
    });
    write_json(&dir.join("manifest.json"), &manifest);

    let human = json!({
        "samples": [
            ["alpha", "beta", "gamma"],
            ["alpha", "gamma", "beta"],
            ["beta", "alpha", "gamma"],
            ["alpha", "beta", "gamma"],
        ]
    });
    write_json(&dir.join("human_ranking.json"), &human);
}

/// A one-model, one-episode benchmark whose candidates reproduce the
/// ground truth exactly.
pub fn write_perfect(dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    let track = gt_track(0, 0, 1);
    write_xy(&dir.join("gt.csv"), &track);
    fs::write(dir.join("first.png"), PIXEL_PNG).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let steps = uniform_vec(&mut rng, 4 * DIM);
    tensor(&dir.join("steps.ewmb"), EmbeddingKind::StepText, vec![4, DIM], steps);
    let frame = uniform_vec(&mut rng, 4 * DIM);
    tensor(&dir.join("scene.ewmb"), EmbeddingKind::PatchPerFrame, vec![5, 4, DIM], frame.repeat(5));
    let global = uniform_vec(&mut rng, DIM);
    tensor(&dir.join("global.ewmb"), EmbeddingKind::GlobalVideo, vec![DIM], global);
    let instruction = "stack the blue block on the green block";
    let candidate = json!({
        "model_id": "oracle",
        "trajectory_path": "gt.csv",
        "scene_embeddings_path": "scene.ewmb",
        "global_video_embedding_path": "global.ewmb",
        "caption": instruction,
        "step_captions": STEP_CAPTIONS,
        "step_text_embeddings_path": "steps.ewmb",
        "logic_verdict": {"verdict": "pass"},
    });
    let manifest = json!({
        "schema_version": 1,
        "models": ["oracle"],
        "tasks": [{"task_id": "stack", "episodes": [{
            "episode_id": "ep0",
            "instruction": instruction,
            "initial_images": ["first.png"],
            "gt_step_captions": STEP_CAPTIONS,
            "gt_trajectory_path": "gt.csv",
            "gt_step_embeddings_path": "steps.ewmb",
            "candidates": [candidate.clone(), candidate.clone(), candidate],
        }]}],
    });
    write_json(&dir.join("manifest.json"), &manifest);
}

/// Bimanual end-effector tracks for the diverse sampler: three almost
/// identical demonstrations and one that covers different cells.
pub fn write_sampler_dir(dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    let track = |x0: f64, y0: f64, jitter: f64| -> String {
        let mut out = String::from("x,y,z\n");
        for i in 0..20 {
            let s = i as f64 / 19.0;
            out.push_str(&format!(
                "{},{},{}\n",
                round3(x0 + 0.4 * s + jitter),
                round3(y0 + 0.1 * (3.0 * s).sin()),
                round3(0.2 + 0.15 * s)
            ));
        }
        out
    };
    for (i, jitter) in [0.0, 0.004, 0.008].iter().enumerate() {
        fs::write(dir.join(format!("demo{i}.left.csv")), track(0.1, 0.1, *jitter)).unwrap();
        fs::write(dir.join(format!("demo{i}.right.csv")), track(0.6, 0.1, *jitter)).unwrap();
    }
    fs::write(dir.join("demo3.left.csv"), track(0.1, 0.9, 0.0)).unwrap();
    fs::write(dir.join("demo3.right.csv"), track(0.6, 0.9, 0.0)).unwrap();
}

fn write_json(path: &Path, v: &Value) {
    fs::write(path, serde_json::to_string_pretty(v).unwrap() + "\n").unwrap();
}

/// Every file under `dir`, relative path to bytes.
pub fn snapshot(dir: &Path) -> std::collections::BTreeMap<String, Vec<u8>> {
    let mut out = std::collections::BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    out
}

/// Path of a checked-in fixture directory.
pub fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

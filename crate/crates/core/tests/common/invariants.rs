//! Property checks over every module, each returning `Err` with the first
//! counterexample. Seeds are fixed so runs are reproducible.

use std::collections::BTreeMap;

use ewmeval::data::{
    load_embedding, load_trajectory, write_embedding, write_trajectory_csv, EmbeddingKind, EmbeddingTensor, Point3,
    Trajectory, Verdict,
};
use ewmeval::diversity::{greedy_diverse_select, pair_iou, GridFrame, Occupancy, SimilarityMatrix};
use ewmeval::motion::{
    amplitude_ratio, dtw_cost, ndtw_score, primary_hand, spatial_extent, symmetric_hausdorff, wasserstein_1d,
    DynConfig, DynTerms, NdtwNormalization,
};
use ewmeval::report::{
    aggregate, kendall_tau_b, normalize_scores, perturb_seeded, spearman, EpisodeScores, GroupDiversity, MissingPolicy,
    NormPolicy, Perturbation,
};
use ewmeval::scene::scene_score;
use ewmeval::semantic::{bleu, logic_score, semantic_diversity_vectors, step_alignment_rows, StepMatching};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use super::oracles;

const CASES: u32 = 256;

fn check<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn xy(max_len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-500.0..500.0f64, -500.0..500.0f64), 1..max_len)
}

fn xyz_unit(max_len: usize) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), 1..max_len)
}

fn spatial(pts: &[(f64, f64, f64)]) -> Trajectory {
    Trajectory::spatial(pts.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect(), 30.0).unwrap()
}

fn samples(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0..100.0f64, 1..max_len)
}

fn words(vocab: usize, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec((0..vocab).prop_map(|i| format!("w{i}")), len)
}

fn rows(max_rows: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f32>>> {
    prop::collection::vec(prop::collection::vec(0.1f32..1.0f32, dim..=dim), 1..max_rows)
}

/// A random orthonormal map built from Givens rotations.
fn rotation(dim: usize, angles: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for &(a, b, t) in angles {
        let (a, b) = (a % dim, b % dim);
        if a == b {
            continue;
        }
        let (c, s) = (t.cos(), t.sin());
        for row in m.iter_mut() {
            let (x, y) = (row[a], row[b]);
            row[a] = c * x - s * y;
            row[b] = s * x + c * y;
        }
    }
    m
}

fn rotate(v: &[f32], m: &[Vec<f64>]) -> Vec<f32> {
    let dim = m.len();
    v.chunks(dim)
        .flat_map(|x| (0..dim).map(move |j| (0..dim).map(|i| x[i] as f64 * m[i][j]).sum::<f64>() as f32))
        .collect()
}

fn angles() -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    prop::collection::vec((0..8usize, 0..8usize, -3.1..3.1f64), 1..10)
}

pub fn hausdorff_symmetry_and_order() -> Result<(), String> {
    check(CASES, (xy(30), xy(30)), |(a, b)| {
        let (ta, tb) = (Trajectory::from_xy(&a).unwrap(), Trajectory::from_xy(&b).unwrap());
        let d = symmetric_hausdorff(&ta, &tb).unwrap();
        prop_assert_eq!(d.to_bits(), symmetric_hausdorff(&tb, &ta).unwrap().to_bits());
        prop_assert_eq!(symmetric_hausdorff(&ta, &ta).unwrap(), 0.0);
        prop_assert_eq!(d.to_bits(), symmetric_hausdorff(&ta.reversed(), &tb).unwrap().to_bits());
        Ok(())
    })
}

pub fn ndtw_self_maximal() -> Result<(), String> {
    check(CASES, (xy(25), xy(25)), |(a, b)| {
        let (g, p) = (Trajectory::from_xy(&a).unwrap(), Trajectory::from_xy(&b).unwrap());
        for norm in [NdtwNormalization::PathLength, NdtwNormalization::SumOfLengths] {
            let own = ndtw_score(&g, &g, norm, 1e-8).unwrap();
            prop_assert!(ndtw_score(&g, &p, norm, 1e-8).unwrap() <= own);
        }
        let doubled: Vec<(f64, f64)> = a.iter().flat_map(|&q| [q, q]).collect();
        prop_assert_eq!(dtw_cost(&g, &Trajectory::from_xy(&doubled).unwrap()).unwrap().cost, 0.0);
        Ok(())
    })
}

pub fn wasserstein_metric_axioms() -> Result<(), String> {
    check(CASES, (samples(20), samples(20), samples(20), -50.0..50.0f64), |(u, w, z, c)| {
        let d = |a: &[f64], b: &[f64]| wasserstein_1d(a, b).unwrap();
        prop_assert_eq!(d(&u, &u), 0.0);
        prop_assert!((d(&u, &w) - d(&w, &u)).abs() <= 1e-9);
        prop_assert!(d(&u, &z) <= d(&u, &w) + d(&w, &z) + 1e-9);
        let shift = |s: &[f64]| s.iter().map(|v| v + c).collect::<Vec<_>>();
        prop_assert!((d(&shift(&u), &shift(&w)) - d(&u, &w)).abs() <= 1e-9);
        Ok(())
    })
}

pub fn amplitude_ratio_bounds() -> Result<(), String> {
    let ints = || prop::collection::vec(-50i32..50, 1..12);
    check(CASES, (ints(), ints()), |(a, b)| {
        let (a, b): (Vec<f64>, Vec<f64>) = (a.iter().map(|&v| v as f64).collect(), b.iter().map(|&v| v as f64).collect());
        let r = amplitude_ratio(&a, &b, 1e-8).unwrap();
        prop_assert!(r > 0.0 && r <= 1.0);
        let range = |s: &[f64]| s.iter().copied().fold(f64::MIN, f64::max) - s.iter().copied().fold(f64::MAX, f64::min);
        prop_assert_eq!(r == 1.0, range(&a) == range(&b));
        Ok(())
    })
}

pub fn dyn_terms_monotone() -> Result<(), String> {
    check(CASES, (0.01..1.0f64, 0.0..10.0f64, 0.01..1.0f64, 0.0..10.0f64, 0.01..5.0f64), |(vr, vd, ar, ad, delta)| {
        let cfg = DynConfig::default();
        let t = DynTerms {
            velocity_ratio: vr,
            velocity_distance: vd,
            accel_ratio: ar,
            accel_distance: ad,
        };
        let base = t.score(&cfg);
        let farther_v = DynTerms { velocity_distance: vd + delta, ..t }.score(&cfg);
        let farther_a = DynTerms { accel_distance: ad + delta, ..t }.score(&cfg);
        let wider = DynTerms { velocity_ratio: vr + delta, ..t }.score(&cfg);
        prop_assert!(farther_v < base && farther_a < base && wider > base);
        Ok(())
    })
}

pub fn reversal_preserves_hausdorff() -> Result<(), String> {
    let long = || prop::collection::vec((-500.0..500.0f64, -500.0..500.0f64), 3..30);
    check(CASES, (xy(30), long()), |(a, b)| {
        let (g, p) = (Trajectory::from_xy(&a).unwrap(), Trajectory::from_xy(&b).unwrap());
        let r = perturb_seeded(&p, &Perturbation::Reverse, 1).unwrap();
        prop_assert_eq!(
            symmetric_hausdorff(&g, &p).unwrap().to_bits(),
            symmetric_hausdorff(&g, &r).unwrap().to_bits()
        );
        Ok(())
    })
}

pub fn primary_hand_is_wider() -> Result<(), String> {
    check(CASES, (xy(25), xy(25)), |(a, b)| {
        let (l, r) = (Trajectory::from_xy(&a).unwrap(), Trajectory::from_xy(&b).unwrap());
        let (dl, dr) = (oracles::diameter(&l.rows()), oracles::diameter(&r.rows()));
        prop_assert!((spatial_extent(&l) - dl).abs() <= 1e-9 * (1.0 + dl));
        let pick = primary_hand(Some(&l), Some(&r)).unwrap();
        if (dl - dr).abs() > 1e-6 {
            let wider = if dr > dl { &r } else { &l };
            prop_assert!(std::ptr::eq(pick, wider));
        }
        Ok(())
    })
}

pub fn voxel_iou_symmetry_and_bounds() -> Result<(), String> {
    check(CASES, (xyz_unit(15), xyz_unit(15), xyz_unit(15), xyz_unit(15)), |(a, b, c, d)| {
        let ts = [spatial(&a), spatial(&b), spatial(&c), spatial(&d)];
        let frame = GridFrame::enclosing(ts.iter(), 0.1).unwrap();
        let g: Vec<_> = ts.iter().map(|t| frame.grid(Some(t), Occupancy::Binary).unwrap()).collect();
        let ab = pair_iou((&g[0], &g[1]), (&g[2], &g[3]), 1e-8).unwrap();
        let ba = pair_iou((&g[2], &g[3]), (&g[0], &g[1]), 1e-8).unwrap();
        prop_assert_eq!(ab.to_bits(), ba.to_bits());
        prop_assert!((0.0..1.0).contains(&ab));

        let far: Vec<(f64, f64, f64)> = c.iter().map(|&(x, y, z)| (x + 10.0, y, z)).collect();
        let far2: Vec<(f64, f64, f64)> = d.iter().map(|&(x, y, z)| (x + 10.0, y, z)).collect();
        let ts = [spatial(&a), spatial(&b), spatial(&far), spatial(&far2)];
        let frame = GridFrame::enclosing(ts.iter(), 0.1).unwrap();
        let g: Vec<_> = ts.iter().map(|t| frame.grid(Some(t), Occupancy::Counts).unwrap()).collect();
        prop_assert_eq!(pair_iou((&g[0], &g[1]), (&g[2], &g[3]), 1e-8).unwrap(), 0.0);
        Ok(())
    })
}

pub fn voxel_translation_consistent() -> Result<(), String> {
    let dyadic = || prop::collection::vec((0u32..64, 0u32..64, 0u32..64), 1..15);
    check(CASES, (dyadic(), dyadic(), (-8i32..8, -8i32..8, -8i32..8)), |(a, b, (sx, sy, sz))| {
        let size = 1.0 / 16.0;
        let to = |p: &[(u32, u32, u32)], off: (f64, f64, f64)| -> Vec<(f64, f64, f64)> {
            p.iter().map(|&(x, y, z)| (x as f64 / 64.0 + off.0, y as f64 / 64.0 + off.1, z as f64 / 64.0 + off.2)).collect()
        };
        let off = (sx as f64 * size, sy as f64 * size, sz as f64 * size);
        let iou = |off: (f64, f64, f64)| {
            let (ta, tb) = (spatial(&to(&a, off)), spatial(&to(&b, off)));
            let frame = GridFrame::enclosing([&ta, &tb], size).unwrap();
            let (ga, gb) = (frame.grid(Some(&ta), Occupancy::Binary).unwrap(), frame.grid(Some(&tb), Occupancy::Binary).unwrap());
            let o = frame.origin;
            let pts: Vec<[f64; 3]> = to(&a, off).iter().map(|&(x, y, z)| [x, y, z]).collect();
            let expect = oracles::floor_cells(&pts, [o.x, o.y, o.z], size, frame.dims);
            let got: std::collections::BTreeSet<usize> = ga.cells().map(|(i, _)| i).collect();
            (pair_iou((&ga, &ga), (&gb, &gb), 1e-8).unwrap(), expect == got)
        };
        let (before, cells_ok) = iou((0.0, 0.0, 0.0));
        let (after, cells_ok2) = iou(off);
        prop_assert!(cells_ok && cells_ok2);
        prop_assert_eq!(before.to_bits(), after.to_bits());
        Ok(())
    })
}

pub fn greedy_matches_recomputation() -> Result<(), String> {
    let strat = (4usize..12).prop_flat_map(|n| (Just(n), prop::collection::vec(0.0..1.0f64, n * n), 1..=n));
    check(CASES, strat, |(n, raw, k)| {
        let s: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { raw[i.min(j) * n + i.max(j)] }).collect())
            .collect();
        let m = SimilarityMatrix::new(n, s.concat()).unwrap();
        let got = greedy_diverse_select(&m, k).unwrap();
        prop_assert_eq!(&got, &greedy_diverse_select(&m, k).unwrap());
        prop_assert_eq!(got, oracles::greedy(&s, k));
        Ok(())
    })
}

pub fn scene_rotation_invariant() -> Result<(), String> {
    let strat = (2usize..5, 1usize..4).prop_flat_map(|(f, p)| {
        (Just(f), Just(p), prop::collection::vec(0.1f32..1.0, f * p * 8), angles())
    });
    check(CASES, strat, |(frames, patches, data, ang)| {
        let m = rotation(8, &ang);
        let e = EmbeddingTensor::new(EmbeddingKind::PatchPerFrame, vec![frames, patches, 8], data.clone()).unwrap();
        let r = EmbeddingTensor::new(EmbeddingKind::PatchPerFrame, vec![frames, patches, 8], rotate(&data, &m)).unwrap();
        let (a, b) = (scene_score(&e).unwrap().aggregate, scene_score(&r).unwrap().aggregate);
        prop_assert!((a - b).abs() <= 1e-5, "{} vs {}", a, b);
        Ok(())
    })
}

pub fn scene_static_and_cut() -> Result<(), String> {
    let strat = (1usize..4).prop_flat_map(|p| (Just(p), prop::collection::vec(0.1f32..1.0, p * 8), prop::collection::vec(-1.0f32..-0.1, p * 8), 2usize..6));
    check(CASES, strat, |(patches, frame, other, frames)| {
        let still = EmbeddingTensor::new(EmbeddingKind::PatchPerFrame, vec![frames, patches, 8], frame.repeat(frames)).unwrap();
        let s = scene_score(&still).unwrap().aggregate;
        prop_assert!((s - 1.0).abs() <= 1e-12);
        let mut cut = frame.repeat(frames);
        cut[(frames - 1) * patches * 8..].copy_from_slice(&other);
        let cut = EmbeddingTensor::new(EmbeddingKind::PatchPerFrame, vec![frames, patches, 8], cut).unwrap();
        prop_assert!(scene_score(&cut).unwrap().aggregate < s - 0.05);
        Ok(())
    })
}

/// Identity holds whenever the tokens agree. For sequences of at most five
/// tokens any difference also breaks some clipped n-gram count up to order
/// four, so the converse is checked on that range.
pub fn bleu_identity() -> Result<(), String> {
    check(CASES, (words(5, 1..6), words(5, 1..6), words(40, 1..20)), |(a, b, long)| {
        prop_assert_eq!(bleu(&long, &long, 4).unwrap(), 1.0);
        prop_assert_eq!(bleu(&a, &a, 4).unwrap(), 1.0);
        let s = bleu(&a, &b, 4).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s == 1.0, a == b);
        Ok(())
    })
}

/// Deleting a token from a candidate does not raise the mean score.
pub fn bleu_deletion_in_expectation() -> Result<(), String> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let (mut before, mut after) = (0.0, 0.0);
    let trials = 400;
    for _ in 0..trials {
        let len = rng.random_range(8..16);
        let reference: Vec<String> = (0..len).map(|_| format!("w{}", rng.random_range(0..30))).collect();
        let mut cand = reference.clone();
        for tok in cand.iter_mut() {
            if rng.random_bool(0.2) {
                *tok = format!("w{}", rng.random_range(0..30));
            }
        }
        before += bleu(&cand, &reference, 4).unwrap();
        cand.remove(rng.random_range(0..cand.len()));
        after += bleu(&cand, &reference, 4).unwrap();
    }
    if after <= before {
        Ok(())
    } else {
        Err(format!("mean rose from {} to {}", before / trials as f64, after / trials as f64))
    }
}

pub fn step_alignment_symmetric() -> Result<(), String> {
    check(CASES, (rows(6, 4), rows(6, 4)), |(a, b)| {
        let (ra, rb): (Vec<&[f32]>, Vec<&[f32]>) = (a.iter().map(|v| v.as_slice()).collect(), b.iter().map(|v| v.as_slice()).collect());
        let ab = step_alignment_rows(&ra, &rb, StepMatching::Index).unwrap();
        prop_assert_eq!(ab.to_bits(), step_alignment_rows(&rb, &ra, StepMatching::Index).unwrap().to_bits());
        let g = step_alignment_rows(&ra, &rb, StepMatching::Greedy).unwrap();
        prop_assert!((g - step_alignment_rows(&rb, &ra, StepMatching::Greedy).unwrap()).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab) && (0.0..=1.0).contains(&g));
        Ok(())
    })
}

pub fn diversity_rotation_and_permutation() -> Result<(), String> {
    let strat = (2usize..7).prop_flat_map(|n| (prop::collection::vec(prop::collection::vec(-1.0f32..1.0, 8..=8), n..=n), angles()));
    check(CASES, strat, |(vs, ang)| {
        if vs.iter().any(|v| v.iter().all(|x| x.abs() < 1e-3)) {
            return Ok(());
        }
        let refs: Vec<&[f32]> = vs.iter().map(|v| v.as_slice()).collect();
        let d = semantic_diversity_vectors(&refs).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        let rev: Vec<&[f32]> = refs.iter().rev().copied().collect();
        prop_assert!((semantic_diversity_vectors(&rev).unwrap() - d).abs() <= 1e-12);
        let m = rotation(8, &ang);
        let rot: Vec<Vec<f32>> = vs.iter().map(|v| rotate(v, &m)).collect();
        let rot_refs: Vec<&[f32]> = rot.iter().map(|v| v.as_slice()).collect();
        prop_assert!((semantic_diversity_vectors(&rot_refs).unwrap() - d).abs() <= 1e-5);
        Ok(())
    })
}

pub fn logic_score_is_a_fraction() -> Result<(), String> {
    check(CASES, prop::collection::vec(any::<bool>(), 1..100), |v| {
        let verdicts: Vec<Verdict> = v.iter().map(|&p| if p { Verdict::Pass } else { Verdict::Violation }).collect();
        let s = logic_score(&verdicts).unwrap();
        let scaled = s * v.len() as f64;
        prop_assert!((scaled - scaled.round()).abs() <= 1e-9);
        prop_assert_eq!(scaled.round() as usize, v.iter().filter(|&&p| p).count());
        Ok(())
    })
}

pub fn aggregate_sums_hold() -> Result<(), String> {
    let row = (0usize..4, prop::collection::vec(0.0..1.0f64, 7..=7));
    check(CASES, (prop::collection::vec(row, 4..30), prop::collection::vec(0.0..1.0f64, 4..=4)), |(eps, div)| {
        let mut episodes: Vec<EpisodeScores> = eps
            .iter()
            .enumerate()
            .map(|(i, (m, v))| EpisodeScores {
                model_id: format!("m{m}"),
                task_id: "t".into(),
                episode_id: format!("e{i}"),
                scene_c: Some(v[0]),
                hsd: Some(v[1]),
                dyn_: Some(v[2]),
                ndtw: Some(v[3]),
                bleu: Some(v[4]),
                clip: Some(v[5]),
                logic: Some(v[6]),
                ..Default::default()
            })
            .collect();
        let groups: Vec<GroupDiversity> = (0..4)
            .map(|m| GroupDiversity { model_id: format!("m{m}"), task_id: "t".into(), diversity: div[m] })
            .collect();
        let present: std::collections::BTreeSet<&String> = episodes.iter().map(|e| &e.model_id).collect();
        let groups: Vec<GroupDiversity> = groups.into_iter().filter(|g| present.contains(&g.model_id)).collect();
        let report = aggregate(&episodes, &groups, MissingPolicy::Error).unwrap();
        for r in &report.models {
            prop_assert_eq!(r.motion_sum, r.hsd + r.dyn_ + r.ndtw);
            prop_assert_eq!(r.semantics_sum, r.diversity + r.bleu + r.clip + r.logics);
            prop_assert_eq!(r.overall, r.scene_c + r.motion_sum + r.semantics_sum);
        }
        episodes.reverse();
        let again = aggregate(&episodes, &groups, MissingPolicy::Error).unwrap();
        for (a, b) in report.models.iter().zip(&again.models) {
            prop_assert_eq!(&a.model_id, &b.model_id);
            prop_assert!((a.overall - b.overall).abs() <= 1e-12);
        }
        Ok(())
    })
}

pub fn normalize_preserves_order() -> Result<(), String> {
    let policy = prop_oneof![Just(NormPolicy::MinMax), (0.1..50.0f64).prop_map(|c| NormPolicy::ClampCeiling { ceiling: c })];
    check(CASES, (prop::collection::vec(-100.0..100.0f64, 1..30), policy), |(raw, policy)| {
        let out = normalize_scores(&raw, policy).unwrap().values;
        for i in 0..raw.len() {
            prop_assert!((0.0..=1.0).contains(&out[i]));
            for j in 0..raw.len() {
                if raw[i] < raw[j] {
                    prop_assert!(out[i] <= out[j]);
                }
                if raw[i] == raw[j] {
                    prop_assert_eq!(out[i], out[j]);
                }
            }
        }
        Ok(())
    })
}

pub fn rank_correlation_antisymmetric() -> Result<(), String> {
    let ints = |n| prop::collection::vec(0i32..6, n..=n);
    check(CASES, (2usize..9).prop_flat_map(move |n| (ints(n), ints(n))), |(a, b)| {
        let (a, b): (Vec<f64>, Vec<f64>) = (a.iter().map(|&v| v as f64).collect(), b.iter().map(|&v| v as f64).collect());
        let neg: Vec<f64> = b.iter().map(|v| -v).collect();
        match (spearman(&a, &b), spearman(&a, &neg)) {
            (Some(x), Some(y)) => prop_assert!((x + y).abs() <= 1e-12),
            (None, None) => {}
            other => prop_assert!(false, "{:?}", other),
        }
        if let (Some(x), Some(y)) = (kendall_tau_b(&a, &b), kendall_tau_b(&a, &neg)) {
            prop_assert!((x + y).abs() <= 1e-12);
        }
        if let Some(x) = spearman(&a, &a) {
            prop_assert!((x - 1.0).abs() <= 1e-12);
        }
        Ok(())
    })
}

pub fn embedding_round_trip() -> Result<(), String> {
    let strat = (0u8..4, prop::collection::vec(1usize..5, 1..4)).prop_flat_map(|(k, mut shape)| {
        if k == 0 {
            shape.resize(3, 2);
        }
        let n = shape.iter().product();
        (Just(k), Just(shape), prop::collection::vec(-1e6f32..1e6, n..=n))
    });
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("t.ewmb");
    check(64, strat, |(k, shape, data)| {
        let t = EmbeddingTensor::new(EmbeddingKind::from_code(k).unwrap(), shape, data).unwrap();
        let bytes = t.to_bytes();
        let back = EmbeddingTensor::from_bytes(&bytes).unwrap();
        prop_assert_eq!(&back, &t);
        write_embedding(&t, &path).unwrap();
        let on_disk = std::fs::read(&path).unwrap();
        prop_assert_eq!(&on_disk, &bytes);
        let loaded = load_embedding(&path).unwrap();
        let bits = |t: &EmbeddingTensor| t.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&loaded), bits(&t));
        prop_assert_eq!(std::fs::read(&path).unwrap(), on_disk);
        Ok(())
    })
}

pub fn trajectory_round_trip() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("t.csv");
    check(64, xy(40), |pts| {
        let t = Trajectory::from_xy(&pts).unwrap();
        write_trajectory_csv(&t, &path).unwrap();
        let back = load_trajectory(&path).unwrap();
        prop_assert_eq!(back.rows(), t.rows());
        prop_assert!((back.frame_rate() - 30.0).abs() < 1e-6);
        Ok(())
    })
}

/// `evaluate` on the checked-in benchmark writes identical bytes with one
/// worker and with eight.
pub fn parallel_rerun_identical() -> Result<(), String> {
    let manifest = super::fixtures::fixture("bench").join("manifest.json");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for jobs in ["1", "8"] {
        let out = dir.path().join(format!("jobs{jobs}"));
        let code = ewmeval::cli::run_from([
            "ewmeval",
            "evaluate",
            "--manifest",
            manifest.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--jobs",
            jobs,
            "--no-cache",
        ]);
        if code != 0 {
            return Err(format!("evaluate --jobs {jobs} exited {code}"));
        }
        let files: BTreeMap<String, Vec<u8>> = ["report.json", "report.csv", "report.md"]
            .iter()
            .map(|f| (f.to_string(), std::fs::read(out.join(f)).unwrap()))
            .collect();
        outputs.push(files);
    }
    if outputs[0] == outputs[1] {
        Ok(())
    } else {
        Err("reports differ between --jobs 1 and --jobs 8".into())
    }
}

pub type Check = fn() -> Result<(), String>;

pub const ALL: &[(&str, Check)] = &[
    ("hausdorff symmetric, zero on self, order free", hausdorff_symmetry_and_order),
    ("ndtw maximal on self, repetition absorbed", ndtw_self_maximal),
    ("wasserstein symmetric, triangle, translation", wasserstein_metric_axioms),
    ("amplitude ratio in (0, 1], 1 iff equal ranges", amplitude_ratio_bounds),
    ("dyn score monotone in its terms", dyn_terms_monotone),
    ("reversal keeps hausdorff bit-identical", reversal_preserves_hausdorff),
    ("primary hand has the larger hull diameter", primary_hand_is_wider),
    ("voxel iou symmetric, in [0, 1), 0 when disjoint", voxel_iou_symmetry_and_bounds),
    ("voxel cells follow lattice translation", voxel_translation_consistent),
    ("greedy selection deterministic and recomputable", greedy_matches_recomputation),
    ("scene score rotation invariant", scene_rotation_invariant),
    ("scene score 1 when static, drops on a cut", scene_static_and_cut),
    ("bleu identity", bleu_identity),
    ("bleu does not rise under deletion", bleu_deletion_in_expectation),
    ("step alignment symmetric", step_alignment_symmetric),
    ("diversity rotation and permutation invariant", diversity_rotation_and_permutation),
    ("logic score times n is the pass count", logic_score_is_a_fraction),
    ("aggregate sums and order independence", aggregate_sums_hold),
    ("normalize preserves order", normalize_preserves_order),
    ("rank correlation antisymmetric", rank_correlation_antisymmetric),
    ("embedding tensors round-trip bit-exact", embedding_round_trip),
    ("trajectory csv round-trip", trajectory_round_trip),
    ("evaluate identical at one and eight workers", parallel_rerun_identical),
];

//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any enforceable criterion fails.
//!
//! ```text
//! cargo test --test acceptance
//! ```

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rrvqa::features::{dct2d, temporal_pool, FeatureExtractor};
use rrvqa::gbt::{self, GbtParams, Node, TrainingSet};
use rrvqa::metrics;
use rrvqa::pipeline::analyze_pair;
use rrvqa::ssim::{ssim_frame, ssim_sequence};
use rrvqa::synth::{generate_content, generate_renditions, pseudo_mos, SynthConfig};
use rrvqa::tuning::{random_search, SearchSpace};
use rrvqa::video::{normalize_bit_depth, NormalizedSequence, Plane};

use common::*;

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
    /// A failure that only reflects the host (too few cores to measure).
    hardware_bound: bool,
}

fn line(id: &'static str, pass: bool, detail: impl Into<String>) -> Line {
    Line {
        id,
        pass,
        detail: detail.into(),
        hardware_bound: false,
    }
}

// ---------------------------------------------------------------- 1

fn c1_synthetic_study() -> Vec<Line> {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let corpus_s = corpus.to_string_lossy().into_owned();

    run_ok(&[
        "synth",
        "--output",
        &corpus_s,
        "--contents",
        "12",
        "--levels",
        "5",
        "--width",
        "64",
        "--height",
        "64",
        "--frames",
        "30",
        "--seed",
        "0",
    ]);
    let manifest = corpus.join("manifest.csv").to_string_lossy().into_owned();
    run_ok(&[
        "features",
        "--input",
        &manifest,
        "--output",
        &p("features.csv"),
    ]);

    // 70% of 12 contents, rounded: contents 0..8 train, 8..12 are held out.
    let train_contents = (12.0f64 * 0.7).round() as usize;
    let text = std::fs::read_to_string(p("features.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let (mut train, mut held) = (vec![header.to_string()], vec![header.to_string()]);
    for l in lines {
        let content: usize = l[4..6].parse().unwrap();
        if content < train_contents {
            train.push(l.to_string());
        } else {
            held.push(l.to_string());
        }
    }
    std::fs::write(p("train.csv"), train.join("\n") + "\n").unwrap();
    std::fs::write(p("held.csv"), held.join("\n") + "\n").unwrap();

    run_ok(&[
        "train",
        "--input",
        &p("train.csv"),
        "--model",
        &p("model.json"),
    ]);
    run_ok(&[
        "predict",
        "--input",
        &p("held.csv"),
        "--model",
        &p("model.json"),
        "--output",
        &p("pred.csv"),
    ]);
    let report = run_ok(&["evaluate", "--input", &p("pred.csv")]);
    let values: Vec<f64> = report
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    let (srocc, plcc, n) = (values[0], values[1], values[4]);
    let elapsed = start.elapsed();

    vec![line(
        "1",
        srocc >= 0.85 && plcc >= 0.80 && elapsed <= Duration::from_secs(300) && n == 20.0,
        format!(
            "synthetic study: held-out SROCC {srocc:.4} (>= 0.85), PLCC {plcc:.4} (>= 0.80), n={n}, {:.1}s (<= 300s)",
            elapsed.as_secs_f64()
        ),
    )]
}

// ---------------------------------------------------------------- 2

fn c2_ssim_oracle() -> Vec<Line> {
    let mut rng = rng(2);
    let mut max_diff: f64 = 0.0;
    for i in 0..20 {
        let a = if i % 2 == 0 {
            random_plane(&mut rng, 64, 64)
        } else {
            textured_plane(&mut rng, 64, 64)
        };
        let b = if i % 4 < 2 {
            random_plane(&mut rng, 64, 64)
        } else {
            add_noise(&mut rng, &a, 12.0)
        };
        let fast = ssim_frame(&a, &b).unwrap();
        max_diff = max_diff.max((fast - naive_ssim(&a, &b)).abs());
    }
    let x = textured_plane(&mut rng, 64, 64);
    let self_err = (ssim_frame(&x, &x).unwrap() - 1.0).abs();

    let c1 = (0.01f64 * 255.0).powi(2);
    let closed = (2.0 * 100.0 * 110.0 + c1) / (100.0f64.powi(2) + 110.0f64.powi(2) + c1);
    let got = ssim_frame(&Plane::filled(64, 64, 100.0), &Plane::filled(64, 64, 110.0)).unwrap();

    vec![line(
        "2",
        max_diff <= 1e-6 && self_err <= 1e-9 && (got - 0.995477).abs() <= 1e-5 && (got - closed).abs() <= 1e-12,
        format!(
            "SSIM oracle: max |fast - naive| {max_diff:.2e} over 20 pairs (<= 1e-6), |SSIM(x,x) - 1| {self_err:.1e} (<= 1e-9), constant pair {got:.6} (0.995477 ± 1e-5)"
        ),
    )]
}

// ---------------------------------------------------------------- 3

fn c3_dct() -> Vec<Line> {
    let mut rng = rng(3);
    let mut parseval: f64 = 0.0;
    for _ in 0..100 {
        let block: Vec<f64> = (0..32 * 32).map(|_| rng.random_range(0.0..255.0)).collect();
        let coeffs = dct2d(&block, 32);
        let e_x: f64 = block.iter().map(|v| v * v).sum();
        let e_c: f64 = coeffs.iter().map(|v| v * v).sum();
        parseval = parseval.max(((e_x - e_c) / e_x).abs());
    }
    let mut naive: f64 = 0.0;
    for w in [4, 8] {
        for _ in 0..20 {
            let block: Vec<f64> = (0..w * w).map(|_| rng.random_range(0.0..255.0)).collect();
            for (a, b) in dct2d(&block, w).iter().zip(naive_dct2d(&block, w)) {
                naive = naive.max((a - b).abs());
            }
        }
    }
    vec![line(
        "3",
        parseval <= 1e-9 && naive <= 1e-9,
        format!("DCT: Parseval max rel err {parseval:.1e} on 100 32x32 blocks (<= 1e-9), max |dct2d - naive| {naive:.1e} for w in {{4,8}} (<= 1e-9)"),
    )]
}

// ---------------------------------------------------------------- 4

fn params(rounds: usize, depth: usize, lr: f64, lambda: f64) -> GbtParams {
    GbtParams {
        n_estimators: rounds,
        max_depth: depth,
        learning_rate: lr,
        subsample: 1.0,
        colsample_bytree: 1.0,
        lambda,
        gamma: 0.0,
        min_child_weight: 1.0,
        seed: 4,
    }
}

fn c4_gbt() -> Vec<Line> {
    let mut rng = rng(4);

    let mut split_mismatches = 0;
    let mut cases = 0;
    for _ in 0..300 {
        let n = rng.random_range(2..=16);
        let x: Vec<[f64; 8]> = (0..n)
            .map(|_| {
                std::array::from_fn(|f| {
                    if f % 2 == 0 {
                        rng.random_range(0..4) as f64
                    } else {
                        rng.random_range(-1.0..1.0)
                    }
                })
            })
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
        let mean = y.iter().sum::<f64>() / n as f64;
        let grad: Vec<f64> = y.iter().map(|v| mean - v).collect();
        let expected = brute_force_split(&x, &grad, 0.0);
        let model = gbt::train(&TrainingSet::new(x, y).unwrap(), &params(1, 1, 0.3, 0.0)).unwrap();
        let agrees = match (expected, model.trees[0].nodes[0]) {
            (None, Node::Leaf { .. }) => true,
            (
                Some((f, t, g)),
                Node::Split {
                    feature,
                    threshold,
                    gain,
                    ..
                },
            ) => feature == f && threshold == t && (gain - g).abs() <= 1e-9 * g.abs().max(1.0),
            _ => false,
        };
        cases += 1;
        if !agrees {
            split_mismatches += 1;
        }
    }

    let mut mean_err: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(2..=40);
        let x: Vec<[f64; 8]> = (0..n)
            .map(|_| std::array::from_fn(|_| rng.random_range(-3.0..3.0)))
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..5.0)).collect();
        let mean = y.iter().sum::<f64>() / n as f64;
        let model = gbt::train(
            &TrainingSet::new(x.clone(), y).unwrap(),
            &params(10, 0, 0.3, 1.0),
        )
        .unwrap();
        for row in &x {
            mean_err = mean_err.max((model.predict(row) - mean).abs());
        }
    }

    let mut worst_increase: f64 = 0.0;
    for seed in 0..10 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<[f64; 8]> = (0..60)
            .map(|_| std::array::from_fn(|_| r.random_range(0.0..1.0)))
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|z| z[0] * 4.0 + r.random_range(-0.5..0.5))
            .collect();
        let (_, history) =
            gbt::train_with_history(&TrainingSet::new(x, y).unwrap(), &params(80, 3, 0.3, 1.0))
                .unwrap();
        for pair in history.windows(2) {
            worst_increase = worst_increase.max(pair[1] - pair[0]);
        }
    }

    let x: Vec<[f64; 8]> = (0..50)
        .map(|_| std::array::from_fn(|_| rng.random_range(0.0..1.0)))
        .collect();
    let y: Vec<f64> = x
        .iter()
        .map(|z| 3.0 * z[0] - 2.0 * z[1] * z[1] + (3.0 * z[2]).sin())
        .collect();
    let (_, history) =
        gbt::train_with_history(&TrainingSet::new(x, y).unwrap(), &params(300, 3, 0.1, 1.0))
            .unwrap();
    let reached = history.iter().position(|&r| r <= 0.05);

    vec![line(
        "4",
        split_mismatches == 0 && mean_err <= 1e-12 && worst_increase <= 0.0 && reached.is_some(),
        format!(
            "GBT: {split_mismatches}/{cases} root splits differ from exhaustive search, depth-0 max |pred - mean| {mean_err:.1e} (<= 1e-12), max per-round RMSE increase {worst_increase:.1e} (<= 0), noiseless fixture RMSE <= 0.05 at round {}",
            reached.map_or("never".into(), |r| (r + 1).to_string())
        ),
    )]
}

// ---------------------------------------------------------------- 5

fn c5_metrics() -> Vec<Line> {
    let mut rng = rng(5);
    let mut worst: f64 = 0.0;
    let mut invariance: f64 = 0.0;
    for _ in 0..100 {
        let (a, b) = tied_vectors(&mut rng);
        let diffs = [
            metrics::srocc(&a, &b).unwrap() - oracle_spearman(&a, &b),
            metrics::krocc(&a, &b).unwrap() - oracle_kendall(&a, &b),
            metrics::plcc(&a, &b).unwrap() - oracle_pearson(&a, &b),
            metrics::rmse(&a, &b).unwrap() - oracle_rmse(&a, &b),
        ];
        worst = diffs.iter().fold(worst, |m, d| m.max(d.abs()));

        let warped: Vec<f64> = a.iter().map(|v| v.exp() * 3.0 + v.powi(3) - 7.0).collect();
        invariance = invariance
            .max((metrics::srocc(&warped, &b).unwrap() - metrics::srocc(&a, &b).unwrap()).abs())
            .max((metrics::krocc(&warped, &b).unwrap() - metrics::krocc(&a, &b).unwrap()).abs());
    }
    vec![line(
        "5",
        worst <= 1e-12 && invariance <= 1e-12,
        format!("metrics: max |impl - oracle| {worst:.1e} over 100 tied vectors (<= 1e-12), monotone-transform drift {invariance:.1e} (<= 1e-12)"),
    )]
}

// ---------------------------------------------------------------- 6

fn c6_determinism() -> Vec<Line> {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let runs = [("a", "1"), ("b", "8"), ("c", "1")];
    let mut identical = Vec::new();

    for (tag, threads) in runs {
        let corpus = p(&format!("corpus_{tag}"));
        run_ok(&[
            "--threads",
            threads,
            "--seed",
            "11",
            "synth",
            "--output",
            &corpus,
            "--contents",
            "4",
            "--levels",
            "3",
            "--frames",
            "10",
        ]);
    }
    let corpora: Vec<_> = runs
        .iter()
        .map(|(t, _)| dir_contents(Path::new(&p(&format!("corpus_{t}")))))
        .collect();
    identical.push((
        "corpus",
        corpora[0] == corpora[1] && corpora[0] == corpora[2],
    ));

    let manifest = format!("{}/manifest.csv", p("corpus_a"));
    let mut files: Vec<Vec<Vec<u8>>> = vec![Vec::new(); 4];
    for (tag, threads) in runs {
        let feats = p(&format!("features_{tag}.csv"));
        run_ok(&[
            "--threads",
            threads,
            "features",
            "--input",
            &manifest,
            "--output",
            &feats,
            "--diagnostics",
        ]);
        let model = p(&format!("model_{tag}.json"));
        run_ok(&[
            "--threads",
            threads,
            "--seed",
            "3",
            "train",
            "--input",
            &feats,
            "--model",
            &model,
            "--subsample",
            "0.7",
        ]);
        let trials = p(&format!("trials_{tag}.csv"));
        let best = p(&format!("best_{tag}.json"));
        run_ok(&[
            "--threads",
            threads,
            "--seed",
            "5",
            "tune",
            "--input",
            &feats,
            "--output",
            &trials,
            "--best",
            &best,
            "--trials",
            "6",
            "--folds",
            "3",
        ]);
        for (slot, path) in [feats, model, trials, best].iter().enumerate() {
            files[slot].push(std::fs::read(path).unwrap());
        }
    }
    for (name, runs) in ["features", "model", "tuning history", "best params"]
        .iter()
        .zip(&files)
    {
        identical.push((name, runs[0] == runs[1] && runs[0] == runs[2]));
    }

    let differing: Vec<&str> = identical
        .iter()
        .filter(|(_, same)| !same)
        .map(|(n, _)| *n)
        .collect();
    vec![line(
        "6",
        differing.is_empty(),
        if differing.is_empty() {
            "determinism: corpus, feature CSV, model JSON, tuning history byte-identical across 2 runs and --threads 1 vs 8".to_string()
        } else {
            format!("determinism: outputs differ for {differing:?}")
        },
    )]
}

// ---------------------------------------------------------------- 7

fn c7_pipeline_identity() -> Vec<Line> {
    let mut worst_residual: f64 = 0.0;
    let mut ssim_err: f64 = 0.0;
    let mut kl: f64 = 0.0;
    let cfg = SynthConfig {
        contents: 3,
        ..SynthConfig::default()
    };
    for c in 0..cfg.contents {
        let seq = normalize_bit_depth(generate_content(&cfg, c));
        let a = analyze_pair(seq.clone(), seq).unwrap();
        let z = a.fused.to_array();
        worst_residual = z[..7].iter().fold(worst_residual, |m, v| m.max(v.abs()));
        ssim_err = ssim_err.max((z[7] - 1.0).abs());
        kl = kl.max(a.kl_proxy.abs());
    }
    vec![line(
        "7",
        worst_residual <= 1e-6 && ssim_err <= 1e-6 && kl <= 1e-12,
        format!("pipeline identity: max |r| {worst_residual:.1e}, |mu_ssim - 1| {ssim_err:.1e} (<= 1e-6), kl_proxy {kl:.1e} (<= 1e-12)"),
    )]
}

// ---------------------------------------------------------------- 8

fn c8_tuned_config() -> Vec<Line> {
    let cfg = SynthConfig::default();
    let rows: Vec<([f64; 8], f64)> = (0..8)
        .into_par_iter()
        .flat_map_iter(|c| {
            let (reference, tests) = generate_renditions(&cfg, c);
            let reference = normalize_bit_depth(reference);
            tests
                .into_iter()
                .enumerate()
                .map(|(level, t)| {
                    let a = analyze_pair(reference.clone(), normalize_bit_depth(t)).unwrap();
                    (a.fused.to_array(), pseudo_mos(cfg.strength(level)))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let data = TrainingSet::new(
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
    )
    .unwrap();
    let tuned = GbtParams {
        n_estimators: 95,
        max_depth: 8,
        learning_rate: 0.072,
        subsample: 0.999,
        colsample_bytree: 0.852,
        ..GbtParams::tuned()
    };
    let trains = gbt::train(&data, &tuned);
    let schema_ok = trains.as_ref().is_ok_and(|m| {
        let json = gbt::model_to_json(m, Some(&tuned)).unwrap();
        gbt::model_from_json(&json).is_ok_and(|back| {
            data.features()
                .iter()
                .all(|z| back.predict(z) == m.predict(z))
                && back.trees.len() == 95
        })
    });

    let space = SearchSpace::default();
    let mut out_of_bounds = 0;
    let mut r = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let p = space.sample(&mut r, &GbtParams::default());
        let inside = (50..=300).contains(&p.n_estimators)
            && (3..=10).contains(&p.max_depth)
            && (0.01..=0.3).contains(&p.learning_rate)
            && (0.6..=1.0).contains(&p.subsample)
            && (0.6..=1.0).contains(&p.colsample_bytree);
        if !inside {
            out_of_bounds += 1;
        }
    }
    let small = data.subset(&(0..data.len()).step_by(2).collect::<Vec<_>>());
    let search = random_search(&small, &space, 8, 3, 8).unwrap();
    let search_inside = search.history.iter().all(|t| {
        (50..=300).contains(&t.params.n_estimators)
            && (3..=10).contains(&t.params.max_depth)
            && (0.01..=0.3).contains(&t.params.learning_rate)
            && (0.6..=1.0).contains(&t.params.subsample)
            && (0.6..=1.0).contains(&t.params.colsample_bytree)
    });

    vec![line(
        "8",
        trains.is_ok() && schema_ok && out_of_bounds == 0 && search_inside,
        format!(
            "tuned config: trains {}, model file round-trips {}, {out_of_bounds}/1000 sampled configs out of bounds, search history in bounds {search_inside}",
            trains.is_ok(),
            schema_ok
        ),
    )]
}

// ---------------------------------------------------------------- 9

fn timed_analysis(
    reference: &NormalizedSequence,
    test: &NormalizedSequence,
    threads: usize,
) -> Duration {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap();
    let start = Instant::now();
    pool.install(|| {
        let extractor = FeatureExtractor::default();
        temporal_pool(&extractor.sequence(reference).unwrap()).unwrap();
        temporal_pool(&extractor.sequence(test).unwrap()).unwrap();
        ssim_sequence(reference, test).unwrap();
    });
    start.elapsed()
}

fn c9_throughput() -> Vec<Line> {
    let reference = pattern_sequence(1920, 1080, 60, false);
    let test = pattern_sequence(1920, 1080, 60, true);
    let single = timed_analysis(&reference, &test, 1);
    let eight = timed_analysis(&reference, &test, 8);
    let speedup = single.as_secs_f64() / eight.as_secs_f64();
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut b = line(
        "9b",
        speedup >= 2.5,
        format!(
            "throughput: 8-worker speedup {speedup:.2}x (>= 2.5x) on a host with {cores} core(s)"
        ),
    );
    b.hardware_bound = !b.pass && cores < 8;
    vec![
        line(
            "9a",
            single <= Duration::from_secs(30),
            format!("throughput: 1080p 60-frame pair, features + SSIM single-threaded in {:.1}s (<= 30s)", single.as_secs_f64()),
        ),
        b,
    ]
}

type Criterion = fn() -> Vec<Line>;

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("1", c1_synthetic_study),
        ("2", c2_ssim_oracle),
        ("3", c3_dct),
        ("4", c4_gbt),
        ("5", c5_metrics),
        ("6", c6_determinism),
        ("7", c7_pipeline_identity),
        ("8", c8_tuned_config),
        ("9", c9_throughput),
    ];
    let only: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();

    let mut enforced_failures = 0;
    let mut hardware_failures = 0;
    for (id, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let lines = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            vec![line("?", false, format!("criterion {id} panicked: {msg}"))]
        });
        for l in lines {
            let status = if l.pass { "PASS" } else { "FAIL" };
            let note = if l.hardware_bound {
                "  [not enforced: needs >= 8 cores]"
            } else {
                ""
            };
            println!("{status} [{:>2}] {}{note}", l.id, l.detail);
            match (l.pass, l.hardware_bound) {
                (true, _) => {}
                (false, true) => hardware_failures += 1,
                (false, false) => enforced_failures += 1,
            }
        }
    }
    println!(
        "acceptance: {enforced_failures} enforced failure(s), {hardware_failures} failure(s) not measurable on this host"
    );
    if enforced_failures > 0 {
        std::process::exit(1);
    }
}

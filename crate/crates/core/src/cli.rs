//! The `rrvqa` command line: argument definitions and subcommand drivers.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::csvio::{fmt_num, read_fused_csv, write_fused_csv, FusedTable};
use crate::error::{Error, Result};
use crate::features::{write_frame_csv, write_pooled_csv};
use crate::fusion::FUSED_NAMES;
use crate::gbt::{self, GbtParams, TrainingSet};
use crate::metrics::MetricsReport;
use crate::output::OutputGuard;
use crate::pipeline::{analyze_files, load_normalized, PairAnalysis};
use crate::synth::{read_manifest, write_corpus, SynthConfig};
use crate::tuning::{random_search, write_trials_csv, SearchSpace};
use crate::video::{align_pair, RawParams};

#[derive(Debug, Parser)]
#[command(
    name = "rrvqa",
    version,
    about = "Reduced-reference video quality assessment"
)]
pub struct Cli {
    /// Worker threads (default: all available cores). Never changes numeric output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed for every random choice (sampling, folds, synthetic corpus).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fused feature vector for a reference/test pair or a manifest of pairs.
    Features(FeaturesArgs),
    /// Mean luma SSIM of a reference/test pair.
    Ssim(SsimArgs),
    /// Train a boosted-tree model on a fused dataset.
    Train(TrainArgs),
    /// Append a `pred` column to a fused dataset.
    Predict(PredictArgs),
    /// SROCC, PLCC, KROCC and RMSE of `pred` against `mos`.
    Evaluate(EvaluateArgs),
    /// Random hyperparameter search with k-fold cross-validation.
    Tune(TuneArgs),
    /// Per-feature gain share of a trained model.
    Importance(ImportanceArgs),
    /// Generate a synthetic corpus with pseudo-MOS labels.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long = "ref", required_unless_present = "input", requires = "test")]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Manifest CSV with `ref,test[,mos]` columns, instead of --ref/--test.
    #[arg(long, conflicts_with_all = ["reference", "test"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    /// Raw planar input geometry, `WxH:bitdepth`.
    #[arg(long)]
    pub raw: Option<RawParams>,
    /// Add a `kl_proxy` column.
    #[arg(long)]
    pub diagnostics: bool,
    /// Directory for per-frame and pooled feature CSVs of both sequences.
    #[arg(long)]
    pub frame_features: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SsimArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub raw: Option<RawParams>,
    /// Per-frame `frame,ssim` CSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// JSON hyperparameters (for example the best configuration from `tune`).
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub n_estimators: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub subsample: Option<f64>,
    #[arg(long)]
    pub colsample_bytree: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// CSV with `pred` and `mos` columns.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Trials CSV.
    #[arg(long)]
    pub output: PathBuf,
    /// Best configuration JSON (default: trials path with `.best.json`).
    #[arg(long)]
    pub best: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Labelled dataset; adds a permutation-importance column.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 12)]
    pub contents: usize,
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    #[arg(long, default_value_t = 64)]
    pub height: usize,
    #[arg(long, default_value_t = 30)]
    pub frames: usize,
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found"),
        ))
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn fused_row(a: &PairAnalysis, diagnostics: bool) -> Vec<String> {
    let mut row: Vec<String> = a.fused.to_array().iter().map(|&v| fmt_num(v)).collect();
    if diagnostics {
        row.push(fmt_num(a.kl_proxy));
    }
    row
}

fn write_frame_features(
    guard: &mut OutputGuard,
    dir: &Path,
    stem: &str,
    a: &PairAnalysis,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let sides = [
        ("ref", &a.reference_frames, &a.reference_pooled),
        ("test", &a.test_frames, &a.test_pooled),
    ];
    for (side, frames, pooled) in sides {
        let frames_csv = csv_bytes(|b| write_frame_csv(b, frames))?;
        guard.write(&dir.join(format!("{stem}.{side}_frames.csv")), &frames_csv)?;
        let pooled_csv = csv_bytes(|b| write_pooled_csv(b, pooled))?;
        guard.write(&dir.join(format!("{stem}.{side}_pooled.csv")), &pooled_csv)?;
    }
    Ok(())
}

pub fn cmd_features(args: &FeaturesArgs) -> Result<()> {
    let pairs: Vec<(PathBuf, PathBuf, Option<f64>)> =
        match (&args.input, &args.reference, &args.test) {
            (Some(manifest), _, _) => {
                require_file(manifest)?;
                read_manifest(manifest)?
            }
            (None, Some(r), Some(t)) => vec![(r.clone(), t.clone(), None)],
            _ => {
                return Err(Error::Config(
                    "either --input or both --ref and --test are required".into(),
                ))
            }
        };
    for (r, t, _) in &pairs {
        require_file(r)?;
        require_file(t)?;
    }
    let batch = args.input.is_some();
    let with_mos = pairs.iter().all(|p| p.2.is_some()) && batch;

    let mut header: Vec<&str> = if batch { vec!["ref", "test"] } else { vec![] };
    header.extend(FUSED_NAMES);
    if with_mos {
        header.push("mos");
    }
    if args.diagnostics {
        header.push("kl_proxy");
    }

    let mut guard = OutputGuard::new();
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(&header)?;
    for (i, (r, t, mos)) in pairs.iter().enumerate() {
        let a = analyze_files(r, t, args.raw)?;
        let mut row = Vec::new();
        if batch {
            row.push(
                r.file_name()
                    .map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
            );
            row.push(
                t.file_name()
                    .map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
            );
        }
        let mut rest = fused_row(&a, false);
        if with_mos {
            rest.push(fmt_num(mos.unwrap_or_default()));
        }
        if args.diagnostics {
            rest.push(fmt_num(a.kl_proxy));
        }
        row.extend(rest);
        wtr.write_record(&row)?;
        if let Some(dir) = &args.frame_features {
            let stem = if batch {
                t.file_stem()
                    .map_or_else(|| format!("pair{i}"), |s| s.to_string_lossy().into_owned())
            } else {
                "pair".to_string()
            };
            write_frame_features(&mut guard, dir, &stem, &a)?;
        }
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::io(&args.output, e.into_error()))?;
    guard.write(&args.output, &bytes)?;
    guard.commit();
    Ok(())
}

pub fn cmd_ssim(args: &SsimArgs) -> Result<f64> {
    require_file(&args.reference)?;
    require_file(&args.test)?;
    let r = load_normalized(&args.reference, args.raw)?;
    let t = load_normalized(&args.test, args.raw)?;
    let (r, t) = align_pair(r, t);
    let result = crate::ssim::ssim_sequence(&r, &t).map_err(|e| e.at_stage("ssim", &args.test))?;
    if let Some(out) = &args.output {
        let bytes = csv_bytes(|b| result.write_csv(b))?;
        crate::output::write_atomic(out, &bytes)?;
    }
    println!("mu_ssim,{}", fmt_num(result.mu_ssim));
    Ok(result.mu_ssim)
}

fn training_set(table: &FusedTable) -> Result<TrainingSet> {
    let labels = table
        .mos
        .clone()
        .ok_or_else(|| Error::Schema("missing column 'mos'".into()))?;
    TrainingSet::new(
        table.features.iter().map(|f| f.to_array()).collect(),
        labels,
    )
}

fn resolve_params(args: &TrainArgs, seed: u64) -> Result<GbtParams> {
    let mut p = match &args.params {
        Some(path) => {
            require_file(path)?;
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str::<GbtParams>(&text)?
        }
        None => GbtParams {
            seed,
            ..GbtParams::default()
        },
    };
    if let Some(v) = args.n_estimators {
        p.n_estimators = v;
    }
    if let Some(v) = args.max_depth {
        p.max_depth = v;
    }
    if let Some(v) = args.learning_rate {
        p.learning_rate = v;
    }
    if let Some(v) = args.subsample {
        p.subsample = v;
    }
    if let Some(v) = args.colsample_bytree {
        p.colsample_bytree = v;
    }
    if let Some(v) = args.lambda {
        p.lambda = v;
    }
    p.validate()?;
    Ok(p)
}

/// Returns the final training RMSE.
pub fn cmd_train(args: &TrainArgs, seed: u64) -> Result<f64> {
    require_file(&args.input)?;
    let params = resolve_params(args, seed)?;
    let data = training_set(&read_fused_csv(&args.input)?)?;
    let (model, history) = gbt::train_with_history(&data, &params)?;
    gbt::save_model(&model, Some(&params), &args.model)?;
    let rmse = *history.last().expect("at least one round");
    println!("train_rmse,{}", fmt_num(rmse));
    Ok(rmse)
}

pub fn cmd_predict(args: &PredictArgs) -> Result<()> {
    require_file(&args.input)?;
    require_file(&args.model)?;
    let model = gbt::load_model(&args.model)?;
    let table = read_fused_csv(&args.input)?;
    let rows: Vec<[f64; 8]> = table.features.iter().map(|f| f.to_array()).collect();
    let pred = model.predict_batch(&rows);
    let bytes = csv_bytes(|b| write_fused_csv(b, &table, &[("pred", &pred)]))?;
    crate::output::write_atomic(&args.output, &bytes)
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<MetricsReport> {
    require_file(&args.input)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(&args.input)?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column '{name}'")))
    };
    let (pi, mi) = (col("pred")?, col("mos")?);
    let (mut pred, mut mos) = (Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| {
            rec[i].parse::<f64>().map_err(|_| Error::Data {
                row,
                reason: format!("column '{}' holds '{}'", &headers[i], &rec[i]),
            })
        };
        pred.push(parse(pi)?);
        mos.push(parse(mi)?);
    }
    let report = MetricsReport::compute(&pred, &mos)?;
    let text = format!("{}\n{}\n", MetricsReport::CSV_HEADER, report.csv_row());
    if let Some(out) = &args.output {
        crate::output::write_atomic(out, text.as_bytes())?;
    }
    print!("{text}");
    Ok(report)
}

pub fn cmd_tune(args: &TuneArgs, seed: u64) -> Result<()> {
    require_file(&args.input)?;
    let data = training_set(&read_fused_csv(&args.input)?)?;
    let outcome = random_search(
        &data,
        &SearchSpace::default(),
        args.trials,
        args.folds,
        seed,
    )?;
    let best_path = args
        .best
        .clone()
        .unwrap_or_else(|| args.output.with_extension("best.json"));

    let mut guard = OutputGuard::new();
    guard.write(
        &args.output,
        &csv_bytes(|b| write_trials_csv(b, &outcome.history))?,
    )?;
    let mut best = serde_json::to_string_pretty(&outcome.best)?;
    best.push('\n');
    guard.write(&best_path, best.as_bytes())?;
    guard.commit();
    println!("{}", best.trim_end());
    println!(
        "best_trial,{},mean_plcc,{}",
        outcome.best_trial,
        fmt_num(outcome.best_record().mean_plcc)
    );
    Ok(())
}

pub fn cmd_importance(args: &ImportanceArgs, seed: u64) -> Result<()> {
    require_file(&args.model)?;
    if let Some(input) = &args.input {
        require_file(input)?;
    }
    let model = gbt::load_model(&args.model)?;
    let gain = gbt::gain_importance(&model);
    let permutation = match &args.input {
        Some(input) => Some(gbt::permutation_importance(
            &model,
            &training_set(&read_fused_csv(input)?)?,
            5,
            seed,
        )?),
        None => None,
    };
    let mut order: Vec<usize> = (0..gain.len()).collect();
    // Descending by gain; stable sort keeps feature order on ties.
    order.sort_by(|&a, &b| gain[b].total_cmp(&gain[a]));

    let mut text = String::from("feature,gain_share");
    if permutation.is_some() {
        text.push_str(",permutation_rmse_increase");
    }
    text.push('\n');
    for i in order {
        text.push_str(&format!("{},{}", model.feature_names[i], fmt_num(gain[i])));
        if let Some(p) = &permutation {
            text.push_str(&format!(",{}", fmt_num(p[i])));
        }
        text.push('\n');
    }
    crate::output::write_atomic(&args.output, text.as_bytes())
}

pub fn cmd_synth(args: &SynthArgs, seed: u64) -> Result<()> {
    let cfg = SynthConfig {
        contents: args.contents,
        levels: args.levels,
        width: args.width,
        height: args.height,
        frames: args.frames,
        seed,
    };
    let rows = write_corpus(&args.output, &cfg)?;
    println!(
        "wrote {} references and {} renditions to {}",
        cfg.contents,
        rows.len(),
        args.output.display()
    );
    Ok(())
}

/// Runs a parsed command line on a pool of `--threads` workers.
pub fn run(cli: Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let seed = cli.seed;
    pool.install(|| match &cli.command {
        Command::Features(a) => cmd_features(a),
        Command::Ssim(a) => cmd_ssim(a).map(|_| ()),
        Command::Train(a) => cmd_train(a, seed).map(|_| ()),
        Command::Predict(a) => cmd_predict(a),
        Command::Evaluate(a) => cmd_evaluate(a).map(|_| ()),
        Command::Tune(a) => cmd_tune(a, seed),
        Command::Importance(a) => cmd_importance(a, seed),
        Command::Synth(a) => cmd_synth(a, seed),
    })?;
    std::io::stdout()
        .flush()
        .map_err(|e| Error::io("<stdout>", e))
}

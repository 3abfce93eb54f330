//! Seeded random hyperparameter search scored by k-fold cross-validated PLCC.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csvio::fmt_num;
use crate::error::{Error, Result};
use crate::gbt::{train, GbtParams, TrainingSet};
use crate::metrics::plcc;

/// Inclusive bounds of the search box. `learning_rate` is sampled log-uniformly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub n_estimators: (usize, usize),
    pub max_depth: (usize, usize),
    pub learning_rate: (f64, f64),
    pub subsample: (f64, f64),
    pub colsample_bytree: (f64, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            n_estimators: (50, 300),
            max_depth: (3, 10),
            learning_rate: (0.01, 0.3),
            subsample: (0.6, 1.0),
            colsample_bytree: (0.6, 1.0),
        }
    }
}

impl SearchSpace {
    /// Draws one configuration; fields outside the box come from `base`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, base: &GbtParams) -> GbtParams {
        let (lo, hi) = self.learning_rate;
        GbtParams {
            n_estimators: rng.random_range(self.n_estimators.0..=self.n_estimators.1),
            max_depth: rng.random_range(self.max_depth.0..=self.max_depth.1),
            learning_rate: rng.random_range(lo.ln()..=hi.ln()).exp().clamp(lo, hi),
            subsample: rng.random_range(self.subsample.0..=self.subsample.1),
            colsample_bytree: rng.random_range(self.colsample_bytree.0..=self.colsample_bytree.1),
            ..*base
        }
    }

    pub fn contains(&self, p: &GbtParams) -> bool {
        let within = |v: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&v);
        (self.n_estimators.0..=self.n_estimators.1).contains(&p.n_estimators)
            && (self.max_depth.0..=self.max_depth.1).contains(&p.max_depth)
            && within(p.learning_rate, self.learning_rate)
            && within(p.subsample, self.subsample)
            && within(p.colsample_bytree, self.colsample_bytree)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub params: GbtParams,
    pub fold_scores: Vec<f64>,
    pub mean_plcc: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub best: GbtParams,
    pub best_trial: usize,
    pub history: Vec<TrialRecord>,
}

impl SearchOutcome {
    pub fn best_record(&self) -> &TrialRecord {
        &self.history[self.best_trial]
    }
}

/// Seeded shuffle of `0..n_rows`, cut into `k` contiguous folds. The first
/// `n_rows % k` folds get one extra row.
pub fn k_fold_split(n_rows: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {k}")));
    }
    if k > n_rows {
        return Err(Error::Config(format!(
            "{k} folds requested for {n_rows} rows"
        )));
    }
    let mut idx: Vec<usize> = (0..n_rows).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n_rows / k, n_rows % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(idx[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// Mean validation PLCC of `params` over `folds`. A fold whose PLCC is
/// undefined (constant predictions or labels) scores 0.
pub fn cross_validate(
    data: &TrainingSet,
    folds: &[Vec<usize>],
    params: &GbtParams,
) -> Result<Vec<f64>> {
    folds
        .iter()
        .enumerate()
        .map(|(f, valid)| {
            if valid.len() < 2 {
                return Err(Error::Config(format!(
                    "fold {f} has {} validation row(s); at least 2 are needed",
                    valid.len()
                )));
            }
            let train_idx: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|(g, _)| *g != f)
                .flat_map(|(_, rows)| rows.iter().copied())
                .collect();
            let model = train(&data.subset(&train_idx), params)?;
            let valid_set = data.subset(valid);
            let pred = model.predict_batch(valid_set.features());
            match plcc(&pred, valid_set.labels()) {
                Ok(r) => Ok(r),
                Err(Error::UndefinedCorrelation(_)) => Ok(0.0),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Samples `trials` configurations, scores each by k-fold PLCC, and returns
/// the best (earliest trial wins ties) together with the full history.
///
/// Folds are shared by all trials. Trial `t` draws from its own RNG stream, so
/// trials can run concurrently without changing results.
pub fn random_search(
    data: &TrainingSet,
    space: &SearchSpace,
    trials: usize,
    k: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    if trials < 1 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    let folds = k_fold_split(data.len(), k, seed)?;
    if let Some(small) = folds.iter().position(|f| f.len() < 2) {
        return Err(Error::Config(format!(
            "fold {small} has {} validation row(s); at least 2 are needed",
            folds[small].len()
        )));
    }

    let history = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64 + 1);
            let base = GbtParams {
                seed: rng.next_u64(),
                ..GbtParams::default()
            };
            let params = space.sample(&mut rng, &base);
            let fold_scores = cross_validate(data, &folds, &params)?;
            let mean_plcc = fold_scores.iter().sum::<f64>() / fold_scores.len() as f64;
            Ok(TrialRecord {
                trial,
                params,
                fold_scores,
                mean_plcc,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best_trial = 0;
    for (i, rec) in history.iter().enumerate() {
        if rec.mean_plcc > history[best_trial].mean_plcc {
            best_trial = i;
        }
    }
    Ok(SearchOutcome {
        best: history[best_trial].params,
        best_trial,
        history,
    })
}

/// `trial,n_estimators,max_depth,learning_rate,subsample,colsample_bytree,mean_plcc`
pub fn write_trials_csv<W: Write>(out: W, history: &[TrialRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "trial",
        "n_estimators",
        "max_depth",
        "learning_rate",
        "subsample",
        "colsample_bytree",
        "mean_plcc",
    ])?;
    for rec in history {
        let p = &rec.params;
        wtr.write_record([
            rec.trial.to_string(),
            p.n_estimators.to_string(),
            p.max_depth.to_string(),
            fmt_num(p.learning_rate),
            fmt_num(p.subsample),
            fmt_num(p.colsample_bytree),
            fmt_num(rec.mean_plcc),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<trials>", e))?;
    Ok(())
}

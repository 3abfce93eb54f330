//! Agreement between predicted and subjective scores: SROCC, PLCC, KROCC, RMSE.
//!
//! No nonlinear (logistic) mapping is fitted before PLCC or RMSE.

use std::cmp::Ordering;

use crate::csvio::fmt_num;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    pub srocc: f64,
    pub plcc: f64,
    pub krocc: f64,
    pub rmse: f64,
    pub n: usize,
}

impl MetricsReport {
    pub fn compute(pred: &[f64], truth: &[f64]) -> Result<Self> {
        Ok(MetricsReport {
            srocc: srocc(pred, truth)?,
            plcc: plcc(pred, truth)?,
            krocc: krocc(pred, truth)?,
            rmse: rmse(pred, truth)?,
            n: pred.len(),
        })
    }

    pub const CSV_HEADER: &'static str = "srocc,plcc,krocc,rmse,n";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt_num(self.srocc),
            fmt_num(self.plcc),
            fmt_num(self.krocc),
            fmt_num(self.rmse),
            self.n
        )
    }
}

fn check_pair(pred: &[f64], truth: &[f64], min_len: usize) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.len() < min_len {
        return Err(Error::EmptyInput("too few samples for the metric"));
    }
    if pred.iter().chain(truth).any(|v| !v.is_finite()) {
        return Err(Error::Range("metric inputs must be finite".into()));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::UndefinedCorrelation("an input has zero variance"));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson linear correlation.
pub fn plcc(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(pred, truth, 2)?;
    pearson(pred, truth)
}

/// 1-based ranks; tied values share the average of the ranks they span.
pub fn fractional_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation (Pearson on average ranks).
pub fn srocc(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(pred, truth, 2)?;
    pearson(&fractional_ranks(pred), &fractional_ranks(truth))
}

/// Number of tied pairs in a sorted run-length sense: Σ t(t−1)/2.
fn tied_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Sorts `v` and returns the number of inversions (strictly greater earlier).
fn merge_count(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], buf) + merge_count(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf.push(v[j]);
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Kendall tau-b, O(n log n) (Knight's algorithm).
pub fn krocc(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(pred, truth, 2)?;
    let n = pred.len() as u64;
    let n0 = n * (n - 1) / 2;

    let mut pairs: Vec<(f64, f64)> = pred.iter().copied().zip(truth.iter().copied()).collect();
    pairs.sort_by(|a, b| match a.0.total_cmp(&b.0) {
        Ordering::Equal => a.1.total_cmp(&b.1),
        o => o,
    });
    let ties_pred = tied_pairs(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let ties_joint = tied_pairs(&pairs);

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut scratch = Vec::with_capacity(ys.len());
    let swaps = merge_count(&mut ys, &mut scratch);
    let ties_truth = tied_pairs(&ys);

    let denom = ((n0 - ties_pred) as f64) * ((n0 - ties_truth) as f64);
    if denom == 0.0 {
        return Err(Error::UndefinedCorrelation("an input is entirely tied"));
    }
    // concordant − discordant = n0 − n1 − n2 + n3 − 2·swaps
    let numer =
        n0 as f64 - ties_pred as f64 - ties_truth as f64 + ties_joint as f64 - 2.0 * swaps as f64;
    Ok((numer / denom.sqrt()).clamp(-1.0, 1.0))
}

pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(pred, truth, 1)?;
    let sse: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok((sse / pred.len() as f64).sqrt())
}

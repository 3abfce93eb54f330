use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GbtModel, GbtParams, Node, TrainingSet, Tree, N_FEATURES};
use crate::error::{Error, Result};

/// Best split found for a node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Threshold strictly above `lo` and at most `hi`, so `lo` routes left and
/// `hi` routes right under the `value < threshold` rule.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid > lo {
        mid
    } else {
        hi
    }
}

/// Relative margin under which two candidate gains count as tied.
const GAIN_TIE: f64 = 1e-12;

struct Builder<'a> {
    x: &'a [[f64; N_FEATURES]],
    grad: &'a [f64],
    hess: &'a [f64],
    features: &'a [usize],
    params: &'a GbtParams,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn leaf_weight(&self, g: f64, h: f64) -> f64 {
        -g / (h + self.params.lambda)
    }

    fn score(&self, g: f64, h: f64) -> f64 {
        g * g / (h + self.params.lambda)
    }

    /// Exact greedy search; ties keep the lowest feature index, then the lowest threshold.
    fn best_split(&self, rows: &[usize]) -> Option<Split> {
        let (g_total, h_total) = rows.iter().fold((0.0, 0.0), |(g, h), &i| {
            (g + self.grad[i], h + self.hess[i])
        });
        let parent = self.score(g_total, h_total);
        let mut best: Option<Split> = None;
        let mut order = rows.to_vec();
        for &f in self.features {
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            let (mut gl, mut hl) = (0.0, 0.0);
            for p in 0..order.len() - 1 {
                let i = order[p];
                gl += self.grad[i];
                hl += self.hess[i];
                let (lo, hi) = (self.x[i][f], self.x[order[p + 1]][f]);
                if lo == hi {
                    continue;
                }
                let (gr, hr) = (g_total - gl, h_total - hl);
                if hl < self.params.min_child_weight || hr < self.params.min_child_weight {
                    continue;
                }
                let gain =
                    0.5 * (self.score(gl, hl) + self.score(gr, hr) - parent) - self.params.gamma;
                if gain > 0.0 && best.is_none_or(|b| gain > b.gain + GAIN_TIE * b.gain.abs()) {
                    best = Some(Split {
                        feature: f,
                        threshold: midpoint(lo, hi),
                        gain,
                    });
                }
            }
        }
        best
    }

    fn build(&mut self, rows: &[usize], depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { leaf: 0.0 });
        let split = if depth < self.params.max_depth && rows.len() > 1 {
            self.best_split(rows)
        } else {
            None
        };
        match split {
            None => {
                let (g, h) = rows.iter().fold((0.0, 0.0), |(g, h), &i| {
                    (g + self.grad[i], h + self.hess[i])
                });
                self.nodes[id] = Node::Leaf {
                    leaf: self.leaf_weight(g, h),
                };
            }
            Some(s) => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&i| self.x[i][s.feature] < s.threshold);
                let left = self.build(&left_rows, depth + 1);
                let right = self.build(&right_rows, depth + 1);
                self.nodes[id] = Node::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left,
                    right,
                    gain: s.gain,
                };
            }
        }
        id
    }
}

/// Fits one tree to the gradients of `rows`, restricted to `features`.
pub(crate) fn fit_tree(
    x: &[[f64; N_FEATURES]],
    grad: &[f64],
    hess: &[f64],
    rows: &[usize],
    features: &[usize],
    params: &GbtParams,
) -> Tree {
    let mut b = Builder {
        x,
        grad,
        hess,
        features,
        params,
        nodes: Vec::new(),
    };
    b.build(rows, 0);
    Tree { nodes: b.nodes }
}

pub fn train(data: &TrainingSet, params: &GbtParams) -> Result<GbtModel> {
    train_with_history(data, params).map(|(m, _)| m)
}

/// Trains a model and returns it with the training RMSE after every round.
pub fn train_with_history(data: &TrainingSet, params: &GbtParams) -> Result<(GbtModel, Vec<f64>)> {
    params.validate()?;
    let n = data.len();
    if n < 2 {
        return Err(Error::Config(format!(
            "training needs at least 2 rows, got {n}"
        )));
    }
    let x = data.features();
    let y = data.labels();
    let base_score = y.iter().sum::<f64>() / n as f64;
    let mut pred = vec![base_score; n];
    let mut grad = vec![0.0; n];
    let hess = vec![1.0; n];

    let n_rows = ((params.subsample * n as f64).round() as usize).clamp(1, n);
    let n_cols =
        ((params.colsample_bytree * N_FEATURES as f64).ceil() as usize).clamp(1, N_FEATURES);

    let mut trees = Vec::with_capacity(params.n_estimators);
    let mut history = Vec::with_capacity(params.n_estimators);
    for round in 0..params.n_estimators {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(round as u64);

        let rows: Vec<usize> = if n_rows < n {
            let mut r = index::sample(&mut rng, n, n_rows).into_vec();
            r.sort_unstable();
            r
        } else {
            (0..n).collect()
        };
        let features: Vec<usize> = if n_cols < N_FEATURES {
            let mut f = index::sample(&mut rng, N_FEATURES, n_cols).into_vec();
            f.sort_unstable();
            f
        } else {
            (0..N_FEATURES).collect()
        };

        for i in 0..n {
            grad[i] = pred[i] - y[i];
        }
        let tree = fit_tree(x, &grad, &hess, &rows, &features, params);
        let mut sse = 0.0;
        for i in 0..n {
            pred[i] += params.learning_rate * tree.leaf_value(&x[i]);
            sse += (pred[i] - y[i]) * (pred[i] - y[i]);
        }
        history.push((sse / n as f64).sqrt());
        trees.push(tree);
    }

    Ok((
        GbtModel::new(base_score, params.learning_rate, trees),
        history,
    ))
}

//! Gradient-boosted regression trees for the fused-feature → quality mapping.
//!
//! Squared-error objective (unit hessian), Newton-step leaves `−G/(H + λ)`,
//! exact greedy split search, row and column subsampling from a seeded RNG.

mod io;
mod train;

pub use io::{load_model, model_from_json, model_to_json, save_model, FORMAT_VERSION};
pub use train::{train, train_with_history};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::FUSED_NAMES;

pub const N_FEATURES: usize = 8;

/// Booster hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbtParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub subsample: f64,
    pub colsample_bytree: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
    pub seed: u64,
}

impl GbtParams {
    /// The tuned configuration: 95 trees, depth 8, learning rate 0.072,
    /// subsample 0.999, column sample 0.852.
    pub fn tuned() -> Self {
        GbtParams {
            n_estimators: 95,
            max_depth: 8,
            learning_rate: 0.072,
            subsample: 0.999,
            colsample_bytree: 0.852,
            lambda: 1.0,
            gamma: 0.0,
            min_child_weight: 1.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.n_estimators < 1 {
            return fail("n_estimators must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return fail(format!(
                "learning_rate {} is outside (0, 1]",
                self.learning_rate
            ));
        }
        for (name, v) in [
            ("subsample", self.subsample),
            ("colsample_bytree", self.colsample_bytree),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return fail(format!("{name} {v} is outside (0, 1]"));
            }
        }
        for (name, v) in [
            ("lambda", self.lambda),
            ("gamma", self.gamma),
            ("min_child_weight", self.min_child_weight),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return fail(format!("{name} {v} must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams::tuned()
    }
}

/// One tree node. Serialized untagged: `{feature, threshold, left, right}`
/// for splits, `{leaf}` for leaves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Loss reduction of the split; feeds gain importance.
        #[serde(default)]
        gain: f64,
    },
    Leaf {
        leaf: f64,
    },
}

/// A regression tree stored as a node array with the root at index 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Leaf value reached by `z`; goes left iff `z[feature] < threshold`.
    pub fn leaf_value(&self, z: &[f64; N_FEATURES]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { leaf } => return leaf,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if z[feature] < threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub base_score: f64,
    pub learning_rate: f64,
    pub feature_names: Vec<String>,
    pub trees: Vec<Tree>,
}

impl GbtModel {
    pub fn new(base_score: f64, learning_rate: f64, trees: Vec<Tree>) -> Self {
        GbtModel {
            base_score,
            learning_rate,
            feature_names: FUSED_NAMES.iter().map(|s| s.to_string()).collect(),
            trees,
        }
    }

    /// `base_score + learning_rate · Σ_trees leaf(z)`.
    pub fn predict(&self, z: &[f64; N_FEATURES]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.leaf_value(z)).sum();
        self.base_score + self.learning_rate * sum
    }

    pub fn predict_batch(&self, rows: &[[f64; N_FEATURES]]) -> Vec<f64> {
        rows.iter().map(|z| self.predict(z)).collect()
    }
}

/// Rows of fused features with quality labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingSet {
    features: Vec<[f64; N_FEATURES]>,
    labels: Vec<f64>,
}

impl TrainingSet {
    pub fn new(features: Vec<[f64; N_FEATURES]>, labels: Vec<f64>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.len(),
                right: labels.len(),
            });
        }
        if features.is_empty() {
            return Err(Error::EmptyInput("training set has no rows"));
        }
        for (row, (z, y)) in features.iter().zip(&labels).enumerate() {
            if let Some(j) = z.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data {
                    row,
                    reason: format!("feature {} is {}", FUSED_NAMES[j], z[j]),
                });
            }
            if !y.is_finite() {
                return Err(Error::Data {
                    row,
                    reason: format!("label is {y}"),
                });
            }
        }
        Ok(TrainingSet { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self) -> &[[f64; N_FEATURES]] {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// The rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> TrainingSet {
        TrainingSet {
            features: indices.iter().map(|&i| self.features[i]).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Share of total split gain per feature. All zeros for a model with no splits.
pub fn gain_importance(model: &GbtModel) -> [f64; N_FEATURES] {
    let mut gain = [0.0; N_FEATURES];
    for tree in &model.trees {
        for node in &tree.nodes {
            if let Node::Split {
                feature, gain: g, ..
            } = *node
            {
                gain[feature] += g;
            }
        }
    }
    let total: f64 = gain.iter().sum();
    if total > 0.0 {
        gain.map(|g| g / total)
    } else {
        [0.0; N_FEATURES]
    }
}

/// RMSE increase when each feature column is shuffled, averaged over
/// `repeats` seeded shuffles.
pub fn permutation_importance(
    model: &GbtModel,
    data: &TrainingSet,
    repeats: usize,
    seed: u64,
) -> Result<[f64; N_FEATURES]> {
    let baseline = crate::metrics::rmse(&model.predict_batch(data.features()), data.labels())?;
    let mut out = [0.0; N_FEATURES];
    let repeats = repeats.max(1);
    for (j, slot) in out.iter_mut().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64);
        let mut total = 0.0;
        for _ in 0..repeats {
            let mut column: Vec<f64> = data.features().iter().map(|z| z[j]).collect();
            column.shuffle(&mut rng);
            let permuted: Vec<[f64; N_FEATURES]> = data
                .features()
                .iter()
                .zip(&column)
                .map(|(z, &v)| {
                    let mut z = *z;
                    z[j] = v;
                    z
                })
                .collect();
            total +=
                crate::metrics::rmse(&model.predict_batch(&permuted), data.labels())? - baseline;
        }
        *slot = total / repeats as f64;
    }
    Ok(out)
}

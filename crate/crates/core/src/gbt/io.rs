//! JSON model files.
//!
//! ```json
//! {"format_version": 1, "base_score": 3.1, "learning_rate": 0.072,
//!  "feature_names": ["r_E", ...], "trees": [{"nodes": [
//!    {"feature": 7, "threshold": 0.93, "left": 1, "right": 2, "gain": 4.2},
//!    {"leaf": -0.5}, {"leaf": 0.4}]}]}
//! ```
//! Floats are written in shortest round-trip form, so a reload predicts
//! bit-identically.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GbtModel, GbtParams, Node, Tree, N_FEATURES};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    base_score: f64,
    learning_rate: f64,
    feature_names: Vec<String>,
    trees: Vec<Tree>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<GbtParams>,
}

pub fn model_to_json(model: &GbtModel, params: Option<&GbtParams>) -> Result<String> {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        base_score: model.base_score,
        learning_rate: model.learning_rate,
        feature_names: model.feature_names.clone(),
        trees: model.trees.clone(),
        params: params.copied(),
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    Ok(text)
}

fn schema(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::ModelSchema {
        path: path.into(),
        reason: reason.into(),
    }
}

pub fn model_from_json(text: &str) -> Result<GbtModel> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ModelFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })?;

    if file.format_version != FORMAT_VERSION {
        return Err(schema(
            "format_version",
            format!("unsupported version {}", file.format_version),
        ));
    }
    if !file.base_score.is_finite() {
        return Err(schema("base_score", "must be finite"));
    }
    if !file.learning_rate.is_finite() {
        return Err(schema("learning_rate", "must be finite"));
    }
    if file.feature_names.len() != N_FEATURES {
        return Err(schema(
            "feature_names",
            format!(
                "expected {N_FEATURES} names, found {}",
                file.feature_names.len()
            ),
        ));
    }
    for (t, tree) in file.trees.iter().enumerate() {
        validate_tree(tree, t)?;
    }
    Ok(GbtModel {
        base_score: file.base_score,
        learning_rate: file.learning_rate,
        feature_names: file.feature_names,
        trees: file.trees,
    })
}

/// Every node must be reached exactly once from the root, children must be in
/// range, and all values finite.
fn validate_tree(tree: &Tree, t: usize) -> Result<()> {
    let n = tree.nodes.len();
    if n == 0 {
        return Err(schema(format!("trees[{t}].nodes"), "tree has no nodes"));
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        let at = format!("trees[{t}].nodes[{i}]");
        if std::mem::replace(&mut seen[i], true) {
            return Err(schema(
                at,
                "node is reachable more than once (cycle or shared child)",
            ));
        }
        match tree.nodes[i] {
            Node::Leaf { leaf } => {
                if !leaf.is_finite() {
                    return Err(schema(format!("{at}.leaf"), "leaf value must be finite"));
                }
            }
            Node::Split {
                feature,
                threshold,
                left,
                right,
                gain,
            } => {
                if feature >= N_FEATURES {
                    return Err(schema(
                        format!("{at}.feature"),
                        format!("feature index {feature} is not below {N_FEATURES}"),
                    ));
                }
                if !threshold.is_finite() || !gain.is_finite() {
                    return Err(schema(at, "threshold and gain must be finite"));
                }
                for (name, child) in [("left", left), ("right", right)] {
                    if child >= n {
                        return Err(schema(
                            format!("{at}.{name}"),
                            format!("child index {child} is out of range for {n} nodes"),
                        ));
                    }
                    stack.push(child);
                }
            }
        }
    }
    if let Some(orphan) = seen.iter().position(|s| !s) {
        return Err(schema(
            format!("trees[{t}].nodes[{orphan}]"),
            "node is not reachable from the root",
        ));
    }
    Ok(())
}

pub fn save_model(model: &GbtModel, params: Option<&GbtParams>, path: &Path) -> Result<()> {
    let text = model_to_json(model, params)?;
    crate::output::write_atomic(path, text.as_bytes())
}

pub fn load_model(path: &Path) -> Result<GbtModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text)
}

//! Trains the boosted-tree regressor on a toy fused dataset, saves it as JSON,
//! reloads it and checks that predictions survive the round trip.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrvqa::gbt::{self, GbtParams, TrainingSet};

fn main() -> rrvqa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let features: Vec<[f64; 8]> = (0..200)
        .map(|_| {
            let mut z: [f64; 8] = std::array::from_fn(|_| rng.random_range(-0.5..0.5));
            z[7] = rng.random_range(0.6..1.0);
            z
        })
        .collect();
    let labels: Vec<f64> = features
        .iter()
        .map(|z| 1.0 + 4.0 * (z[7] - 0.6) / 0.4 - 0.5 * z[0].abs())
        .collect();
    let data = TrainingSet::new(features, labels)?;

    let params = GbtParams {
        seed: 1,
        ..GbtParams::tuned()
    };
    let (model, history) = gbt::train_with_history(&data, &params)?;
    println!(
        "training RMSE: round 1 {:.4}, round {} {:.4}",
        history[0],
        history.len(),
        history[history.len() - 1]
    );

    let dir = tempfile::tempdir().expect("temporary directory");
    let path = dir.path().join("model.json");
    gbt::save_model(&model, Some(&params), &path)?;
    let reloaded = gbt::load_model(&path)?;
    let probe = [0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.9];
    println!(
        "prediction {:.4} (reloaded {:.4})",
        model.predict(&probe),
        reloaded.predict(&probe)
    );
    println!(
        "model file: {} bytes, {} trees",
        std::fs::metadata(&path).map_or(0, |m| m.len()),
        reloaded.trees.len()
    );
    Ok(())
}

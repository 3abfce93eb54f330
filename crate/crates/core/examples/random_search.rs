//! Seeded random hyperparameter search with 5-fold cross-validation on a toy
//! dataset; prints each trial and the winner.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrvqa::gbt::TrainingSet;
use rrvqa::tuning::{random_search, SearchSpace};

fn main() -> rrvqa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let features: Vec<[f64; 8]> = (0..120)
        .map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
        .collect();
    let labels = features
        .iter()
        .map(|z| 3.0 + z[7] * 1.5 - z[2] * z[2] + rng.random_range(-0.2..0.2))
        .collect();
    let data = TrainingSet::new(features, labels)?;

    let outcome = random_search(&data, &SearchSpace::default(), 10, 5, 42)?;
    for t in &outcome.history {
        println!(
            "trial {:>2}: trees {:>3} depth {:>2} lr {:.4} subsample {:.3} colsample {:.3} -> mean PLCC {:.4}",
            t.trial, t.params.n_estimators, t.params.max_depth, t.params.learning_rate, t.params.subsample,
            t.params.colsample_bytree, t.mean_plcc
        );
    }
    println!("best: trial {}", outcome.best_trial);
    Ok(())
}

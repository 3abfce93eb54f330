//! Gain and permutation importance of a model whose labels depend mostly on
//! the SSIM term and weakly on the luma texture residual.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrvqa::fusion::FUSED_NAMES;
use rrvqa::gbt::{self, gain_importance, permutation_importance, GbtParams, TrainingSet};

fn main() -> rrvqa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let features: Vec<[f64; 8]> = (0..300)
        .map(|_| std::array::from_fn(|_| rng.random_range(0.0..1.0)))
        .collect();
    let labels = features
        .iter()
        .map(|z| 4.0 * z[7] + 0.8 * z[0] + rng.random_range(-0.05..0.05))
        .collect();
    let data = TrainingSet::new(features, labels)?;
    let model = gbt::train(&data, &GbtParams::tuned())?;

    let gain = gain_importance(&model);
    let perm = permutation_importance(&model, &data, 5, 0)?;
    println!("{:>8} {:>10} {:>12}", "feature", "gain", "permutation");
    for i in 0..8 {
        println!("{:>8} {:>10.4} {:>12.4}", FUSED_NAMES[i], gain[i], perm[i]);
    }
    Ok(())
}

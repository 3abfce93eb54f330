//! Mean luma SSIM between a clip and each of its graded degradations.

use rrvqa::ssim::ssim_sequence;
use rrvqa::synth::{generate_renditions, SynthConfig};
use rrvqa::video::normalize_bit_depth;

fn main() -> rrvqa::Result<()> {
    let cfg = SynthConfig {
        frames: 10,
        levels: 6,
        ..Default::default()
    };
    let (reference, tests) = generate_renditions(&cfg, 0);
    let reference = normalize_bit_depth(reference);
    println!("strength,mu_ssim");
    for (level, test) in tests.into_iter().enumerate() {
        let result = ssim_sequence(&reference, &normalize_bit_depth(test))?;
        println!("{:.2},{:.6}", cfg.strength(level), result.mu_ssim);
    }
    Ok(())
}

//! Full pair analysis: pooled features on both sides, the residual vector,
//! the `½‖r‖²` diagnostic and the fused 8-dimensional model input.

use rrvqa::fusion::FUSED_NAMES;
use rrvqa::pipeline::analyze_pair;
use rrvqa::synth::{generate_renditions, SynthConfig};
use rrvqa::video::normalize_bit_depth;

fn main() -> rrvqa::Result<()> {
    let cfg = SynthConfig {
        frames: 12,
        ..Default::default()
    };
    let (reference, tests) = generate_renditions(&cfg, 2);
    let reference = normalize_bit_depth(reference);

    for (level, test) in tests.into_iter().enumerate() {
        let a = analyze_pair(reference.clone(), normalize_bit_depth(test))?;
        println!(
            "level {level} (strength {:.2}), kl_proxy {:.4}",
            cfg.strength(level),
            a.kl_proxy
        );
        for (name, v) in FUSED_NAMES.iter().zip(a.fused.to_array()) {
            println!("  {name:>7} {v:>12.6}");
        }
    }
    Ok(())
}

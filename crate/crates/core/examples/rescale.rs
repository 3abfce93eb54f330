//! Aligns a half-resolution, shorter test clip to its reference: bicubic
//! upscaling to the reference grid and truncation to the common frame count.

use rrvqa::synth::{generate_content, SynthConfig};
use rrvqa::video::{align_pair, normalize_bit_depth, rescale_to};

fn main() {
    let cfg = SynthConfig {
        frames: 8,
        ..Default::default()
    };
    let reference = normalize_bit_depth(generate_content(&cfg, 3));
    let mut small = rescale_to(reference.clone(), 32, 32);
    small.truncate(6);
    println!(
        "reference {}x{} x{}",
        reference.width(),
        reference.height(),
        reference.frame_count()
    );
    println!(
        "test      {}x{} x{}",
        small.width(),
        small.height(),
        small.frame_count()
    );

    let (reference, test) = align_pair(reference, small);
    let err: f64 = reference.frames()[0]
        .luma
        .data()
        .iter()
        .zip(test.frames()[0].luma.data())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / (64.0 * 64.0);
    println!(
        "aligned   {}x{} x{}, mean |ref - test| on frame 0: {err:.2}",
        test.width(),
        test.height(),
        test.frame_count()
    );
}

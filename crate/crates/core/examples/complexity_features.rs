//! Per-frame texture energy, temporal change and mean level for a synthetic
//! clip, written as CSV to stdout, followed by the pooled vector.

use rrvqa::features::{
    extract_sequence_features, temporal_pool, write_frame_csv, write_pooled_csv,
};
use rrvqa::synth::{generate_content, SynthConfig};
use rrvqa::video::normalize_bit_depth;

fn main() -> rrvqa::Result<()> {
    let cfg = SynthConfig {
        width: 96,
        height: 64,
        frames: 10,
        ..Default::default()
    };
    let seq = normalize_bit_depth(generate_content(&cfg, 5));
    let frames = extract_sequence_features(&seq)?;
    write_frame_csv(std::io::stdout(), &frames)?;
    println!();
    write_pooled_csv(std::io::stdout(), &temporal_pool(&frames)?)?;
    Ok(())
}

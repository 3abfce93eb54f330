//! Writes a small synthetic corpus (Y4M clips plus `manifest.csv`) to the
//! given directory, ready for `rrvqa features --input <dir>/manifest.csv`.
//!
//! ```text
//! cargo run --example write_corpus -- /tmp/corpus
//! ```

use std::path::PathBuf;

use rrvqa::synth::{write_corpus, SynthConfig};

fn main() -> rrvqa::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("corpus"), PathBuf::from);
    let cfg = SynthConfig {
        contents: 3,
        levels: 4,
        frames: 10,
        ..Default::default()
    };
    let rows = write_corpus(&out, &cfg)?;
    for row in &rows {
        println!("{} <- {} (mos {})", row.test, row.reference, row.mos);
    }
    Ok(())
}

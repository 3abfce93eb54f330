//! End-to-end study on the synthetic corpus: generate 12 contents at 5
//! degradation levels, extract fused features, train on 8 contents and score
//! the 4 held-out ones against their pseudo-MOS.
//!
//! ```text
//! cargo run --release --example synthetic_study -- [seed]
//! ```

use std::time::Instant;

use rayon::prelude::*;
use rrvqa::gbt::{self, GbtParams, TrainingSet};
use rrvqa::metrics::MetricsReport;
use rrvqa::pipeline::analyze_pair;
use rrvqa::synth::{generate_renditions, pseudo_mos, SynthConfig};
use rrvqa::video::normalize_bit_depth;

/// Content index, fused vector, pseudo-MOS.
type Row = (usize, [f64; 8], f64);

fn main() -> rrvqa::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .map_or(0, |s| s.parse().expect("seed must be an integer"));
    let cfg = SynthConfig {
        seed,
        ..SynthConfig::default()
    };
    let start = Instant::now();

    let rows: Vec<Row> = (0..cfg.contents)
        .into_par_iter()
        .map(|c| {
            let (reference, tests) = generate_renditions(&cfg, c);
            let reference = normalize_bit_depth(reference);
            tests
                .into_iter()
                .enumerate()
                .map(|(level, t)| {
                    let a = analyze_pair(reference.clone(), normalize_bit_depth(t))?;
                    Ok((c, a.fused.to_array(), pseudo_mos(cfg.strength(level))))
                })
                .collect::<rrvqa::Result<Vec<_>>>()
        })
        .collect::<rrvqa::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    println!("features: {} pairs in {:.1?}", rows.len(), start.elapsed());

    let train_contents = (cfg.contents as f64 * 0.7).round() as usize;
    let (train, held_out): (Vec<&Row>, Vec<&Row>) = rows.iter().partition(|r| r.0 < train_contents);
    let data = TrainingSet::new(
        train.iter().map(|r| r.1).collect(),
        train.iter().map(|r| r.2).collect(),
    )?;
    let params = GbtParams {
        seed,
        ..GbtParams::tuned()
    };
    let model = gbt::train(&data, &params)?;

    let pred = model.predict_batch(&held_out.iter().map(|r| r.1).collect::<Vec<_>>());
    let mos: Vec<f64> = held_out.iter().map(|r| r.2).collect();
    let report = MetricsReport::compute(&pred, &mos)?;
    println!(
        "trained on {} contents ({} rows), held out {} rows",
        train_contents,
        data.len(),
        mos.len()
    );
    println!("{}\n{}", MetricsReport::CSV_HEADER, report.csv_row());
    println!("total {:.1?}", start.elapsed());
    Ok(())
}

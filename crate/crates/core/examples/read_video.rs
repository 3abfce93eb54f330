//! Decodes a Y4M or raw 4:2:0 file and prints its geometry, bit depth and the
//! mean of each plane on the 8-bit scale. Without arguments a small synthetic
//! clip is written to a temporary file first.
//!
//! ```text
//! cargo run --example read_video -- clip.y4m
//! cargo run --example read_video -- clip.yuv 1920x1080:10
//! ```

use std::path::PathBuf;

use rrvqa::synth::{generate_content, SynthConfig};
use rrvqa::video::{normalize_bit_depth, read_video, write_y4m, RawParams, VideoFormat};

fn main() -> rrvqa::Result<()> {
    let mut args = std::env::args().skip(1);
    let scratch = tempfile::tempdir().expect("temporary directory");
    let path = match args.next() {
        Some(p) => PathBuf::from(p),
        None => {
            let p = scratch.path().join("demo.y4m");
            write_y4m(
                &generate_content(
                    &SynthConfig {
                        frames: 5,
                        ..Default::default()
                    },
                    0,
                ),
                &p,
            )?;
            p
        }
    };
    let raw: Option<RawParams> = args.next().map(|s| s.parse()).transpose()?;

    let seq = read_video(&path, VideoFormat::from_path(&path), raw)?;
    println!(
        "{}: {}x{}, {}-bit, {} frames",
        path.display(),
        seq.width(),
        seq.height(),
        seq.bit_depth(),
        seq.frame_count()
    );
    let seq = normalize_bit_depth(seq);
    for (i, frame) in seq.frames().iter().enumerate() {
        let means: Vec<String> = frame
            .planes()
            .iter()
            .map(|p| {
                format!(
                    "{:.2}",
                    p.data().iter().sum::<f64>() / p.data().len() as f64
                )
            })
            .collect();
        println!("frame {i}: Y/U/V means {}", means.join(" / "));
    }
    Ok(())
}

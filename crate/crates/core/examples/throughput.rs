//! Times feature extraction plus SSIM on a synthetic 8-bit pair at a chosen
//! size, once per requested worker count.
//!
//! ```text
//! cargo run --release --example throughput -- [WxH] [frames] [threads...]
//! cargo run --release --example throughput -- 1920x1080 60 1 8
//! ```

use std::time::Instant;

use rrvqa::features::{temporal_pool, FeatureExtractor};
use rrvqa::ssim::ssim_sequence;
use rrvqa::video::{FramePlanes, NormalizedSequence, Plane, VideoSequence};

fn pattern(w: usize, h: usize, frames: usize, perturb: bool) -> NormalizedSequence {
    let frames = (0..frames)
        .map(|t| {
            let plane = |w: usize, h: usize, salt: usize| {
                Plane::from_fn(w, h, |x, y| {
                    let (xs, ys) = (x + 2 * t, y + t);
                    let v = (xs * 3 + ys * 5 + salt) ^ ((xs * ys) >> 4);
                    let v = (v & 0xff) as f64;
                    if perturb {
                        (v + ((x + y + t) % 5) as f64 - 2.0).clamp(0.0, 255.0)
                    } else {
                        v
                    }
                })
            };
            FramePlanes {
                luma: plane(w, h, 0),
                chroma_u: plane(w.div_ceil(2), h.div_ceil(2), 17),
                chroma_v: plane(w.div_ceil(2), h.div_ceil(2), 91),
            }
        })
        .collect();
    VideoSequence::new(w, h, 8, frames).expect("valid pattern")
}

fn main() -> rrvqa::Result<()> {
    let mut args = std::env::args().skip(1);
    let size = args.next().unwrap_or_else(|| "640x360".into());
    let (w, h) = size.split_once('x').expect("size as WxH");
    let (w, h): (usize, usize) = (w.parse().expect("width"), h.parse().expect("height"));
    let frames: usize = args.next().map_or(30, |s| s.parse().expect("frame count"));
    let mut threads: Vec<usize> = args.map(|s| s.parse().expect("thread count")).collect();
    if threads.is_empty() {
        threads.push(1);
    }

    let reference = pattern(w, h, frames, false);
    let test = pattern(w, h, frames, true);
    for n in threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool");
        let start = Instant::now();
        let mu = pool.install(|| -> rrvqa::Result<f64> {
            let extractor = FeatureExtractor::default();
            temporal_pool(&extractor.sequence(&reference)?)?;
            temporal_pool(&extractor.sequence(&test)?)?;
            Ok(ssim_sequence(&reference, &test)?.mu_ssim)
        })?;
        println!(
            "{w}x{h} x{frames} threads={n}: {:.2?} (mu_ssim {mu:.6})",
            start.elapsed()
        );
    }
    Ok(())
}

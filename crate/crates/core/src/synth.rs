//! Seeded synthetic corpus: moving textured clips, graded degradations, and
//! pseudo-MOS labels `5 − 4 · strength / max_strength`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::OutputGuard;
use crate::video::{FramePlanes, Plane, VideoSequence};

/// Blur σ (pixels) at full strength.
pub const MAX_BLUR_SIGMA: f64 = 1.5;
/// Additive noise σ (8-bit code values) at full strength.
pub const MAX_NOISE_SIGMA: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthConfig {
    pub contents: usize,
    pub levels: usize,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            contents: 12,
            levels: 5,
            width: 64,
            height: 64,
            frames: 30,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.contents == 0 || self.levels < 2 {
            return Err(Error::Config(
                "need at least 1 content and 2 degradation levels".into(),
            ));
        }
        if self.width < 16 || self.height < 16 || self.frames < 2 {
            return Err(Error::Config(
                "clips must be at least 16x16 with 2 frames".into(),
            ));
        }
        Ok(())
    }

    /// Degradation strength of `level`, in [0, 1].
    pub fn strength(&self, level: usize) -> f64 {
        level as f64 / (self.levels - 1) as f64
    }
}

/// Pseudo-MOS for a strength in [0, 1]: 5 for pristine, 1 for the strongest.
pub fn pseudo_mos(strength: f64) -> f64 {
    5.0 - 4.0 * strength
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    #[serde(rename = "ref")]
    pub reference: String,
    pub test: String,
    pub mos: f64,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct Grating {
    amplitude: f64,
    freq: f64,
    angle: f64,
    phase: f64,
    drift: f64,
}

/// A moving textured clip: drifting gratings, a few translating blocks, and
/// smooth chroma gradients. Content `index` draws from its own RNG stream.
pub fn generate_content(cfg: &SynthConfig, index: usize) -> VideoSequence<u16> {
    let mut rng = rng_for(cfg.seed, (index as u64) << 32);
    let detail = rng.random_range(0.3..1.0);
    let gratings: Vec<Grating> = (0..3)
        .map(|_| Grating {
            amplitude: rng.random_range(8.0..40.0) * detail,
            freq: rng.random_range(0.02..0.35),
            angle: rng.random_range(0.0..PI),
            phase: rng.random_range(0.0..2.0 * PI),
            drift: rng.random_range(-0.3..0.3),
        })
        .collect();
    let blocks: Vec<(f64, f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.random_range(0.0..cfg.width as f64),
                rng.random_range(0.0..cfg.height as f64),
                rng.random_range(4.0..16.0),
                rng.random_range(-50.0..50.0),
                rng.random_range(-1.5..1.5),
            )
        })
        .collect();
    let (vx, vy) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let mean = rng.random_range(80.0..170.0);
    let (cu, cv) = (rng.random_range(90.0..160.0), rng.random_range(90.0..160.0));
    let chroma_freq = rng.random_range(0.01..0.06);

    let (w, h) = (cfg.width, cfg.height);
    let (cw, ch) = (w.div_ceil(2), h.div_ceil(2));
    let quantize = |v: f64| v.round().clamp(0.0, 255.0) as u16;

    let frames = (0..cfg.frames)
        .map(|t| {
            let t = t as f64;
            let luma = Plane::from_fn(w, h, |x, y| {
                let (px, py) = (x as f64 - vx * t, y as f64 - vy * t);
                let mut v = mean;
                for g in &gratings {
                    let u = px * g.angle.cos() + py * g.angle.sin();
                    v += g.amplitude * (2.0 * PI * g.freq * u + g.phase + g.drift * t).sin();
                }
                for &(bx, by, size, delta, speed) in &blocks {
                    let (dx, dy) = (px - bx - speed * t, py - by);
                    if dx.abs() < size && dy.abs() < size {
                        v += delta;
                    }
                }
                quantize(v)
            });
            let chroma = |base: f64, phase: f64| {
                Plane::from_fn(cw, ch, |x, y| {
                    let u = (x as f64 - vx * t / 2.0) + 0.7 * (y as f64 - vy * t / 2.0);
                    quantize(base + 20.0 * (2.0 * PI * chroma_freq * u + phase).sin())
                })
            };
            FramePlanes {
                luma,
                chroma_u: chroma(cu, 0.0),
                chroma_v: chroma(cv, 1.3),
            }
        })
        .collect();
    VideoSequence::new(w, h, 8, frames).expect("generated clip satisfies sequence invariants")
}

fn gaussian_blur(plane: &Plane<u16>, sigma: f64) -> Plane<f64> {
    let src = plane.map(f64::from);
    if sigma <= 0.0 {
        return src;
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = taps.iter().sum();
    let taps: Vec<f64> = taps.iter().map(|t| t / norm).collect();
    let (w, h) = (src.width() as isize, src.height() as isize);
    let at = |p: &Plane<f64>, x: isize, y: isize| {
        p.get(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize)
    };
    let horizontal = Plane::from_fn(w as usize, h as usize, |x, y| {
        taps.iter()
            .enumerate()
            .map(|(k, t)| t * at(&src, x as isize + k as isize - radius, y as isize))
            .sum()
    });
    Plane::from_fn(w as usize, h as usize, |x, y| {
        taps.iter()
            .enumerate()
            .map(|(k, t)| t * at(&horizontal, x as isize, y as isize + k as isize - radius))
            .sum()
    })
}

/// Blur then additive Gaussian noise, both scaled by `strength` ∈ [0, 1].
/// Strength 0 returns an exact copy.
pub fn degrade(
    seq: &VideoSequence<u16>,
    strength: f64,
    rng: &mut ChaCha8Rng,
) -> VideoSequence<u16> {
    if strength <= 0.0 {
        return seq.clone();
    }
    let noise = Normal::new(0.0, MAX_NOISE_SIGMA * strength).expect("positive sigma");
    let blur = MAX_BLUR_SIGMA * strength;
    let mut render = |p: &Plane<u16>| -> Plane<u16> {
        let data = gaussian_blur(p, blur)
            .data()
            .iter()
            .map(|&v| (v + noise.sample(rng)).round().clamp(0.0, 255.0) as u16)
            .collect();
        Plane::new(p.width(), p.height(), data).expect("same geometry")
    };
    let mut frames = Vec::with_capacity(seq.frame_count());
    for f in seq.frames() {
        frames.push(FramePlanes {
            luma: render(&f.luma),
            chroma_u: render(&f.chroma_u),
            chroma_v: render(&f.chroma_v),
        });
    }
    VideoSequence::new(seq.width(), seq.height(), 8, frames).expect("degraded clip keeps geometry")
}

pub fn reference_name(content: usize) -> String {
    format!("ref_{content:02}.y4m")
}

pub fn test_name(content: usize, level: usize) -> String {
    format!("test_{content:02}_{level}.y4m")
}

/// In-memory corpus for one content: the reference, then one rendition per level.
pub fn generate_renditions(
    cfg: &SynthConfig,
    content: usize,
) -> (VideoSequence<u16>, Vec<VideoSequence<u16>>) {
    let reference = generate_content(cfg, content);
    let tests = (0..cfg.levels)
        .map(|level| {
            let mut rng = rng_for(cfg.seed, ((content as u64) << 32) | (level as u64 + 1));
            degrade(&reference, cfg.strength(level), &mut rng)
        })
        .collect();
    (reference, tests)
}

/// Writes every clip and `manifest.csv` (`ref,test,mos`, paths relative to
/// `out_dir`) and returns the manifest rows. On failure nothing is left behind.
pub fn write_corpus(out_dir: &Path, cfg: &SynthConfig) -> Result<Vec<ManifestRow>> {
    cfg.validate()?;
    let mut guard = OutputGuard::new();
    if !out_dir.exists() {
        std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        guard.track(out_dir);
    }

    let encoded: Vec<(Vec<u8>, Vec<Vec<u8>>)> = (0..cfg.contents)
        .into_par_iter()
        .map(|c| {
            let (reference, tests) = generate_renditions(cfg, c);
            let tests = tests.iter().map(crate::video::encode_y4m).collect();
            (crate::video::encode_y4m(&reference), tests)
        })
        .collect();

    let mut manifest = Vec::with_capacity(cfg.contents * cfg.levels);
    for (c, (reference, tests)) in encoded.iter().enumerate() {
        guard.write(&out_dir.join(reference_name(c)), reference)?;
        for (level, bytes) in tests.iter().enumerate() {
            guard.write(&out_dir.join(test_name(c, level)), bytes)?;
            manifest.push(ManifestRow {
                reference: reference_name(c),
                test: test_name(c, level),
                mos: pseudo_mos(cfg.strength(level)),
            });
        }
    }

    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in &manifest {
        wtr.serialize(row)?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::io(out_dir, e.into_error()))?;
    guard.write(&out_dir.join("manifest.csv"), &bytes)?;
    guard.commit();
    Ok(manifest)
}

/// Reads a `ref,test,mos` manifest; paths are resolved against its directory.
pub fn read_manifest(path: &Path) -> Result<Vec<(PathBuf, PathBuf, Option<f64>)>> {
    #[derive(Deserialize)]
    struct Row {
        #[serde(rename = "ref")]
        reference: String,
        test: String,
        #[serde(default)]
        mos: Option<f64>,
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => {
            Error::Schema(format!("cannot open manifest {}: {e}", path.display()))
        }
        _ => Error::Csv(e),
    })?;
    let headers = rdr.headers()?.clone();
    for col in ["ref", "test"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Schema(format!("manifest is missing column '{col}'")));
        }
    }
    rdr.deserialize::<Row>()
        .map(|r| {
            let r = r?;
            Ok((base.join(r.reference), base.join(r.test), r.mos))
        })
        .collect()
}

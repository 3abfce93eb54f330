//! Independent reference implementations and fixtures shared by the
//! integration tests. Everything here favours the most literal formula over
//! speed.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrvqa::video::{FramePlanes, NormalizedSequence, Plane, VideoSequence};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- DCT

/// `X[u][v] = a(u) a(v) Σ_x Σ_y x[y][x] cos((2x+1)vπ/2w) cos((2y+1)uπ/2w)`,
/// row-major with `u` the vertical frequency.
pub fn naive_dct2d(block: &[f64], w: usize) -> Vec<f64> {
    let alpha = |k: usize| {
        if k == 0 {
            (1.0 / w as f64).sqrt()
        } else {
            (2.0 / w as f64).sqrt()
        }
    };
    let mut out = vec![0.0; w * w];
    for u in 0..w {
        for v in 0..w {
            let mut s = 0.0;
            for y in 0..w {
                for x in 0..w {
                    s += block[y * w + x]
                        * ((2 * x + 1) as f64 * v as f64 * PI / (2 * w) as f64).cos()
                        * ((2 * y + 1) as f64 * u as f64 * PI / (2 * w) as f64).cos();
                }
            }
            out[u * w + v] = alpha(u) * alpha(v) * s;
        }
    }
    out
}

// ---------------------------------------------------------------- SSIM

/// Mean SSIM over every valid 11×11 window, each window evaluated from
/// scratch with explicit two-pass weighted moments.
pub fn naive_ssim(a: &Plane<f64>, b: &Plane<f64>) -> f64 {
    const N: usize = 11;
    let c1 = (0.01f64 * 255.0).powi(2);
    let c2 = (0.03f64 * 255.0).powi(2);
    let g: Vec<f64> = (0..N)
        .map(|i| {
            let d = i as f64 - 5.0;
            (-(d * d) / (2.0 * 1.5 * 1.5)).exp()
        })
        .collect();
    let mut weights = vec![0.0; N * N];
    for i in 0..N {
        for j in 0..N {
            weights[i * N + j] = g[i] * g[j];
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);

    let (w, h) = (a.width(), a.height());
    let mut sum = 0.0;
    let mut count = 0usize;
    for oy in 0..=h - N {
        for ox in 0..=w - N {
            let window = |p: &Plane<f64>| -> Vec<f64> {
                (0..N * N).map(|k| p.get(ox + k % N, oy + k / N)).collect()
            };
            let (wa, wb) = (window(a), window(b));
            let mean = |v: &[f64]| v.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>();
            let (ma, mb) = (mean(&wa), mean(&wb));
            let mut va = 0.0;
            let mut vb = 0.0;
            let mut cov = 0.0;
            for k in 0..N * N {
                va += weights[k] * (wa[k] - ma) * (wa[k] - ma);
                vb += weights[k] * (wb[k] - mb) * (wb[k] - mb);
                cov += weights[k] * (wa[k] - ma) * (wb[k] - mb);
            }
            sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1;
        }
    }
    sum / count as f64
}

pub fn random_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Plane<f64> {
    Plane::from_fn(w, h, |_, _| rng.random_range(0..=255) as f64)
}

/// A smooth random image with a little pixel noise, closer to natural
/// content than white noise.
pub fn textured_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Plane<f64> {
    let (fx, fy, ph) = (
        rng.random_range(0.05..0.4),
        rng.random_range(0.05..0.4),
        rng.random_range(0.0..6.0),
    );
    Plane::from_fn(w, h, |x, y| {
        let v = 128.0
            + 60.0 * (fx * x as f64 + ph).sin() * (fy * y as f64).cos()
            + rng.random_range(-20.0..20.0);
        v.round().clamp(0.0, 255.0)
    })
}

pub fn add_noise(rng: &mut ChaCha8Rng, p: &Plane<f64>, sigma: f64) -> Plane<f64> {
    let normal = rand_distr::Normal::new(0.0, sigma).unwrap();
    let data = p
        .data()
        .iter()
        .map(|&v| (v + rng.sample(normal)).round().clamp(0.0, 255.0))
        .collect();
    Plane::new(p.width(), p.height(), data).unwrap()
}

// ---------------------------------------------------------------- GBT

/// Exhaustive single split: every feature, every midpoint between distinct
/// sorted values, children summed directly. Ties keep the first candidate in
/// (feature, threshold) order. Returns `(feature, threshold, gain)`.
pub fn brute_force_split(x: &[[f64; 8]], grad: &[f64], lambda: f64) -> Option<(usize, f64, f64)> {
    let score = |rows: &[usize]| {
        let g: f64 = rows.iter().map(|&i| grad[i]).sum();
        g * g / (rows.len() as f64 + lambda)
    };
    let all: Vec<usize> = (0..x.len()).collect();
    let parent = score(&all);
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..8 {
        let mut values: Vec<f64> = x.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let t = pair[0] + (pair[1] - pair[0]) / 2.0;
            let (left, right): (Vec<usize>, Vec<usize>) = all.iter().partition(|&&i| x[i][f] < t);
            let gain = 0.5 * (score(&left) + score(&right) - parent);
            if gain > 0.0 && best.is_none_or(|b| gain > b.2) {
                best = Some((f, t, gain));
            }
        }
    }
    best
}

// ---------------------------------------------------------------- metrics

pub fn oracle_pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for i in 0..a.len() {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Average rank by counting: 1 + #less + (#equal − 1) / 2.
pub fn oracle_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&x| {
            let less = v.iter().filter(|&&y| y < x).count() as f64;
            let equal = v.iter().filter(|&&y| y == x).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn oracle_spearman(a: &[f64], b: &[f64]) -> f64 {
    oracle_pearson(&oracle_ranks(a), &oracle_ranks(b))
}

/// Kendall tau-b by enumerating all pairs.
pub fn oracle_kendall(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let (mut concordant, mut discordant, mut tie_a, mut tie_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let da = a[i].total_cmp(&a[j]) as i8;
            let db = b[i].total_cmp(&b[j]) as i8;
            if da == 0 {
                tie_a += 1;
            }
            if db == 0 {
                tie_b += 1;
            }
            if da * db > 0 {
                concordant += 1;
            } else if da * db < 0 {
                discordant += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    (concordant - discordant) as f64 / (((n0 - tie_a) * (n0 - tie_b)) as f64).sqrt()
}

pub fn oracle_rmse(a: &[f64], b: &[f64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64).sqrt()
}

/// A pair of non-constant vectors of length 3..=12 drawn from a small
/// integer alphabet so ties are common.
pub fn tied_vectors(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    loop {
        let n = rng.random_range(3..=12);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..5) as f64).collect();
        let b: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0..5) as f64 * 0.5 + 1.0)
            .collect();
        let varies = |v: &[f64]| v.iter().any(|&x| x != v[0]);
        if varies(&a) && varies(&b) {
            return (a, b);
        }
    }
}

// ---------------------------------------------------------------- video

/// Deterministic moving 8-bit-range pattern built directly in normalized form.
pub fn pattern_sequence(w: usize, h: usize, frames: usize, perturb: bool) -> NormalizedSequence {
    let frames = (0..frames)
        .map(|t| {
            let plane = |w: usize, h: usize, salt: usize| {
                Plane::from_fn(w, h, |x, y| {
                    let (xs, ys) = (x + 2 * t, y + t);
                    let v = ((xs * 3 + ys * 5 + salt) ^ ((xs * ys) >> 4)) & 0xff;
                    if perturb {
                        (v as f64 + ((x + y + t) % 5) as f64 - 2.0).clamp(0.0, 255.0)
                    } else {
                        v as f64
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
    VideoSequence::new(w, h, 8, frames).unwrap()
}

pub fn bin() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_rrvqa"))
}

/// Runs the binary and panics with its stderr unless it exits 0.
pub fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("spawn rrvqa");
    assert!(
        out.status.success(),
        "rrvqa {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// All files under `dir` as (relative name, bytes), sorted by name.
pub fn dir_contents(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

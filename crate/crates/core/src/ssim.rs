//! Single-scale SSIM on luma with an 11×11 Gaussian window (σ = 1.5).
//!
//! Local moments are computed with a separable filter over "valid" window
//! positions only (no padding). Rows are streamed through an 11-row ring
//! buffer, so memory use is independent of frame height.

use std::io::Write;

use rayon::prelude::*;

use crate::csvio::fmt_num;
use crate::error::{Error, Result};
use crate::video::{NormalizedSequence, Plane};

pub const WINDOW: usize = 11;
pub const SIGMA: f64 = 1.5;
pub const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
pub const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
pub fn gaussian_taps() -> [f64; WINDOW] {
    let mut taps = [0.0; WINDOW];
    let centre = (WINDOW / 2) as f64;
    for (i, t) in taps.iter_mut().enumerate() {
        let d = i as f64 - centre;
        *t = (-(d * d) / (2.0 * SIGMA * SIGMA)).exp();
    }
    let sum: f64 = taps.iter().sum();
    taps.map(|t| t / sum)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SsimResult {
    pub per_frame: Vec<f64>,
    pub mu_ssim: f64,
}

impl SsimResult {
    pub fn from_frames(per_frame: Vec<f64>) -> Result<Self> {
        if per_frame.is_empty() {
            return Err(Error::EmptyInput("no SSIM values to pool"));
        }
        let mu_ssim = per_frame.iter().sum::<f64>() / per_frame.len() as f64;
        Ok(SsimResult { per_frame, mu_ssim })
    }

    /// Writes `frame,ssim` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["frame", "ssim"])?;
        for (i, v) in self.per_frame.iter().enumerate() {
            wtr.write_record([i.to_string(), fmt_num(*v)])?;
        }
        wtr.flush().map_err(|e| Error::io("<ssim>", e))?;
        Ok(())
    }
}

const MOMENTS: usize = 5;

/// SSIM of two aligned planes on the 8-bit scale.
pub fn ssim_frame(reference: &Plane<f64>, test: &Plane<f64>) -> Result<f64> {
    if (reference.width(), reference.height()) != (test.width(), test.height()) {
        return Err(Error::Alignment(format!(
            "reference plane is {}x{}, test plane is {}x{}",
            reference.width(),
            reference.height(),
            test.width(),
            test.height()
        )));
    }
    let (w, h) = (reference.width(), reference.height());
    if w < WINDOW || h < WINDOW {
        return Err(Error::InputTooSmall(format!(
            "{w}x{h} plane is smaller than the {WINDOW}x{WINDOW} window"
        )));
    }

    let taps = gaussian_taps();
    let out_w = w - WINDOW + 1;
    let out_h = h - WINDOW + 1;

    // ring[slot][moment] holds one horizontally filtered row.
    let mut ring = vec![vec![0.0; out_w * MOMENTS]; WINDOW];
    let mut products = vec![0.0; w * MOMENTS];
    let mut acc = vec![0.0; out_w * MOMENTS];
    let mut total = 0.0;

    for y in 0..h {
        let (a, b) = (reference.row(y), test.row(y));
        {
            let (pa, rest) = products.split_at_mut(w);
            let (pb, rest) = rest.split_at_mut(w);
            let (paa, rest) = rest.split_at_mut(w);
            let (pbb, pab) = rest.split_at_mut(w);
            for x in 0..w {
                pa[x] = a[x];
                pb[x] = b[x];
                paa[x] = a[x] * a[x];
                pbb[x] = b[x] * b[x];
                pab[x] = a[x] * b[x];
            }
        }
        let slot = &mut ring[y % WINDOW];
        slot.fill(0.0);
        for m in 0..MOMENTS {
            let src = &products[m * w..(m + 1) * w];
            let dst = &mut slot[m * out_w..(m + 1) * out_w];
            for (k, &t) in taps.iter().enumerate() {
                for (d, &s) in dst.iter_mut().zip(&src[k..k + out_w]) {
                    *d += t * s;
                }
            }
        }

        if y + 1 < WINDOW {
            continue;
        }
        let top = y + 1 - WINDOW;
        acc.fill(0.0);
        for (k, &t) in taps.iter().enumerate() {
            let src = &ring[(top + k) % WINDOW];
            for (d, &s) in acc.iter_mut().zip(src) {
                *d += t * s;
            }
        }
        let (mu_a, rest) = acc.split_at(out_w);
        let (mu_b, rest) = rest.split_at(out_w);
        let (e_aa, rest) = rest.split_at(out_w);
        let (e_bb, e_ab) = rest.split_at(out_w);
        let mut row_sum = 0.0;
        for x in 0..out_w {
            row_sum += ssim_from_moments(mu_a[x], mu_b[x], e_aa[x], e_bb[x], e_ab[x]);
        }
        total += row_sum;
    }

    Ok(total / (out_w * out_h) as f64)
}

/// SSIM of one window from its weighted first and second moments.
#[inline]
pub fn ssim_from_moments(mu_a: f64, mu_b: f64, e_aa: f64, e_bb: f64, e_ab: f64) -> f64 {
    let var_a = e_aa - mu_a * mu_a;
    let var_b = e_bb - mu_b * mu_b;
    let cov = e_ab - mu_a * mu_b;
    let num = (2.0 * mu_a * mu_b + C1) * (2.0 * cov + C2);
    let den = (mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2);
    num / den
}

/// Per-frame luma SSIM for two aligned sequences, pooled over all frames.
/// Frames are evaluated on the current rayon pool and reduced in frame order.
pub fn ssim_sequence(
    reference: &NormalizedSequence,
    test: &NormalizedSequence,
) -> Result<SsimResult> {
    if reference.frame_count() != test.frame_count() {
        return Err(Error::Alignment(format!(
            "reference has {} frames, test has {}",
            reference.frame_count(),
            test.frame_count()
        )));
    }
    let per_frame = reference
        .frames()
        .par_iter()
        .zip(test.frames().par_iter())
        .map(|(r, t)| ssim_frame(&r.luma, &t.luma))
        .collect::<Result<Vec<f64>>>()?;
    SsimResult::from_frames(per_frame)
}

//! Block-DCT complexity features.
//!
//! Every frame is reduced to seven numbers: texture energy, mean level and
//! (for luma) the temporal change of texture energy. Texture energy of a block
//! is a frequency-weighted sum of absolute AC coefficients of its orthonormal
//! DCT; the frame value is the block sum normalized by `K · w²`, so frames of
//! different resolution are directly comparable.

mod dct;

pub use dct::{dct2d, Dct2d};

use std::io::Write;

use rayon::prelude::*;

use crate::csvio::fmt_num;
use crate::error::{Error, Result};
use crate::video::{FramePlanes, NormalizedSequence, Plane};

pub const LUMA_BLOCK: usize = 32;
pub const CHROMA_BLOCK: usize = 16;

/// Column names in feature-vector order.
pub const FEATURE_NAMES: [&str; 7] = ["E_Y", "h", "L_Y", "E_U", "L_U", "E_V", "L_V"];

/// Per-frame complexity vector.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FrameFeatures {
    pub e_y: f64,
    pub h: f64,
    pub l_y: f64,
    pub e_u: f64,
    pub l_u: f64,
    pub e_v: f64,
    pub l_v: f64,
}

impl FrameFeatures {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.e_y, self.h, self.l_y, self.e_u, self.l_u, self.e_v, self.l_v,
        ]
    }

    pub fn from_array(v: [f64; 7]) -> Self {
        FrameFeatures {
            e_y: v[0],
            h: v[1],
            l_y: v[2],
            e_u: v[3],
            l_u: v[4],
            e_v: v[5],
            l_v: v[6],
        }
    }
}

/// Segment-level mean of per-frame features.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PooledFeatures {
    pub mean: FrameFeatures,
    pub frame_count: usize,
}

/// Per-block texture energies of one plane, in raster order.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyMap {
    block_size: usize,
    rows: usize,
    cols: usize,
    energies: Vec<f64>,
}

impl EnergyMap {
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn total(&self) -> f64 {
        self.energies.iter().sum()
    }

    /// Sum over blocks divided by `K · w²`.
    pub fn normalized_total(&self) -> f64 {
        self.total() / self.normalizer()
    }

    /// Mean absolute block-energy difference against `prev`, normalized like
    /// [`normalized_total`](Self::normalized_total).
    pub fn normalized_sad(&self, prev: &EnergyMap) -> Result<f64> {
        if (self.rows, self.cols, self.block_size) != (prev.rows, prev.cols, prev.block_size) {
            return Err(Error::Internal(format!(
                "energy map {}x{} (w={}) does not match previous {}x{} (w={})",
                self.rows, self.cols, self.block_size, prev.rows, prev.cols, prev.block_size
            )));
        }
        let sad: f64 = self
            .energies
            .iter()
            .zip(&prev.energies)
            .map(|(a, b)| (a - b).abs())
            .sum();
        Ok(sad / self.normalizer())
    }

    fn normalizer(&self) -> f64 {
        (self.energies.len() * self.block_size * self.block_size) as f64
    }
}

/// DCT plan plus frequency weights for one block size.
#[derive(Clone, Debug)]
pub struct TextureEnergy {
    dct: Dct2d,
    weights: Vec<f64>,
}

impl TextureEnergy {
    pub fn new(w: usize) -> Self {
        let w2 = (w * w) as f64;
        let mut weights = Vec::with_capacity(w * w);
        for i in 0..w {
            for j in 0..w {
                let r = (i * j) as f64 / w2;
                weights.push((r * r - 1.0).abs().exp());
            }
        }
        weights[0] = 0.0;
        TextureEnergy {
            dct: Dct2d::new(w),
            weights,
        }
    }

    pub fn block_size(&self) -> usize {
        self.dct.size()
    }

    /// Weighted sum of absolute AC coefficients; DC carries zero weight.
    pub fn energy(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| w * c.abs())
            .sum()
    }

    /// Energy map of `plane`, with edge blocks padded by sample replication.
    pub fn energy_map(&self, plane: &Plane<f64>) -> EnergyMap {
        let w = self.block_size();
        let cols = plane.width().div_ceil(w);
        let rows = plane.height().div_ceil(w);
        let mut block = vec![0.0; w * w];
        let mut scratch = vec![0.0; w * w];
        let mut coeffs = vec![0.0; w * w];
        let mut energies = Vec::with_capacity(rows * cols);
        let max_x = plane.width() - 1;
        let max_y = plane.height() - 1;
        for by in 0..rows {
            for bx in 0..cols {
                for dy in 0..w {
                    let src = plane.row((by * w + dy).min(max_y));
                    let dst = &mut block[dy * w..(dy + 1) * w];
                    let x0 = bx * w;
                    if x0 + w <= plane.width() {
                        dst.copy_from_slice(&src[x0..x0 + w]);
                    } else {
                        for (dx, d) in dst.iter_mut().enumerate() {
                            *d = src[(x0 + dx).min(max_x)];
                        }
                    }
                }
                self.dct.forward_into(&block, &mut scratch, &mut coeffs);
                energies.push(self.energy(&coeffs));
            }
        }
        EnergyMap {
            block_size: w,
            rows,
            cols,
            energies,
        }
    }
}

/// `Σ_{(i,j) ≠ (0,0)} exp(|(i·j / w²)² − 1|) · |coeff(i, j)|` for a `w × w` block.
pub fn block_texture_energy(coeffs: &[f64], w: usize) -> f64 {
    assert_eq!(coeffs.len(), w * w, "coefficient block must hold w² values");
    TextureEnergy::new(w).energy(coeffs)
}

pub fn frame_energy_map(plane: &Plane<f64>, w: usize) -> EnergyMap {
    TextureEnergy::new(w).energy_map(plane)
}

fn plane_mean(plane: &Plane<f64>) -> f64 {
    plane.data().iter().sum::<f64>() / plane.data().len() as f64
}

/// Reusable extractor holding the luma and chroma transform plans.
#[derive(Clone, Debug)]
pub struct FeatureExtractor {
    luma: TextureEnergy,
    chroma: TextureEnergy,
}

impl Default for FeatureExtractor {
    fn default() -> Self {
        FeatureExtractor {
            luma: TextureEnergy::new(LUMA_BLOCK),
            chroma: TextureEnergy::new(CHROMA_BLOCK),
        }
    }
}

impl FeatureExtractor {
    /// Features of one frame with `h = 0`, plus the luma energy map.
    fn spatial(&self, frame: &FramePlanes<f64>) -> (FrameFeatures, EnergyMap) {
        let luma_map = self.luma.energy_map(&frame.luma);
        let features = FrameFeatures {
            e_y: luma_map.normalized_total(),
            h: 0.0,
            l_y: plane_mean(&frame.luma),
            e_u: self.chroma.energy_map(&frame.chroma_u).normalized_total(),
            l_u: plane_mean(&frame.chroma_u),
            e_v: self.chroma.energy_map(&frame.chroma_v).normalized_total(),
            l_v: plane_mean(&frame.chroma_v),
        };
        (features, luma_map)
    }

    pub fn frame(
        &self,
        frame: &FramePlanes<f64>,
        prev_luma_energy: Option<&EnergyMap>,
    ) -> Result<(FrameFeatures, EnergyMap)> {
        let (mut features, map) = self.spatial(frame);
        if let Some(prev) = prev_luma_energy {
            features.h = map.normalized_sad(prev)?;
        }
        Ok((features, map))
    }

    /// Per-frame features for a whole sequence. Spatial work runs on the
    /// current rayon pool; the temporal term is chained sequentially afterwards,
    /// so results do not depend on the worker count.
    pub fn sequence(&self, seq: &NormalizedSequence) -> Result<Vec<FrameFeatures>> {
        let spatial: Vec<(FrameFeatures, EnergyMap)> =
            seq.frames().par_iter().map(|f| self.spatial(f)).collect();
        let mut out = Vec::with_capacity(spatial.len());
        for (i, (features, map)) in spatial.iter().enumerate() {
            let mut features = *features;
            if i > 0 {
                features.h = map.normalized_sad(&spatial[i - 1].1)?;
            }
            out.push(features);
        }
        Ok(out)
    }
}

pub fn extract_frame_features(
    frame: &FramePlanes<f64>,
    prev_luma_energy: Option<&EnergyMap>,
) -> Result<(FrameFeatures, EnergyMap)> {
    FeatureExtractor::default().frame(frame, prev_luma_energy)
}

pub fn extract_sequence_features(seq: &NormalizedSequence) -> Result<Vec<FrameFeatures>> {
    FeatureExtractor::default().sequence(seq)
}

/// Component-wise mean. The temporal term is averaged over frames `1..N`
/// only, since frame 0 has no predecessor.
pub fn temporal_pool(features: &[FrameFeatures]) -> Result<PooledFeatures> {
    if features.is_empty() {
        return Err(Error::EmptyInput("no frame features to pool"));
    }
    let n = features.len() as f64;
    let mut sum = [0.0; 7];
    for f in features {
        for (s, v) in sum.iter_mut().zip(f.to_array()) {
            *s += v;
        }
    }
    let mut mean = sum.map(|s| s / n);
    mean[1] = if features.len() > 1 {
        features[1..].iter().map(|f| f.h).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(PooledFeatures {
        mean: FrameFeatures::from_array(mean),
        frame_count: features.len(),
    })
}

/// Writes `frame,E_Y,h,L_Y,E_U,L_U,E_V,L_V` rows.
pub fn write_frame_csv<W: Write>(out: W, features: &[FrameFeatures]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["frame"];
    header.extend(FEATURE_NAMES);
    wtr.write_record(&header)?;
    for (i, f) in features.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(f.to_array().iter().map(|&v| fmt_num(v)));
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::io("<frame features>", e))?;
    Ok(())
}

/// Writes the one-row `E_Y,h,L_Y,E_U,L_U,E_V,L_V` summary.
pub fn write_pooled_csv<W: Write>(out: W, pooled: &PooledFeatures) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(FEATURE_NAMES)?;
    wtr.write_record(pooled.mean.to_array().iter().map(|&v| fmt_num(v)))?;
    wtr.flush().map_err(|e| Error::io("<pooled features>", e))?;
    Ok(())
}

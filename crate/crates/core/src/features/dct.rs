//! Orthonormal 2-D DCT-II on square blocks.

use std::f64::consts::PI;

/// Precomputed basis for a `w × w` transform.
///
/// `basis[k * w + n] = α(k) · cos(π (2n + 1) k / 2w)` with `α(0) = √(1/w)` and
/// `α(k) = √(2/w)` otherwise, so the transform is orthonormal and
/// `Σ coeff² = Σ sample²`.
#[derive(Clone, Debug)]
pub struct Dct2d {
    size: usize,
    basis: Vec<f64>,
}

impl Dct2d {
    pub fn new(size: usize) -> Self {
        assert!(size > 0, "block size must be positive");
        let w = size as f64;
        let mut basis = Vec::with_capacity(size * size);
        for k in 0..size {
            let alpha = if k == 0 {
                (1.0 / w).sqrt()
            } else {
                (2.0 / w).sqrt()
            };
            for n in 0..size {
                basis.push(alpha * (PI * (2 * n + 1) as f64 * k as f64 / (2.0 * w)).cos());
            }
        }
        Dct2d { size, basis }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Transforms `block` (row-major, `w²` samples) into `out`.
    /// `scratch` must also hold `w²` values.
    pub fn forward_into(&self, block: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        let w = self.size;
        debug_assert_eq!(block.len(), w * w);
        // Columns: scratch[k][x] = Σ_y basis[k][y] · block[y][x]
        scratch.fill(0.0);
        for k in 0..w {
            let dst = &mut scratch[k * w..(k + 1) * w];
            for y in 0..w {
                let c = self.basis[k * w + y];
                let src = &block[y * w..(y + 1) * w];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += c * s;
                }
            }
        }
        // Rows: out[k][l] = Σ_x scratch[k][x] · basis[l][x]
        for k in 0..w {
            let src = &scratch[k * w..(k + 1) * w];
            for l in 0..w {
                let b = &self.basis[l * w..(l + 1) * w];
                out[k * w + l] = src.iter().zip(b).map(|(s, c)| s * c).sum();
            }
        }
    }

    pub fn forward(&self, block: &[f64]) -> Vec<f64> {
        let n = self.size * self.size;
        let mut scratch = vec![0.0; n];
        let mut out = vec![0.0; n];
        self.forward_into(block, &mut scratch, &mut out);
        out
    }
}

/// Convenience wrapper: orthonormal DCT-II of a `w × w` block.
pub fn dct2d(block: &[f64], w: usize) -> Vec<f64> {
    assert_eq!(block.len(), w * w, "block must hold w² samples");
    Dct2d::new(w).forward(block)
}

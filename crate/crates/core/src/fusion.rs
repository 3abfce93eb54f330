//! Residual features, the information-loss diagnostic, and the fused model input.

use crate::error::{Error, Result};
use crate::features::PooledFeatures;

/// Fused-vector column names; this order is the model and file contract.
pub const FUSED_NAMES: [&str; 8] = [
    "r_E", "r_h", "r_L", "r_EU", "r_LU", "r_EV", "r_LV", "mu_ssim",
];

/// Reference-minus-test pooled features, in feature-vector order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ResidualVector {
    pub r_e: f64,
    pub r_h: f64,
    pub r_l: f64,
    pub r_eu: f64,
    pub r_lu: f64,
    pub r_ev: f64,
    pub r_lv: f64,
}

impl ResidualVector {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.r_e, self.r_h, self.r_l, self.r_eu, self.r_lu, self.r_ev, self.r_lv,
        ]
    }

    pub fn from_array(v: [f64; 7]) -> Self {
        ResidualVector {
            r_e: v[0],
            r_h: v[1],
            r_l: v[2],
            r_eu: v[3],
            r_lu: v[4],
            r_ev: v[5],
            r_lv: v[6],
        }
    }

    pub fn squared_norm(&self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum()
    }
}

/// `[r | mu_ssim]`, the eight-dimensional regression input.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FusedFeature {
    pub residual: ResidualVector,
    pub mu_ssim: f64,
}

impl FusedFeature {
    pub fn to_array(&self) -> [f64; 8] {
        let r = self.residual.to_array();
        [r[0], r[1], r[2], r[3], r[4], r[5], r[6], self.mu_ssim]
    }

    pub fn from_array(z: [f64; 8]) -> Self {
        FusedFeature {
            residual: ResidualVector::from_array([z[0], z[1], z[2], z[3], z[4], z[5], z[6]]),
            mu_ssim: z[7],
        }
    }
}

pub fn residual(reference: &PooledFeatures, test: &PooledFeatures) -> ResidualVector {
    let (a, b) = (reference.mean.to_array(), test.mean.to_array());
    ResidualVector::from_array(std::array::from_fn(|i| a[i] - b[i]))
}

/// `½‖r‖²`. Reported as a diagnostic only; it is not a model input.
pub fn kl_proxy(r: &ResidualVector) -> f64 {
    0.5 * r.squared_norm()
}

pub fn fuse(r: ResidualVector, mu_ssim: f64) -> Result<FusedFeature> {
    if !(-1.0..=1.0).contains(&mu_ssim) {
        return Err(Error::Range(format!(
            "mu_ssim {mu_ssim} is outside [-1, 1]"
        )));
    }
    Ok(FusedFeature {
        residual: r,
        mu_ssim,
    })
}

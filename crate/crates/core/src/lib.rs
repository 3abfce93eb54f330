//! Reduced-reference video quality assessment.
//!
//! A reference clip and a processed (test) clip are each reduced to seven
//! block-DCT complexity statistics per frame, pooled over time, and
//! differenced. The seven residuals plus the mean luma SSIM between the clips
//! form an eight-dimensional vector that a gradient-boosted tree ensemble maps
//! to a quality score.
//!
//! | module | role |
//! |---|---|
//! | [`video`] | Y4M / raw planar decoding, bit-depth normalization, bicubic rescale |
//! | [`features`] | per-frame texture energy, temporal change, mean level; temporal pooling |
//! | [`ssim`] | 11×11 Gaussian-window SSIM and per-sequence pooling |
//! | [`fusion`] | residuals, `½‖r‖²` diagnostic, fused vector |
//! | [`gbt`] | boosted regression trees: training, prediction, JSON model files, importance |
//! | [`tuning`] | seeded random search with k-fold cross-validation |
//! | [`metrics`] | SROCC, PLCC, KROCC, RMSE |
//! | [`synth`] | seeded synthetic corpus with pseudo-MOS labels |
//! | [`cli`] | the `rrvqa` command line |

pub mod cli;
pub mod csvio;
pub mod error;
pub mod features;
pub mod fusion;
pub mod gbt;
pub mod metrics;
pub mod output;
pub mod pipeline;
pub mod ssim;
pub mod synth;
pub mod tuning;
pub mod video;

pub use error::{Error, Result};

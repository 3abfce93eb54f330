//! Reference/test comparison: alignment, complexity features on both sides,
//! residuals, SSIM, and the fused vector.

use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{temporal_pool, FeatureExtractor, FrameFeatures, PooledFeatures};
use crate::fusion::{fuse, kl_proxy, residual, FusedFeature, ResidualVector};
use crate::ssim::{ssim_sequence, SsimResult};
use crate::video::{
    align_pair, normalize_bit_depth, read_video, NormalizedSequence, RawParams, VideoFormat,
};

/// Everything computed for one reference/test pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairAnalysis {
    pub reference_frames: Vec<FrameFeatures>,
    pub test_frames: Vec<FrameFeatures>,
    pub reference_pooled: PooledFeatures,
    pub test_pooled: PooledFeatures,
    pub residual: ResidualVector,
    pub ssim: SsimResult,
    pub fused: FusedFeature,
    pub kl_proxy: f64,
}

/// Aligns `test` to `reference` and runs the full feature pipeline.
pub fn analyze_pair(
    reference: NormalizedSequence,
    test: NormalizedSequence,
) -> Result<PairAnalysis> {
    let (reference, test) = align_pair(reference, test);
    let extractor = FeatureExtractor::default();
    let reference_frames = extractor.sequence(&reference)?;
    let test_frames = extractor.sequence(&test)?;
    let reference_pooled = temporal_pool(&reference_frames)?;
    let test_pooled = temporal_pool(&test_frames)?;
    let r = residual(&reference_pooled, &test_pooled);
    let ssim = ssim_sequence(&reference, &test)?;
    let fused = fuse(r, ssim.mu_ssim)?;
    Ok(PairAnalysis {
        reference_frames,
        test_frames,
        reference_pooled,
        test_pooled,
        residual: r,
        kl_proxy: kl_proxy(&r),
        ssim,
        fused,
    })
}

/// Reads and normalizes a video, choosing Y4M or raw from the extension.
pub fn load_normalized(path: &Path, raw: Option<RawParams>) -> Result<NormalizedSequence> {
    let seq = read_video(path, VideoFormat::from_path(path), raw)
        .map_err(|e| e.at_stage("decode", path))?;
    Ok(normalize_bit_depth(seq))
}

pub fn analyze_files(
    reference: &Path,
    test: &Path,
    raw: Option<RawParams>,
) -> Result<PairAnalysis> {
    let r = load_normalized(reference, raw)?;
    let t = load_normalized(test, raw)?;
    analyze_pair(r, t).map_err(|e| match e {
        e @ Error::Stage { .. } => e,
        e => e.at_stage("feature extraction", test),
    })
}

/// Pair analysis reduced to just the fused vector.
pub fn fused_feature(
    reference: &Path,
    test: &Path,
    raw: Option<RawParams>,
) -> Result<FusedFeature> {
    analyze_files(reference, test, raw).map(|a| a.fused)
}

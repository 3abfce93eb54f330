//! Separable Catmull-Rom (bicubic, a = −0.5) resampling with edge replication.

use super::{normalized_max, FramePlanes, NormalizedSequence, Plane, VideoSequence};

const A: f64 = -0.5;

fn cubic(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Four source indices (already clamped) and their weights per output sample.
fn taps(src_len: usize, dst_len: usize) -> Vec<([usize; 4], [f64; 4])> {
    let scale = src_len as f64 / dst_len as f64;
    let last = src_len as isize - 1;
    (0..dst_len)
        .map(|d| {
            let pos = (d as f64 + 0.5) * scale - 0.5;
            let base = pos.floor();
            let t = pos - base;
            let base = base as isize;
            let idx = [-1isize, 0, 1, 2].map(|o| (base + o).clamp(0, last) as usize);
            let w = [cubic(t + 1.0), cubic(t), cubic(1.0 - t), cubic(2.0 - t)];
            (idx, w)
        })
        .collect()
}

/// Resamples one plane to `width × height`, clamping results to `[lo, hi]`.
pub fn resample_plane(
    src: &Plane<f64>,
    width: usize,
    height: usize,
    lo: f64,
    hi: f64,
) -> Plane<f64> {
    if src.width() == width && src.height() == height {
        return src.clone();
    }
    let htaps = taps(src.width(), width);
    let mut horizontal = Vec::with_capacity(width * src.height());
    for y in 0..src.height() {
        let row = src.row(y);
        horizontal.extend(
            htaps
                .iter()
                .map(|(idx, w)| (0..4).map(|k| w[k] * row[idx[k]]).sum::<f64>()),
        );
    }

    let vtaps = taps(src.height(), height);
    let mut data = vec![0.0; width * height];
    for (y, (idx, w)) in vtaps.iter().enumerate() {
        let out = &mut data[y * width..(y + 1) * width];
        for k in 0..4 {
            let row = &horizontal[idx[k] * width..(idx[k] + 1) * width];
            for (o, &v) in out.iter_mut().zip(row) {
                *o += w[k] * v;
            }
        }
        for o in out.iter_mut() {
            *o = o.clamp(lo, hi);
        }
    }
    Plane {
        width,
        height,
        data,
    }
}

/// Resamples every plane of every frame so the luma plane is `width × height`.
/// Returns the input unchanged when it already has that geometry.
pub fn rescale_to(seq: NormalizedSequence, width: usize, height: usize) -> NormalizedSequence {
    assert!(
        width >= 2 && height >= 2,
        "target geometry must be at least 2x2"
    );
    if seq.width() == width && seq.height() == height {
        return seq;
    }
    let hi = normalized_max(seq.bit_depth());
    let (cw, ch) = seq.chroma().plane_size(width, height);
    let bit_depth = seq.bit_depth();
    let frames = seq
        .into_frames()
        .into_iter()
        .map(|f| FramePlanes {
            luma: resample_plane(&f.luma, width, height, 0.0, hi),
            chroma_u: resample_plane(&f.chroma_u, cw, ch, 0.0, hi),
            chroma_v: resample_plane(&f.chroma_v, cw, ch, 0.0, hi),
        })
        .collect();
    VideoSequence::new(width, height, bit_depth, frames)
        .expect("resampled planes keep 4:2:0 geometry and clamped range")
}

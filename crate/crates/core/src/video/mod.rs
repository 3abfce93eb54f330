//! Decoded planar video: sample grids, sequences, ingestion, and geometry alignment.
//!
//! Sequences are decoded into [`VideoSequence<u16>`] and then normalized into
//! [`VideoSequence<f64>`] on the 8-bit scale. Everything downstream of ingestion
//! (complexity features, SSIM) operates on the normalized form.

mod raw;
mod resample;
mod y4m;

pub use raw::{parse_raw, read_raw, write_raw, RawParams};
pub use resample::{resample_plane, rescale_to};
pub use y4m::{encode_y4m, parse_y4m, read_y4m, write_y4m};

use std::path::Path;

use crate::error::{Error, Result};

/// A 2-D grid of samples in raster order.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Copy> Plane<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Internal(format!(
                "plane {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: T) {
        self.data[y * self.width + x] = value;
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[T] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Plane<U> {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Chroma subsampling layout. Only 4:2:0 is accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Chroma {
    #[default]
    Yuv420,
}

impl Chroma {
    /// Chroma plane dimensions for a luma plane of `width × height`.
    pub fn plane_size(self, width: usize, height: usize) -> (usize, usize) {
        match self {
            Chroma::Yuv420 => (width.div_ceil(2), height.div_ceil(2)),
        }
    }
}

/// One decoded frame: a luma plane and two chroma planes.
#[derive(Clone, Debug, PartialEq)]
pub struct FramePlanes<T> {
    pub luma: Plane<T>,
    pub chroma_u: Plane<T>,
    pub chroma_v: Plane<T>,
}

impl<T: Copy> FramePlanes<T> {
    pub fn planes(&self) -> [&Plane<T>; 3] {
        [&self.luma, &self.chroma_u, &self.chroma_v]
    }
}

/// Sample types a sequence can hold.
///
/// `u16` holds decoded code values; `f64` holds samples normalized to the 8-bit scale.
pub trait Sample: Copy + Send + Sync + 'static {
    fn in_range(self, bit_depth: u8) -> bool;
}

impl Sample for u16 {
    fn in_range(self, bit_depth: u8) -> bool {
        u32::from(self) < (1u32 << bit_depth)
    }
}

impl Sample for f64 {
    fn in_range(self, bit_depth: u8) -> bool {
        self.is_finite() && (0.0..=normalized_max(bit_depth)).contains(&self)
    }
}

/// Largest sample value after normalizing a `bit_depth` source to the 8-bit scale.
pub fn normalized_max(bit_depth: u8) -> f64 {
    f64::from((1u32 << bit_depth) - 1) / f64::from(1u32 << (bit_depth - 8))
}

/// A sequence of frames sharing geometry and bit depth.
///
/// For `VideoSequence<f64>` the samples are on the 8-bit scale and `bit_depth`
/// records the depth of the source they were normalized from.
#[derive(Clone, Debug, PartialEq)]
pub struct VideoSequence<T> {
    width: usize,
    height: usize,
    bit_depth: u8,
    chroma: Chroma,
    frames: Vec<FramePlanes<T>>,
}

pub type NormalizedSequence = VideoSequence<f64>;

impl<T: Sample> VideoSequence<T> {
    /// Builds a sequence, checking every invariant: N ≥ 2, uniform geometry,
    /// 4:2:0 chroma sizes, and every sample within the bit-depth range.
    pub fn new(
        width: usize,
        height: usize,
        bit_depth: u8,
        frames: Vec<FramePlanes<T>>,
    ) -> Result<Self> {
        if bit_depth != 8 && bit_depth != 10 {
            return Err(Error::Unsupported(format!("bit depth {bit_depth}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::InputTooSmall(format!("{width}x{height} frame")));
        }
        if frames.len() < 2 {
            return Err(Error::InputTooSmall(format!(
                "sequence has {} frame(s), at least 2 are required",
                frames.len()
            )));
        }
        let chroma = Chroma::Yuv420;
        let (cw, ch) = chroma.plane_size(width, height);
        for (i, frame) in frames.iter().enumerate() {
            let dims = [
                (&frame.luma, width, height, "luma"),
                (&frame.chroma_u, cw, ch, "chroma_u"),
                (&frame.chroma_v, cw, ch, "chroma_v"),
            ];
            for (plane, w, h, name) in dims {
                if plane.width() != w || plane.height() != h {
                    return Err(Error::Internal(format!(
                        "frame {i} {name} is {}x{}, expected {w}x{h}",
                        plane.width(),
                        plane.height()
                    )));
                }
                if plane.data().iter().any(|&s| !s.in_range(bit_depth)) {
                    return Err(Error::Range(format!(
                        "frame {i} {name} has samples outside the {bit_depth}-bit range"
                    )));
                }
            }
        }
        Ok(VideoSequence {
            width,
            height,
            bit_depth,
            chroma,
            frames,
        })
    }
}

impl<T> VideoSequence<T> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn chroma(&self) -> Chroma {
        self.chroma
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn frames(&self) -> &[FramePlanes<T>] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<FramePlanes<T>> {
        self.frames
    }

    /// Keeps the first `n` frames. `n` is clamped to at least 2.
    pub fn truncate(&mut self, n: usize) {
        self.frames.truncate(n.max(2));
    }
}

/// Container format of an input file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VideoFormat {
    Y4m,
    Raw,
}

impl VideoFormat {
    /// `.y4m` files are Y4M, everything else is raw planar YUV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("y4m") => VideoFormat::Y4m,
            _ => VideoFormat::Raw,
        }
    }
}

/// Reads a Y4M or raw planar file. Raw input requires `raw`; for Y4M the
/// header is authoritative and `raw` is ignored.
pub fn read_video(
    path: &Path,
    format: VideoFormat,
    raw: Option<RawParams>,
) -> Result<VideoSequence<u16>> {
    match format {
        VideoFormat::Y4m => read_y4m(path),
        VideoFormat::Raw => {
            let params = raw.ok_or_else(|| {
                Error::Config(format!(
                    "{}: raw input needs width, height and bit depth",
                    path.display()
                ))
            })?;
            read_raw(path, params)
        }
    }
}

/// Converts code values to the 8-bit scale: each sample is divided by
/// 2^(bit_depth − 8). 8-bit input passes through with unchanged values.
pub fn normalize_bit_depth(seq: VideoSequence<u16>) -> NormalizedSequence {
    let scale = 1.0 / f64::from(1u32 << (seq.bit_depth - 8));
    let convert = |p: &Plane<u16>| p.map(|v| f64::from(v) * scale);
    let frames = seq
        .frames
        .into_iter()
        .map(|f| FramePlanes {
            luma: convert(&f.luma),
            chroma_u: convert(&f.chroma_u),
            chroma_v: convert(&f.chroma_v),
        })
        .collect();
    VideoSequence {
        width: seq.width,
        height: seq.height,
        bit_depth: seq.bit_depth,
        chroma: seq.chroma,
        frames,
    }
}

/// Brings a test sequence onto the reference grid: the test is rescaled to the
/// reference geometry and both are truncated to the shorter frame count.
pub fn align_pair(
    reference: NormalizedSequence,
    test: NormalizedSequence,
) -> (NormalizedSequence, NormalizedSequence) {
    let mut test = rescale_to(test, reference.width(), reference.height());
    let mut reference = reference;
    let n_ref = reference.frame_count();
    let n_test = test.frame_count();
    if n_ref != n_test {
        let n = n_ref.min(n_test);
        log::warn!(
            "frame counts differ (reference {n_ref}, test {n_test}); truncating both to {n}"
        );
        reference.truncate(n);
        test.truncate(n);
    }
    (reference, test)
}

pub(crate) fn frame_bytes(width: usize, height: usize, bit_depth: u8) -> usize {
    let (cw, ch) = Chroma::Yuv420.plane_size(width, height);
    let bytes_per_sample = if bit_depth > 8 { 2 } else { 1 };
    (width * height + 2 * cw * ch) * bytes_per_sample
}

/// Decodes one frame from its planar byte layout (Y, then U, then V).
pub(crate) fn decode_frame(
    bytes: &[u8],
    width: usize,
    height: usize,
    bit_depth: u8,
) -> FramePlanes<u16> {
    let (cw, ch) = Chroma::Yuv420.plane_size(width, height);
    let wide = bit_depth > 8;
    let mut offset = 0;
    let mut take = |w: usize, h: usize| {
        let n = w * h;
        let data: Vec<u16> = if wide {
            bytes[offset..offset + 2 * n]
                .chunks_exact(2)
                .map(|b| u16::from_le_bytes([b[0], b[1]]))
                .collect()
        } else {
            bytes[offset..offset + n]
                .iter()
                .map(|&b| u16::from(b))
                .collect()
        };
        offset += if wide { 2 * n } else { n };
        Plane {
            width: w,
            height: h,
            data,
        }
    };
    let luma = take(width, height);
    let chroma_u = take(cw, ch);
    let chroma_v = take(cw, ch);
    FramePlanes {
        luma,
        chroma_u,
        chroma_v,
    }
}

pub(crate) fn encode_frame(frame: &FramePlanes<u16>, bit_depth: u8, out: &mut Vec<u8>) {
    for plane in frame.planes() {
        if bit_depth > 8 {
            for &v in plane.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        } else {
            out.extend(plane.data().iter().map(|&v| v as u8));
        }
    }
}

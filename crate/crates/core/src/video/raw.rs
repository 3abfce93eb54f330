//! Headerless planar I420 / I420-10LE files.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{decode_frame, encode_frame, frame_bytes, Chroma, VideoSequence};
use crate::error::{Error, Result};

/// Geometry of a raw planar file, written on the command line as `WxH:bitdepth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RawParams {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
    pub chroma: Chroma,
}

impl RawParams {
    pub fn new(width: usize, height: usize, bit_depth: u8) -> Self {
        RawParams {
            width,
            height,
            bit_depth,
            chroma: Chroma::Yuv420,
        }
    }

    pub fn frame_bytes(&self) -> usize {
        frame_bytes(self.width, self.height, self.bit_depth)
    }
}

impl FromStr for RawParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("raw format '{s}' is not WxH:bitdepth"));
        let (dims, depth) = match s.split_once(':') {
            Some((d, b)) => (d, b.parse::<u8>().map_err(|_| bad())?),
            None => (s, 8),
        };
        let (w, h) = dims.split_once(['x', 'X']).ok_or_else(bad)?;
        let width = w.parse().map_err(|_| bad())?;
        let height = h.parse().map_err(|_| bad())?;
        if width == 0 || height == 0 {
            return Err(bad());
        }
        if depth != 8 && depth != 10 {
            return Err(Error::Unsupported(format!("bit depth {depth}")));
        }
        Ok(RawParams::new(width, height, depth))
    }
}

impl fmt::Display for RawParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}:{}", self.width, self.height, self.bit_depth)
    }
}

pub fn parse_raw(bytes: &[u8], params: RawParams) -> Result<VideoSequence<u16>> {
    let frame_size = params.frame_bytes();
    if bytes.is_empty() || !bytes.len().is_multiple_of(frame_size) {
        return Err(Error::Truncated(format!(
            "expected multiple of {frame_size} bytes, found {}",
            bytes.len()
        )));
    }
    let frames = bytes
        .chunks_exact(frame_size)
        .map(|chunk| decode_frame(chunk, params.width, params.height, params.bit_depth))
        .collect();
    VideoSequence::new(params.width, params.height, params.bit_depth, frames)
}

pub fn read_raw(path: &Path, params: RawParams) -> Result<VideoSequence<u16>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_raw(&bytes, params)
}

pub fn write_raw(seq: &VideoSequence<u16>, path: &Path) -> Result<()> {
    let mut out = Vec::with_capacity(
        seq.frame_count() * frame_bytes(seq.width(), seq.height(), seq.bit_depth()),
    );
    for frame in seq.frames() {
        encode_frame(frame, seq.bit_depth(), &mut out);
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

//! YUV4MPEG2 stream reading and writing (4:2:0, 8- and 10-bit).

use std::fs;
use std::path::Path;

use super::{decode_frame, encode_frame, frame_bytes, VideoSequence};
use crate::error::{Error, Result};

const MAGIC: &str = "YUV4MPEG2";
const FRAME_MARKER: &[u8] = b"FRAME";

#[derive(Debug, PartialEq, Eq)]
struct Header {
    width: usize,
    height: usize,
    bit_depth: u8,
}

fn parse_header(line: &str) -> Result<Header> {
    let mut tokens = line.split(' ').filter(|t| !t.is_empty());
    match tokens.next() {
        Some(MAGIC) => {}
        Some(other) => return Err(Error::Parse(format!("expected '{MAGIC}', found '{other}'"))),
        None => return Err(Error::Parse("empty header".into())),
    }

    let mut width = None;
    let mut height = None;
    let mut bit_depth = 8;
    for token in tokens {
        let (tag, value) = token.split_at(1);
        let bad = || Error::Parse(format!("bad token '{token}'"));
        match tag {
            "W" => width = Some(value.parse::<usize>().map_err(|_| bad())?),
            "H" => height = Some(value.parse::<usize>().map_err(|_| bad())?),
            "C" => {
                bit_depth = match value {
                    "420" | "420jpeg" | "420mpeg2" | "420paldv" => 8,
                    "420p10" => 10,
                    _ => return Err(Error::Unsupported(format!("Y4M colorspace '{token}'"))),
                }
            }
            "F" | "A" => {
                let ok = value
                    .split_once(':')
                    .is_some_and(|(n, d)| n.parse::<u64>().is_ok() && d.parse::<u64>().is_ok());
                if !ok {
                    return Err(bad());
                }
            }
            "I" | "X" => {}
            _ => return Err(bad()),
        }
    }

    match (width, height) {
        (Some(w), Some(h)) if w > 0 && h > 0 => Ok(Header {
            width: w,
            height: h,
            bit_depth,
        }),
        (None, _) => Err(Error::Parse("missing 'W' token".into())),
        (_, None) => Err(Error::Parse("missing 'H' token".into())),
        _ => Err(Error::Parse("zero frame dimension".into())),
    }
}

/// Parses a complete Y4M stream held in memory.
pub fn parse_y4m(bytes: &[u8]) -> Result<VideoSequence<u16>> {
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Parse("header is not terminated by a newline".into()))?;
    let line = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| Error::Parse("header is not ASCII".into()))?;
    let header = parse_header(line)?;
    let frame_size = frame_bytes(header.width, header.height, header.bit_depth);

    let mut frames = Vec::new();
    let mut pos = header_end + 1;
    while pos < bytes.len() {
        let index = frames.len();
        let rest = &bytes[pos..];
        if !rest.starts_with(FRAME_MARKER) {
            let shown: String = String::from_utf8_lossy(&rest[..rest.len().min(8)]).into();
            return Err(Error::Parse(format!(
                "frame {index}: expected 'FRAME' marker, found '{shown}'"
            )));
        }
        let marker_end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Truncated(format!("frame {index}: unterminated FRAME marker")))?;
        let data = &rest[marker_end + 1..];
        if data.len() < frame_size {
            return Err(Error::Truncated(format!(
                "frame {index}: expected {frame_size} bytes, found {}",
                data.len()
            )));
        }
        frames.push(decode_frame(
            &data[..frame_size],
            header.width,
            header.height,
            header.bit_depth,
        ));
        pos += marker_end + 1 + frame_size;
    }

    VideoSequence::new(header.width, header.height, header.bit_depth, frames)
}

pub fn read_y4m(path: &Path) -> Result<VideoSequence<u16>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_y4m(&bytes)
}

pub fn encode_y4m(seq: &VideoSequence<u16>) -> Vec<u8> {
    let colorspace = if seq.bit_depth() > 8 {
        "C420p10"
    } else {
        "C420"
    };
    let header = format!(
        "{MAGIC} W{} H{} F30:1 Ip A1:1 {colorspace}\n",
        seq.width(),
        seq.height()
    );
    let mut out = header.into_bytes();
    out.reserve(seq.frame_count() * (frame_bytes(seq.width(), seq.height(), seq.bit_depth()) + 6));
    for frame in seq.frames() {
        out.extend_from_slice(FRAME_MARKER);
        out.push(b'\n');
        encode_frame(frame, seq.bit_depth(), &mut out);
    }
    out
}

pub fn write_y4m(seq: &VideoSequence<u16>, path: &Path) -> Result<()> {
    fs::write(path, encode_y4m(seq)).map_err(|e| Error::io(path, e))
}

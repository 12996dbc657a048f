//! Binary grayscale PGM (`P5`), 8- or 16-bit.
//!
//! Accepted layout: `P5\n`, optional `#` comment lines, `<W> <H>\n`,
//! `<maxval>\n`, then exactly `W·H` samples (big-endian pairs when
//! `maxval > 255`). Samples above `maxval` are rejected.

use std::path::Path;

use super::pfm::{header_line, parse_dim, parse_dims_line};
use crate::error::{GtError, Result};
use crate::scalar::Scalar;
use crate::volume::GrayImage;

fn next_content_line(bytes: &[u8], mut pos: usize, what: &str) -> Result<(String, usize, usize)> {
    loop {
        let (line, next) = header_line(bytes, pos, what)?;
        if !line.starts_with('#') {
            return Ok((line, pos, next));
        }
        pos = next;
    }
}

pub fn decode_pgm<T: Scalar>(bytes: &[u8]) -> Result<GrayImage<T>> {
    let (magic, pos) = header_line(bytes, 0, "magic")?;
    match magic.as_str() {
        "P5" => {}
        "P2" => return Err(GtError::UnsupportedFormat("ASCII PGM (P2) is not supported".into())),
        other => return Err(GtError::format(0, format!("bad PGM magic {other:?}"))),
    }
    let (dims, dims_at, pos) = next_content_line(bytes, pos, "dimension")?;
    let (width, height) = parse_dims_line(&dims, dims_at)?;
    let (maxval, max_at, pos) = next_content_line(bytes, pos, "maxval")?;
    let maxval = parse_dim(&maxval, max_at, "maxval")?;
    if maxval > 65535 {
        return Err(GtError::format(max_at as u64, format!("maxval {maxval} exceeds 65535")));
    }
    let sample_bytes = if maxval > 255 { 2 } else { 1 };
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(sample_bytes))
        .and_then(|n| n.checked_add(pos))
        .ok_or_else(|| GtError::format(dims_at as u64, "dimensions overflow"))?;
    if bytes.len() < expected {
        return Err(GtError::format(bytes.len() as u64, format!("payload truncated, expected {expected} bytes")));
    }
    if bytes.len() > expected {
        return Err(GtError::format(expected as u64, "trailing bytes after payload"));
    }

    let scale = T::from_index(maxval);
    let mut data = Vec::with_capacity(width * height);
    for (i, chunk) in bytes[pos..].chunks_exact(sample_bytes).enumerate() {
        let s = if sample_bytes == 2 {
            u16::from_be_bytes([chunk[0], chunk[1]]) as usize
        } else {
            chunk[0] as usize
        };
        if s > maxval {
            return Err(GtError::format(
                (pos + i * sample_bytes) as u64,
                format!("sample {s} exceeds maxval {maxval}"),
            ));
        }
        data.push(T::from_index(s) / scale);
    }
    GrayImage::new(width, height, data)
}

/// Quantizes intensities in `[0, 1]` to `maxval` levels.
pub fn encode_pgm<T: Scalar>(image: &GrayImage<T>, maxval: u16) -> Result<Vec<u8>> {
    if maxval == 0 {
        return Err(GtError::InvalidParameter("maxval must be positive".into()));
    }
    let mut out = format!("P5\n{} {}\n{maxval}\n", image.width, image.height).into_bytes();
    let top = maxval as f64;
    for &v in &image.data {
        let s = (v.to_f64_lossy().clamp(0.0, 1.0) * top).round() as u16;
        if maxval > 255 {
            out.extend_from_slice(&s.to_be_bytes());
        } else {
            out.push(s as u8);
        }
    }
    Ok(out)
}

pub fn read_pgm<T: Scalar>(path: impl AsRef<Path>) -> Result<GrayImage<T>> {
    decode_pgm(&super::read_file(path.as_ref())?)
}

pub fn write_pgm<T: Scalar>(path: impl AsRef<Path>, image: &GrayImage<T>, maxval: u16) -> Result<()> {
    super::write_file(path.as_ref(), &encode_pgm(image, maxval)?)
}

//! Grayscale PFM (`Pf`) disparity maps.
//!
//! The header must be exactly `Pf\n<W> <H>\n<scale>\n` with `|scale| = 1`.
//! A negative scale means little-endian samples, positive big-endian. Rows
//! are stored bottom-up.

use std::path::Path;

use crate::error::{GtError, Result};
use crate::scalar::Scalar;
use crate::volume::DisparityMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfmByteOrder {
    LittleEndian,
    BigEndian,
}

pub fn encode_pfm<T: Scalar>(map: &DisparityMap<T>) -> Vec<u8> {
    encode_pfm_with_order(map, PfmByteOrder::LittleEndian)
}

pub fn encode_pfm_with_order<T: Scalar>(map: &DisparityMap<T>, order: PfmByteOrder) -> Vec<u8> {
    let scale = match order {
        PfmByteOrder::LittleEndian => "-1.0",
        PfmByteOrder::BigEndian => "1.0",
    };
    let mut out = format!("Pf\n{} {}\n{scale}\n", map.width(), map.height()).into_bytes();
    out.reserve(map.len() * 4);
    for y in (0..map.height()).rev() {
        for x in 0..map.width() {
            let v = map.get(y, x).to_f32_lossy();
            out.extend_from_slice(&match order {
                PfmByteOrder::LittleEndian => v.to_le_bytes(),
                PfmByteOrder::BigEndian => v.to_be_bytes(),
            });
        }
    }
    out
}

/// Splits off one `\n`-terminated header line starting at `pos`.
pub(crate) fn header_line(bytes: &[u8], pos: usize, what: &str) -> Result<(String, usize)> {
    let rest = &bytes[pos.min(bytes.len())..];
    let end = rest
        .iter()
        .take(64)
        .position(|&b| b == b'\n')
        .ok_or_else(|| GtError::format(pos as u64, format!("unterminated {what} line")))?;
    let line = std::str::from_utf8(&rest[..end])
        .map_err(|_| GtError::format(pos as u64, format!("{what} line is not text")))?;
    Ok((line.to_owned(), pos + end + 1))
}

/// Strict positive decimal: no sign, no leading zero.
pub(crate) fn parse_dim(token: &str, offset: usize, what: &str) -> Result<usize> {
    let ok = !token.is_empty()
        && token.bytes().all(|b| b.is_ascii_digit())
        && !token.starts_with('0');
    if !ok {
        return Err(GtError::format(offset as u64, format!("bad {what} {token:?}")));
    }
    token
        .parse()
        .map_err(|_| GtError::format(offset as u64, format!("{what} {token:?} out of range")))
}

/// `<W> <H>` separated by exactly one space.
pub(crate) fn parse_dims_line(line: &str, offset: usize) -> Result<(usize, usize)> {
    let mut parts = line.split(' ');
    let (Some(w), Some(h), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(GtError::format(offset as u64, format!("bad dimension line {line:?}")));
    };
    let width = parse_dim(w, offset, "width")?;
    let height = parse_dim(h, offset + w.len() + 1, "height")?;
    Ok((width, height))
}

fn parse_scale(line: &str, offset: usize) -> Result<PfmByteOrder> {
    let body = line.strip_prefix('-').unwrap_or(line);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let well_formed = !int.is_empty()
        && int.bytes().all(|b| b.is_ascii_digit())
        && (int == "0" || !int.starts_with('0'))
        && (!body.contains('.') || (!frac.is_empty() && frac.bytes().all(|b| b.is_ascii_digit())));
    let value: f64 = if well_formed { body.parse().unwrap_or(f64::NAN) } else { f64::NAN };
    if value != 1.0 {
        return Err(GtError::format(offset as u64, format!("unsupported scale {line:?}, expected ±1")));
    }
    Ok(if line.starts_with('-') {
        PfmByteOrder::LittleEndian
    } else {
        PfmByteOrder::BigEndian
    })
}

pub fn decode_pfm<T: Scalar>(bytes: &[u8]) -> Result<DisparityMap<T>> {
    let (magic, pos) = header_line(bytes, 0, "magic")?;
    match magic.as_str() {
        "Pf" => {}
        "PF" => return Err(GtError::UnsupportedFormat("color PFM (PF) is not a disparity map".into())),
        other => return Err(GtError::format(0, format!("bad PFM magic {other:?}"))),
    }
    let dims_at = pos;
    let (dims, pos) = header_line(bytes, pos, "dimension")?;
    let (width, height) = parse_dims_line(&dims, dims_at)?;
    let scale_at = pos;
    let (scale, pos) = header_line(bytes, pos, "scale")?;
    let order = parse_scale(&scale, scale_at)?;

    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(pos))
        .ok_or_else(|| GtError::format(dims_at as u64, "dimensions overflow"))?;
    if bytes.len() < expected {
        return Err(GtError::format(bytes.len() as u64, format!("payload truncated, expected {expected} bytes")));
    }
    if bytes.len() > expected {
        return Err(GtError::format(expected as u64, "trailing bytes after payload"));
    }

    let mut values = vec![T::zero(); width * height];
    for (i, chunk) in bytes[pos..].chunks_exact(4).enumerate() {
        let raw: [u8; 4] = chunk.try_into().unwrap();
        let v = match order {
            PfmByteOrder::LittleEndian => f32::from_le_bytes(raw),
            PfmByteOrder::BigEndian => f32::from_be_bytes(raw),
        };
        let (row_from_bottom, x) = (i / width, i % width);
        values[(height - 1 - row_from_bottom) * width + x] = T::lit(v as f64);
    }
    DisparityMap::new(height, width, values)
}

pub fn write_pfm<T: Scalar>(path: impl AsRef<Path>, map: &DisparityMap<T>) -> Result<()> {
    super::write_file(path.as_ref(), &encode_pfm(map))
}

pub fn read_pfm<T: Scalar>(path: impl AsRef<Path>) -> Result<DisparityMap<T>> {
    decode_pfm(&super::read_file(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DisparityMap<f32> {
        DisparityMap::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.5, -1.0]).unwrap()
    }

    #[test]
    fn header_and_bottom_up_rows() {
        let bytes = encode_pfm(&sample());
        assert!(bytes.starts_with(b"Pf\n3 2\n-1.0\n"));
        let body = &bytes[12..];
        assert_eq!(&body[..4], &4.0f32.to_le_bytes());
        assert_eq!(&body[12..16], &1.0f32.to_le_bytes());
    }

    #[test]
    fn negative_values_decode_as_invalid() {
        let map: DisparityMap<f32> = decode_pfm(&encode_pfm(&sample())).unwrap();
        assert_eq!(map.validity(), vec![true, true, true, true, true, false]);
        assert_eq!(map.values(), sample().values());
    }

    #[test]
    fn big_endian_round_trip() {
        let bytes = encode_pfm_with_order(&sample(), PfmByteOrder::BigEndian);
        assert!(bytes.starts_with(b"Pf\n3 2\n1.0\n"));
        let map: DisparityMap<f32> = decode_pfm(&bytes).unwrap();
        assert_eq!(map, sample());
    }

    #[test]
    fn color_pfm_is_unsupported() {
        let mut bytes = encode_pfm(&sample());
        bytes[1] = b'F';
        assert!(matches!(decode_pfm::<f32>(&bytes), Err(GtError::UnsupportedFormat(_))));
    }

    #[test]
    fn malformed_headers() {
        for bad in [
            &b"Pf\n3 2\n-2.0\n"[..],
            b"Pf\n3  2\n-1.0\n",
            b"Pf\n03 2\n-1.0\n",
            b"Pf\n3 2\n+1.0\n",
            b"Pf\n3 2\n-1.0",
            b"P5\n3 2\n-1.0\n",
        ] {
            let mut bytes = bad.to_vec();
            bytes.extend(std::iter::repeat_n(0u8, 24));
            assert!(matches!(decode_pfm::<f32>(&bytes), Err(GtError::Format { .. })), "{bad:?}");
        }
    }

    #[test]
    fn accepts_integer_scale() {
        let mut bytes = b"Pf\n1 1\n-1\n".to_vec();
        bytes.extend_from_slice(&7.5f32.to_le_bytes());
        let map: DisparityMap<f64> = decode_pfm(&bytes).unwrap();
        assert_eq!(map.values(), &[7.5]);
    }
}

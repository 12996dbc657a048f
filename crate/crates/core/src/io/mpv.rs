//! `MPV1` container: a stack of `M` probability volumes.
//!
//! ```text
//! offset 0   4 bytes  ASCII "MPV1"
//! offset 4   u32 LE   M (members)
//! offset 8   u32 LE   H
//! offset 12  u32 LE   W
//! offset 16  u32 LE   D
//! offset 20  M·H·W·D  f32 LE, ordered [m][h][w][d]
//! ```

use std::path::Path;

use crate::error::{GtError, Result};
use crate::scalar::Scalar;
use crate::volume::{EnsembleVolumes, ProbabilityVolume};

pub const MPV_MAGIC: &[u8; 4] = b"MPV1";
pub const MPV_HEADER_LEN: usize = 20;

pub fn encode_volume<T: Scalar>(ensemble: &EnsembleVolumes<T>) -> Result<Vec<u8>> {
    let dims = [
        ensemble.len(),
        ensemble.height(),
        ensemble.width(),
        ensemble.disparities(),
    ];
    let mut header = [0u32; 4];
    for (slot, &d) in header.iter_mut().zip(&dims) {
        *slot = u32::try_from(d).map_err(|_| GtError::Data(format!("dimension {d} exceeds u32")))?;
    }
    let values: usize = dims.iter().product();
    let mut out = Vec::with_capacity(MPV_HEADER_LEN + values * 4);
    out.extend_from_slice(MPV_MAGIC);
    for d in header {
        out.extend_from_slice(&d.to_le_bytes());
    }
    for member in ensemble.members() {
        for &v in member.data() {
            out.extend_from_slice(&v.to_f32_lossy().to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_volume<T: Scalar>(bytes: &[u8]) -> Result<EnsembleVolumes<T>> {
    if bytes.len() < MPV_HEADER_LEN {
        return Err(GtError::format(bytes.len() as u64, "header truncated"));
    }
    if &bytes[..4] != MPV_MAGIC {
        return Err(GtError::format(0, format!("bad magic {:?}", String::from_utf8_lossy(&bytes[..4]))));
    }
    let field = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap());
    let (m, h, w, d) = (field(0), field(1), field(2), field(3));
    for (i, (name, v)) in [("M", m), ("H", h), ("W", w), ("D", d)].into_iter().enumerate() {
        if v == 0 {
            return Err(GtError::format(4 + 4 * i as u64, format!("{name} must be at least 1")));
        }
    }
    let payload = [m, h, w, d, 4]
        .iter()
        .try_fold(1u64, |acc, &v| acc.checked_mul(v as u64))
        .filter(|&n| n <= usize::MAX as u64 - MPV_HEADER_LEN as u64)
        .ok_or_else(|| GtError::format(4, "dimensions overflow"))?;
    let expected = MPV_HEADER_LEN as u64 + payload;
    let actual = bytes.len() as u64;
    if actual < expected {
        return Err(GtError::format(actual, format!("payload truncated, expected {expected} bytes")));
    }
    if actual > expected {
        return Err(GtError::format(expected, format!("{} trailing bytes", actual - expected)));
    }

    let (m, h, w, d) = (m as usize, h as usize, w as usize, d as usize);
    let per_member = h * w * d;
    let mut members = Vec::with_capacity(m);
    for chunk in bytes[MPV_HEADER_LEN..].chunks_exact(per_member * 4) {
        let data = chunk
            .chunks_exact(4)
            .map(|b| T::lit(f32::from_le_bytes(b.try_into().unwrap()) as f64))
            .collect();
        members.push(ProbabilityVolume::new(h, w, d, data)?);
    }
    EnsembleVolumes::new(members)
}

pub fn write_volume<T: Scalar>(path: impl AsRef<Path>, ensemble: &EnsembleVolumes<T>) -> Result<()> {
    super::write_file(path.as_ref(), &encode_volume(ensemble)?)
}

pub fn read_volume<T: Scalar>(path: impl AsRef<Path>) -> Result<EnsembleVolumes<T>> {
    decode_volume(&super::read_file(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> EnsembleVolumes<f32> {
        ProbabilityVolume::new(1, 1, 4, vec![0.25f32; 4]).unwrap().into()
    }

    #[test]
    fn header_layout() {
        let bytes = encode_volume(&tiny()).unwrap();
        assert_eq!(&bytes[..4], b"MPV1");
        assert_eq!(&bytes[4..20], &[1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 4, 0, 0, 0]);
        assert_eq!(bytes.len(), 20 + 16);
        assert_eq!(&bytes[20..24], &0.25f32.to_le_bytes());
    }

    #[test]
    fn bad_magic_names_offset_zero() {
        let mut bytes = encode_volume(&tiny()).unwrap();
        bytes[0] = b'X';
        match decode_volume::<f32>(&bytes) {
            Err(GtError::Format { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn short_payload_is_truncation() {
        let bytes = encode_volume(&tiny()).unwrap();
        match decode_volume::<f32>(&bytes[..20 + 12]) {
            Err(GtError::Format { offset, message }) => {
                assert_eq!(offset, 32);
                assert!(message.contains("truncated"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_and_huge_dims_are_rejected() {
        let mut bytes = encode_volume(&tiny()).unwrap();
        bytes[8] = 0;
        assert!(matches!(decode_volume::<f32>(&bytes), Err(GtError::Format { offset: 8, .. })));
        let mut bytes = encode_volume(&tiny()).unwrap();
        for b in &mut bytes[4..20] {
            *b = 0xff;
        }
        assert!(matches!(decode_volume::<f32>(&bytes), Err(GtError::Format { .. })));
    }
}

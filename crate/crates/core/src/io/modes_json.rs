//! Per-pixel mode diagnostics as JSON.
//!
//! Key order is fixed and reals are written with 17 significant digits so
//! that `f64` values survive a round trip exactly.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::distribution::LaplaceMode;
use crate::error::{GtError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct PixelModes<T> {
    pub y: usize,
    pub x: usize,
    pub noise_count: usize,
    pub label_cluster: Option<usize>,
    pub modes: Vec<LaplaceMode<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModesDocument<T> {
    pub height: usize,
    pub width: usize,
    pub disparities: usize,
    pub pixels: Vec<PixelModes<T>>,
}

fn real<T: Scalar>(v: T) -> Result<String> {
    let v = v.to_f64_lossy();
    if !v.is_finite() {
        return Err(GtError::Data(format!("cannot write non-finite value {v} to JSON")));
    }
    Ok(format!("{v:.16e}"))
}

pub fn encode_modes_json<T: Scalar>(doc: &ModesDocument<T>) -> Result<String> {
    let mut s = String::new();
    write!(s, "{{\"H\":{},\"W\":{},\"D\":{},\"pixels\":[", doc.height, doc.width, doc.disparities).unwrap();
    for (i, px) in doc.pixels.iter().enumerate() {
        s.push_str(if i == 0 { "\n" } else { ",\n" });
        let label = px.label_cluster.map_or_else(|| "null".to_owned(), |l| l.to_string());
        write!(
            s,
            "{{\"y\":{},\"x\":{},\"noise_count\":{},\"label_cluster\":{label},\"modes\":[",
            px.y, px.x, px.noise_count
        )
        .unwrap();
        for (j, m) in px.modes.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            write!(s, "{{\"w\":{},\"mu\":{},\"b\":{}}}", real(m.w)?, real(m.mu)?, real(m.b)?).unwrap();
        }
        s.push_str("]}");
    }
    if !doc.pixels.is_empty() {
        s.push('\n');
    }
    s.push_str("]}\n");
    Ok(s)
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| GtError::format(0, format!("missing key {key:?}")))
}

fn uint(obj: &Value, key: &str) -> Result<usize> {
    field(obj, key)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| GtError::format(0, format!("{key:?} is not a non-negative integer")))
}

fn float<T: Scalar>(obj: &Value, key: &str) -> Result<T> {
    field(obj, key)?
        .as_f64()
        .map(T::lit)
        .ok_or_else(|| GtError::format(0, format!("{key:?} is not a number")))
}

pub fn decode_modes_json<T: Scalar>(text: &str) -> Result<ModesDocument<T>> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| GtError::format(e.column() as u64, format!("invalid JSON: {e}")))?;
    let pixels = field(&root, "pixels")?
        .as_array()
        .ok_or_else(|| GtError::format(0, "\"pixels\" is not an array"))?;
    let mut out = Vec::with_capacity(pixels.len());
    for px in pixels {
        let modes = field(px, "modes")?
            .as_array()
            .ok_or_else(|| GtError::format(0, "\"modes\" is not an array"))?
            .iter()
            .map(|m| Ok(LaplaceMode::new(float(m, "w")?, float(m, "mu")?, float(m, "b")?)))
            .collect::<Result<Vec<_>>>()?;
        let label_cluster = match field(px, "label_cluster")? {
            Value::Null => None,
            v => Some(
                v.as_u64()
                    .ok_or_else(|| GtError::format(0, "\"label_cluster\" is not an index"))? as usize,
            ),
        };
        out.push(PixelModes {
            y: uint(px, "y")?,
            x: uint(px, "x")?,
            noise_count: uint(px, "noise_count")?,
            label_cluster,
            modes,
        });
    }
    Ok(ModesDocument {
        height: uint(&root, "H")?,
        width: uint(&root, "W")?,
        disparities: uint(&root, "D")?,
        pixels: out,
    })
}

pub fn write_modes_json<T: Scalar>(path: impl AsRef<Path>, doc: &ModesDocument<T>) -> Result<()> {
    super::write_file(path.as_ref(), encode_modes_json(doc)?.as_bytes())
}

pub fn read_modes_json<T: Scalar>(path: impl AsRef<Path>) -> Result<ModesDocument<T>> {
    let bytes = super::read_file(path.as_ref())?;
    let text = String::from_utf8(bytes).map_err(|e| GtError::format(e.utf8_error().valid_up_to() as u64, "not UTF-8"))?;
    decode_modes_json(&text)
}

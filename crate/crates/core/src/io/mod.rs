//! File formats: probability volume containers, PFM disparity maps, binary
//! PGM images and mode diagnostics JSON.

mod modes_json;
mod mpv;
mod pfm;
mod pgm;

use std::fs;
use std::path::Path;

use crate::error::Result;

pub use modes_json::{decode_modes_json, encode_modes_json, read_modes_json, write_modes_json, ModesDocument, PixelModes};
pub use mpv::{decode_volume, encode_volume, read_volume, write_volume, MPV_HEADER_LEN, MPV_MAGIC};
pub use pfm::{decode_pfm, encode_pfm, encode_pfm_with_order, read_pfm, write_pfm, PfmByteOrder};
pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm};

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    Ok(fs::read(path)?)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    Ok(fs::write(path, bytes)?)
}

//! File helpers: format sniffing and error mapping.

use std::fs;
use std::path::{Path, PathBuf};

use hsod::hsi::{codec, normalize_map};
use hsod::{HyperCube, Map2D, MapKind};

use crate::CliError;

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))
}

pub fn read_cube(path: &Path) -> Result<HyperCube, CliError> {
    codec::read_cube(&read(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Reads a `MAP1` file or a P5 PGM, chosen by magic bytes.
pub fn read_any_map(path: &Path) -> Result<Map2D, CliError> {
    let bytes = read(path)?;
    let res = if bytes.starts_with(b"P5") {
        codec::read_pgm(&bytes)
    } else {
        codec::read_map(&bytes)
    };
    res.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Writes `map` as `MAP1` to `stem.map` and a normalized preview to
/// `stem.pgm`.
pub fn write_map_pair(dir: &Path, stem: &str, map: &Map2D) -> Result<(), CliError> {
    write(&dir.join(format!("{stem}.map")), &codec::write_map(map))?;
    write(&dir.join(format!("{stem}.pgm")), &pgm_preview(map)?)
}

pub fn pgm_preview(map: &Map2D) -> Result<Vec<u8>, CliError> {
    let shown = match map.kind() {
        MapKind::Raw => normalize_map(map),
        _ => map.clone(),
    };
    Ok(codec::write_pgm16(&shown)?)
}

pub fn with_extension(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

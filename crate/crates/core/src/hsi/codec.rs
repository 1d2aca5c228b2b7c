//! Binary codecs: `HSC1` cubes, `MAP1` raw float maps and 16-bit `P5` PGM.
//!
//! All multi-byte fields are little-endian except PGM samples, which are
//! big-endian as the Netpbm format requires.

use super::{HyperCube, Map2D, MapKind};
use crate::{Error, Result};

pub const CUBE_MAGIC: &[u8; 4] = b"HSC1";
pub const MAP_MAGIC: &[u8; 4] = b"MAP1";

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let available = self.buf.len() - self.pos;
        if n > available {
            return Err(Error::Truncated {
                needed: n,
                available,
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>> {
        let bytes = n
            .checked_mul(4)
            .ok_or_else(|| Error::MalformedHeader("sample count overflows".into()))?;
        let available = self.buf.len() - self.pos;
        if bytes > available {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: available / 4,
            });
        }
        Ok(self
            .take(bytes)?
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

fn check_magic(r: &mut Reader<'_>, expected: &'static [u8; 4], name: &'static str) -> Result<()> {
    let found = r.take(4.min(r.remaining()))?;
    if found != expected {
        return Err(Error::BadMagic {
            expected: name,
            found: found.to_vec(),
        });
    }
    Ok(())
}

fn dim(v: u32) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::MalformedHeader(format!("dimension {v} too large")))
}

fn checked_len(dims: &[usize]) -> Result<usize> {
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))
}

fn reject_trailing(r: &Reader<'_>, expected: usize, read: usize) -> Result<()> {
    if r.remaining() != 0 {
        return Err(Error::LengthMismatch {
            expected,
            actual: read + r.remaining() / 4,
        });
    }
    Ok(())
}

pub fn write_cube(cube: &HyperCube) -> Vec<u8> {
    let wl = cube.wavelengths();
    let mut out = Vec::with_capacity(17 + 4 * (cube.data().len() + wl.map_or(0, |w| w.len())));
    out.extend_from_slice(CUBE_MAGIC);
    out.extend_from_slice(&(cube.height() as u32).to_le_bytes());
    out.extend_from_slice(&(cube.width() as u32).to_le_bytes());
    out.extend_from_slice(&(cube.channels() as u32).to_le_bytes());
    out.push(wl.is_some() as u8);
    for v in wl.into_iter().flatten().chain(cube.data()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_cube(bytes: &[u8]) -> Result<HyperCube> {
    let mut r = Reader::new(bytes);
    check_magic(&mut r, CUBE_MAGIC, "HSC1")?;
    let h = dim(r.u32()?)?;
    let w = dim(r.u32()?)?;
    let c = dim(r.u32()?)?;
    let wavelengths = match r.u8()? {
        0 => None,
        1 => Some(r.f32s(c)?),
        flag => {
            return Err(Error::MalformedHeader(format!(
                "has_wavelengths flag must be 0 or 1, got {flag}"
            )))
        }
    };
    let n = checked_len(&[h, w, c])?;
    let data = r.f32s(n)?;
    reject_trailing(&r, n, data.len())?;
    HyperCube::new(h, w, c, data, wavelengths)
}

/// Lossless float map export.
pub fn write_map(map: &Map2D) -> Vec<u8> {
    let mut out = Vec::with_capacity(13 + 4 * map.len());
    out.extend_from_slice(MAP_MAGIC);
    out.extend_from_slice(&(map.height() as u32).to_le_bytes());
    out.extend_from_slice(&(map.width() as u32).to_le_bytes());
    out.push(map.kind().code());
    for v in map.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_map(bytes: &[u8]) -> Result<Map2D> {
    let mut r = Reader::new(bytes);
    check_magic(&mut r, MAP_MAGIC, "MAP1")?;
    let h = dim(r.u32()?)?;
    let w = dim(r.u32()?)?;
    let code = r.u8()?;
    let kind = MapKind::from_code(code)
        .ok_or_else(|| Error::MalformedHeader(format!("unknown map kind {code}")))?;
    let n = checked_len(&[h, w])?;
    let values = r.f32s(n)?;
    reject_trailing(&r, n, values.len())?;
    Map2D::new(h, w, values, kind)
}

/// Quantizes a `[0, 1]` value to 16 bits: `round(v * 65535)`.
pub fn quantize16(v: f32) -> u16 {
    (v as f64 * 65535.0).round() as u16
}

/// 16-bit binary PGM (`P5`, maxval 65535). Only normalized or binary maps
/// are accepted; raw maps must go through
/// [`normalize_map`](super::normalize_map) first.
pub fn write_pgm16(map: &Map2D) -> Result<Vec<u8>> {
    if map.kind() == MapKind::Raw {
        if let Some((i, &v)) = map
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::OutOfRange {
                index: i,
                value: v as f64,
            });
        }
    }
    let header = format!("P5\n{} {}\n65535\n", map.width(), map.height());
    let mut out = Vec::with_capacity(header.len() + 2 * map.len());
    out.extend_from_slice(header.as_bytes());
    for &v in map.values() {
        out.extend_from_slice(&quantize16(v).to_be_bytes());
    }
    Ok(out)
}

/// Reads a binary `P5` PGM (8- or 16-bit) as a normalized map, dividing by
/// maxval.
pub fn read_pgm(bytes: &[u8]) -> Result<Map2D> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::BadMagic {
            expected: "P5",
            found: bytes[..bytes.len().min(2)].to_vec(),
        });
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::MalformedHeader("PGM header ends early".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader("bad PGM header field".into()))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(Error::MalformedHeader(
                "missing PGM header terminator".into(),
            ))
        }
    }
    let [w, h, maxval] = fields;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::MalformedHeader(format!("PGM maxval {maxval}")));
    }
    let bps = if maxval < 256 { 1 } else { 2 };
    let n = checked_len(&[w, h])?;
    let body = &bytes[pos..];
    if body.len() < n * bps {
        return Err(Error::Truncated {
            needed: n * bps,
            available: body.len(),
        });
    }
    let scale = maxval as f64;
    let values = (0..n)
        .map(|k| {
            let raw = if bps == 1 {
                body[k] as f64
            } else {
                u16::from_be_bytes([body[2 * k], body[2 * k + 1]]) as f64
            };
            (raw / scale).min(1.0) as f32
        })
        .collect();
    Map2D::normalized(h, w, values)
}

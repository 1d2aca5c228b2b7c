//! `MFA1` named-tensor bundles (little-endian).
//!
//! Layout: magic `MFA1`, `u32` tensor count, then per tensor a `u16` name
//! length, UTF-8 name, `u8` rank, `rank × u32` dims and `f32` data.

use super::attention::{AttentionParams, Normalizer};
use super::mixed::{MfaParams, OutputProjection};
use super::tensor::{FeatureTensor, Matrix};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"MFA1";

#[derive(Debug, Clone, PartialEq)]
pub struct NamedTensor {
    pub name: String,
    pub dims: Vec<u32>,
    pub data: Vec<f32>,
}

impl NamedTensor {
    pub fn new(name: impl Into<String>, dims: Vec<u32>, data: Vec<f32>) -> Result<Self> {
        let n: usize = dims.iter().map(|&d| d as usize).product();
        if n != data.len() {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: data.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            dims,
            data,
        })
    }

    fn from_f64(name: &str, dims: &[usize], data: &[f64]) -> Self {
        Self {
            name: name.to_string(),
            dims: dims.iter().map(|&d| d as u32).collect(),
            data: data.iter().map(|&v| v as f32).collect(),
        }
    }

    fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&v| v as f64).collect()
    }
}

pub fn write_bundle(tensors: &[NamedTensor]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for t in tensors {
        let name = t.name.as_bytes();
        let len = u16::try_from(name.len())
            .map_err(|_| Error::InvalidArgument(format!("tensor name too long: {}", t.name)))?;
        let rank = u8::try_from(t.dims.len())
            .map_err(|_| Error::InvalidArgument(format!("rank too large for {}", t.name)))?;
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(name);
        out.push(rank);
        for d in &t.dims {
            out.extend_from_slice(&d.to_le_bytes());
        }
        for v in &t.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

fn take<'a>(bytes: &'a [u8], pos: &mut usize, n: usize) -> Result<&'a [u8]> {
    let available = bytes.len() - *pos;
    if n > available {
        return Err(Error::Truncated {
            needed: n,
            available,
        });
    }
    let s = &bytes[*pos..*pos + n];
    *pos += n;
    Ok(s)
}

pub fn read_bundle(bytes: &[u8]) -> Result<Vec<NamedTensor>> {
    let mut pos = 0;
    let magic = take(bytes, &mut pos, 4.min(bytes.len()))?;
    if magic != MAGIC {
        return Err(Error::BadMagic {
            expected: "MFA1",
            found: magic.to_vec(),
        });
    }
    let count = u32::from_le_bytes(take(bytes, &mut pos, 4)?.try_into().unwrap());
    let mut out = Vec::new();
    for _ in 0..count {
        let len = u16::from_le_bytes(take(bytes, &mut pos, 2)?.try_into().unwrap()) as usize;
        let name = std::str::from_utf8(take(bytes, &mut pos, len)?)
            .map_err(|_| Error::MalformedHeader("tensor name is not UTF-8".into()))?
            .to_string();
        let rank = take(bytes, &mut pos, 1)?[0] as usize;
        let dims: Vec<u32> = (0..rank)
            .map(|_| {
                Ok(u32::from_le_bytes(
                    take(bytes, &mut pos, 4)?.try_into().unwrap(),
                ))
            })
            .collect::<Result<_>>()?;
        let n = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d as usize))
            .ok_or_else(|| Error::MalformedHeader(format!("dims of {name} overflow")))?;
        let raw = take(bytes, &mut pos, n.saturating_mul(4))?;
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        out.push(NamedTensor { name, dims, data });
    }
    if pos != bytes.len() {
        return Err(Error::MalformedHeader(format!(
            "{} trailing bytes after bundle",
            bytes.len() - pos
        )));
    }
    Ok(out)
}

fn find<'a>(tensors: &'a [NamedTensor], name: &str) -> Result<&'a NamedTensor> {
    tensors
        .iter()
        .find(|t| t.name == name)
        .ok_or_else(|| Error::MalformedHeader(format!("bundle lacks tensor {name:?}")))
}

fn matrix(tensors: &[NamedTensor], name: &str) -> Result<Matrix> {
    let t = find(tensors, name)?;
    match t.dims[..] {
        [r, c] => Matrix::new(r as usize, c as usize, t.to_f64()),
        _ => Err(Error::MalformedHeader(format!("{name} must have rank 2"))),
    }
}

fn vector(tensors: &[NamedTensor], name: &str) -> Result<Vec<f64>> {
    let t = find(tensors, name)?;
    if t.dims.len() != 1 {
        return Err(Error::MalformedHeader(format!("{name} must have rank 1")));
    }
    Ok(t.to_f64())
}

/// The bundle encodes the normalizer as a one-element tensor (0 sigmoid,
/// 1 softmax) since names carry no metadata.
pub fn params_to_bundle(p: &MfaParams) -> Vec<NamedTensor> {
    let mut out = Vec::new();
    for (prefix, h) in [("high", &p.high), ("low", &p.low)] {
        let k = 2 * h.kernel - 1;
        out.push(NamedTensor::from_f64(
            &format!("{prefix}.wq"),
            &[h.wq.rows(), h.wq.cols()],
            h.wq.data(),
        ));
        out.push(NamedTensor::from_f64(
            &format!("{prefix}.wk"),
            &[h.wk.rows(), h.wk.cols()],
            h.wk.data(),
        ));
        out.push(NamedTensor::from_f64(
            &format!("{prefix}.wv"),
            &[h.wv.rows(), h.wv.cols()],
            h.wv.data(),
        ));
        out.push(NamedTensor::from_f64(
            &format!("{prefix}.bias"),
            &[k, k],
            &h.bias,
        ));
        let norm = match h.normalizer {
            Normalizer::Sigmoid => 0.0,
            Normalizer::Softmax => 1.0,
        };
        out.push(NamedTensor::from_f64(
            &format!("{prefix}.normalizer"),
            &[1],
            &[norm],
        ));
    }
    let w = &p.proj.weight;
    out.push(NamedTensor::from_f64(
        "proj.weight",
        &[w.rows(), w.cols()],
        w.data(),
    ));
    out.push(NamedTensor::from_f64(
        "proj.bias",
        &[p.proj.bias.len()],
        &p.proj.bias,
    ));
    out
}

pub fn params_from_bundle(tensors: &[NamedTensor]) -> Result<MfaParams> {
    let head = |prefix: &str| -> Result<AttentionParams> {
        let bias = find(tensors, &format!("{prefix}.bias"))?;
        let side = match bias.dims[..] {
            [a, b] if a == b && a % 2 == 1 => a as usize,
            _ => {
                return Err(Error::MalformedHeader(format!(
                    "{prefix}.bias must be square and odd"
                )))
            }
        };
        let normalizer = match vector(tensors, &format!("{prefix}.normalizer"))?[..] {
            [0.0] => Normalizer::Sigmoid,
            [1.0] => Normalizer::Softmax,
            _ => return Err(Error::MalformedHeader(format!("{prefix}.normalizer"))),
        };
        let p = AttentionParams {
            wq: matrix(tensors, &format!("{prefix}.wq"))?,
            wk: matrix(tensors, &format!("{prefix}.wk"))?,
            wv: matrix(tensors, &format!("{prefix}.wv"))?,
            bias: bias.to_f64(),
            kernel: side.div_ceil(2),
            normalizer,
        };
        p.validate(p.wq.rows(), p.wk.rows())?;
        Ok(p)
    };
    Ok(MfaParams {
        high: head("high")?,
        low: head("low")?,
        proj: OutputProjection {
            weight: matrix(tensors, "proj.weight")?,
            bias: vector(tensors, "proj.bias")?,
        },
    })
}

pub fn tensor_to_named(name: &str, t: &FeatureTensor) -> NamedTensor {
    NamedTensor::from_f64(name, &[t.height(), t.width(), t.depth()], t.data())
}

pub fn named_to_tensor(t: &NamedTensor) -> Result<FeatureTensor> {
    match t.dims[..] {
        [h, w, d] => FeatureTensor::new(h as usize, w as usize, d as usize, t.to_f64()),
        _ => Err(Error::MalformedHeader(format!(
            "{} must have rank 3",
            t.name
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfa::MfaConfig;

    #[test]
    fn golden_single_tensor() {
        let t = NamedTensor::new("ab", vec![2], vec![1.0, -2.0]).unwrap();
        let bytes = write_bundle(std::slice::from_ref(&t)).unwrap();
        #[rustfmt::skip]
        let expected: Vec<u8> = vec![
            b'M', b'F', b'A', b'1',
            1, 0, 0, 0,
            2, 0, b'a', b'b',
            1,
            2, 0, 0, 0,
            0x00, 0x00, 0x80, 0x3F,
            0x00, 0x00, 0x00, 0xC0,
        ];
        assert_eq!(bytes, expected);
        assert_eq!(read_bundle(&bytes).unwrap(), vec![t]);
        assert!(read_bundle(&bytes[..bytes.len() - 1]).is_err());
        assert!(read_bundle(b"MFA2\0\0\0\0").is_err());
    }

    #[test]
    fn params_round_trip_through_f32() {
        let cfg = MfaConfig {
            k_high: 5,
            k_low: 3,
            normalizer: Normalizer::Softmax,
            ..MfaConfig::default()
        };
        let p = MfaParams::init(&cfg, 3, 5, 2, 4).unwrap();
        let back = params_from_bundle(
            &read_bundle(&write_bundle(&params_to_bundle(&p)).unwrap()).unwrap(),
        )
        .unwrap();
        assert_eq!(back.high.kernel, 5);
        assert_eq!(back.low.kernel, 3);
        assert_eq!(back.high.normalizer, Normalizer::Softmax);
        for (a, b) in p.values().iter().zip(back.values()) {
            assert_eq!(*a as f32, b as f32);
        }
    }
}

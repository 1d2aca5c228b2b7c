//! Spectral saliency from center-surround comparisons across a Gaussian
//! pyramid.
//!
//! Every band is blurred and decimated independently to form the pyramid.
//! For a center layer `c` and surround layer `s = c + offset`, layer `s` is
//! upsampled to layer `c`'s grid, the spectral angular distance between
//! co-located spectra is taken per pixel, and the resulting map is upsampled
//! to the input resolution. Maps stay in radians.

use crate::hsi::resample::resize_plane;
use crate::hsi::{HyperCube, Map2D, SpectralVector};
use crate::{Error, Result};
use rayon::prelude::*;

/// Burt–Adelson binomial taps `(1, 4, 6, 4, 1) / 16`.
pub const BINOMIAL5: [f64; 5] = [0.0625, 0.25, 0.375, 0.25, 0.0625];

#[derive(Debug, Clone, PartialEq)]
pub struct SsgConfig {
    pub num_layers: usize,
    pub center_indices: Vec<usize>,
    pub surround_offset: usize,
    pub taps: Vec<f64>,
}

impl Default for SsgConfig {
    fn default() -> Self {
        Self {
            num_layers: 8,
            center_indices: vec![2, 3, 4],
            surround_offset: 3,
            taps: BINOMIAL5.to_vec(),
        }
    }
}

impl SsgConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_layers == 0 {
            return Err(Error::InvalidArgument("num_layers must be ≥ 1".into()));
        }
        if self.center_indices.is_empty() || self.surround_offset == 0 {
            return Err(Error::InvalidArgument(
                "need at least one center index and a positive surround offset".into(),
            ));
        }
        let max_c = *self.center_indices.iter().max().unwrap();
        if max_c + self.surround_offset > self.num_layers - 1 {
            return Err(Error::InvalidArgument(format!(
                "surround layer {} exceeds last layer {}",
                max_c + self.surround_offset,
                self.num_layers - 1
            )));
        }
        if self.taps.is_empty() || self.taps.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(
                "blur taps must have odd length".into(),
            ));
        }
        let sum: f64 = self.taps.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "blur taps sum to {sum}, not 1"
            )));
        }
        Ok(())
    }
}

/// Spectral angular distance, or `None` if either vector has zero norm.
///
/// The cosine is `dot / sqrt(|a|² |b|²)`, clamped to `[-1, 1]`. Computing it
/// from squared norms makes `sad(v, v)` exactly 0 and keeps the result
/// bit-identical under power-of-two rescaling of either argument.
#[inline]
pub fn sad_checked(a: &[f64], b: &[f64]) -> Option<f64> {
    debug_assert_eq!(a.len(), b.len());
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    angle_from_parts(dot, na, nb)
}

/// Cosines this close to 1 are treated as parallel. Spectra are stored as
/// f32, so two pixels holding rescaled copies of one spectrum can differ by
/// ~1e-7 rad after rounding; the cutoff (about 1.4e-6 rad) absorbs that.
const PARALLEL_COS: f64 = 1.0 - 1e-12;

#[inline]
pub(crate) fn angle_from_parts(dot: f64, norm_sq_a: f64, norm_sq_b: f64) -> Option<f64> {
    if norm_sq_a == 0.0 || norm_sq_b == 0.0 {
        return None;
    }
    let cos = dot / (norm_sq_a * norm_sq_b).sqrt();
    if cos >= PARALLEL_COS {
        return Some(0.0);
    }
    Some(cos.max(-1.0).acos())
}

/// Spectral angular distance in radians, `[0, π]`. Zero-norm input yields 0.
pub fn sad(v1: &SpectralVector, v2: &SpectralVector) -> f64 {
    sad_checked(v1.as_slice(), v2.as_slice()).unwrap_or(0.0)
}

/// Blurs every band with the separable `taps` (replicate borders) and keeps
/// even rows and columns.
pub fn reduce_layer_with(cube: &HyperCube, taps: &[f64]) -> Result<HyperCube> {
    let (h, w) = (cube.height(), cube.width());
    if h < 2 || w < 2 {
        return Err(Error::InsufficientResolution(format!(
            "cannot halve a {h}x{w} layer"
        )));
    }
    let (oh, ow) = (h / 2, w / 2);
    let r = (taps.len() / 2) as isize;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let bands: Vec<Vec<f32>> = (0..cube.channels())
        .into_par_iter()
        .map(|b| {
            let src = cube.band(b);
            // horizontal pass at kept columns, all rows
            let mut tmp = vec![0f64; h * ow];
            for i in 0..h {
                let row = &src[i * w..(i + 1) * w];
                for oj in 0..ow {
                    let center = (2 * oj) as isize;
                    let mut acc = 0.0;
                    for (t, &k) in taps.iter().enumerate() {
                        acc += k * row[clamp(center + t as isize - r, w)] as f64;
                    }
                    tmp[i * ow + oj] = acc;
                }
            }
            let mut out = Vec::with_capacity(oh * ow);
            for oi in 0..oh {
                let center = (2 * oi) as isize;
                for oj in 0..ow {
                    let mut acc = 0.0;
                    for (t, &k) in taps.iter().enumerate() {
                        acc += k * tmp[clamp(center + t as isize - r, h) * ow + oj];
                    }
                    out.push(acc as f32);
                }
            }
            out
        })
        .collect();

    HyperCube::new(oh, ow, cube.channels(), bands.concat(), None)
}

pub fn reduce_layer(cube: &HyperCube) -> Result<HyperCube> {
    reduce_layer_with(cube, &BINOMIAL5)
}

#[derive(Debug, Clone)]
pub struct Pyramid {
    layers: Vec<HyperCube>,
}

impl Pyramid {
    pub fn layers(&self) -> &[HyperCube] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layer(&self, l: usize) -> &HyperCube {
        &self.layers[l]
    }
}

pub fn build_pyramid(cube: &HyperCube, cfg: &SsgConfig) -> Result<Pyramid> {
    cfg.validate()?;
    let need = 1usize << (cfg.num_layers - 1);
    let min_dim = cube.height().min(cube.width());
    if min_dim < need {
        return Err(Error::InsufficientResolution(format!(
            "{} layers need min dimension ≥ {need}, got {min_dim}",
            cfg.num_layers
        )));
    }
    let mut layers = Vec::with_capacity(cfg.num_layers);
    layers.push(cube.clone());
    for _ in 1..cfg.num_layers {
        let next = reduce_layer_with(layers.last().unwrap(), &cfg.taps)?;
        layers.push(next);
    }
    Ok(Pyramid { layers })
}

#[derive(Debug, Clone)]
pub struct SaliencyMap {
    pub center: usize,
    pub surround: usize,
    /// Raw radians at input resolution.
    pub map: Map2D,
    /// Pixels at the center grid where either spectrum had zero norm.
    pub degenerate_pixels: usize,
}

pub fn saliency_from_pair(pyramid: &Pyramid, c: usize, s: usize) -> Result<SaliencyMap> {
    if !(c < s && s < pyramid.len()) {
        return Err(Error::InvalidArgument(format!(
            "need c < s < {}, got c = {c}, s = {s}",
            pyramid.len()
        )));
    }
    let center = pyramid.layer(c);
    let surround = pyramid.layer(s);
    let (ch, cw, bands) = (center.height(), center.width(), center.channels());

    let up: Vec<Vec<f64>> = (0..bands)
        .into_par_iter()
        .map(|b| {
            resize_plane(
                surround.band(b),
                surround.height(),
                surround.width(),
                ch,
                cw,
            )
        })
        .collect();

    let rows: Vec<(Vec<f64>, usize)> = (0..ch)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::with_capacity(cw);
            let mut degenerate = 0;
            for j in 0..cw {
                let p = i * cw + j;
                let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
                for (b, u) in up.iter().enumerate() {
                    let x = center.get(b, i, j) as f64;
                    let y = u[p];
                    dot += x * y;
                    na += x * x;
                    nb += y * y;
                }
                out.push(angle_from_parts(dot, na, nb).unwrap_or_else(|| {
                    degenerate += 1;
                    0.0
                }));
            }
            (out, degenerate)
        })
        .collect();
    let degenerate_pixels = rows.iter().map(|r| r.1).sum();
    let coarse: Vec<f64> = rows.into_iter().flat_map(|r| r.0).collect();

    let (h, w) = (pyramid.layer(0).height(), pyramid.layer(0).width());
    let values = resize_plane(&coarse, ch, cw, h, w)
        .into_iter()
        .map(|v| (v as f32).clamp(0.0, std::f32::consts::PI))
        .collect();
    Ok(SaliencyMap {
        center: c,
        surround: s,
        map: Map2D::raw(h, w, values)?,
        degenerate_pixels,
    })
}

/// One saliency map per configured center index.
pub fn run_ssg(cube: &HyperCube, cfg: &SsgConfig) -> Result<Vec<SaliencyMap>> {
    let pyramid = build_pyramid(cube, cfg)?;
    cfg.center_indices
        .iter()
        .map(|&c| saliency_from_pair(&pyramid, c, c + cfg.surround_offset))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn v(x: &[f64]) -> SpectralVector {
        SpectralVector(x.to_vec())
    }

    #[test]
    fn sad_examples() {
        assert_eq!(sad(&v(&[1.0, 0.0]), &v(&[1.0, 0.0])), 0.0);
        assert_eq!(sad(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])), FRAC_PI_2);
        assert!((sad(&v(&[1.0, 1.0]), &v(&[1.0, 0.0])) - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(sad_checked(&[0.0, 0.0], &[1.0, 0.0]), None);
        assert_eq!(sad(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])), 0.0);
        let big = [3.0e150, 7.0e150, 1.0e150];
        assert_eq!(sad_checked(&[3.0, 7.0, 1.0], &[3.0, 7.0, 1.0]), Some(0.0));
        assert!(!sad(&v(&big), &v(&big)).is_nan());
    }

    #[test]
    fn reduce_constant_and_dims() {
        let cube = HyperCube::constant(224, 224, 2, 0.7).unwrap();
        let out = reduce_layer(&cube).unwrap();
        assert_eq!((out.height(), out.width()), (112, 112));
        assert!(out.data().iter().all(|&x| x == 0.7));
        let odd = HyperCube::constant(7, 5, 1, 1.0).unwrap();
        let out = reduce_layer(&odd).unwrap();
        assert_eq!((out.height(), out.width()), (3, 2));
        assert!(reduce_layer(&HyperCube::constant(1, 8, 1, 1.0).unwrap()).is_err());
    }

    #[test]
    fn reduce_impulse_center() {
        let cube = HyperCube::from_fn(8, 8, 1, |_, i, j| (i == 4 && j == 4) as u8 as f32).unwrap();
        let out = reduce_layer(&cube).unwrap();
        assert_eq!(out.get(0, 2, 2), 0.140625);
        assert_eq!(0.140625, (6.0f64 / 16.0).powi(2));
        // neighbors at distance 2 in the input see the outer taps
        assert_eq!(out.get(0, 2, 1), (6.0 * 1.0 / 256.0) as f32);
    }

    #[test]
    fn pyramid_dims() {
        let cube = HyperCube::constant(224, 224, 3, 1.5).unwrap();
        let p = build_pyramid(&cube, &SsgConfig::default()).unwrap();
        let dims: Vec<usize> = p.layers().iter().map(|l| l.height()).collect();
        assert_eq!(dims, vec![224, 112, 56, 28, 14, 7, 3, 1]);
        assert!(p
            .layers()
            .iter()
            .all(|l| l.data().iter().all(|&x| x == 1.5)));

        let small = HyperCube::constant(64, 64, 1, 1.0).unwrap();
        assert!(matches!(
            build_pyramid(&small, &SsgConfig::default()),
            Err(Error::InsufficientResolution(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SsgConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.center_indices = vec![2, 5];
        assert!(cfg.validate().is_err());
        let cfg = SsgConfig {
            taps: vec![0.25, 0.5, 0.2],
            ..SsgConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn pair_index_errors() {
        let cube = HyperCube::constant(128, 128, 2, 1.0).unwrap();
        let p = build_pyramid(&cube, &SsgConfig::default()).unwrap();
        assert!(saliency_from_pair(&p, 3, 3).is_err());
        assert!(saliency_from_pair(&p, 2, 8).is_err());
    }

    #[test]
    fn constant_cube_gives_zero_maps() {
        let cube = HyperCube::constant(128, 128, 4, 2.0).unwrap();
        let maps = run_ssg(&cube, &SsgConfig::default()).unwrap();
        assert_eq!(maps.len(), 3);
        for m in &maps {
            assert_eq!((m.map.height(), m.map.width()), (128, 128));
            assert!(m.map.values().iter().all(|&v| v == 0.0));
            assert_eq!(m.degenerate_pixels, 0);
        }
        let black = HyperCube::constant(128, 128, 4, 0.0).unwrap();
        let maps = run_ssg(&black, &SsgConfig::default()).unwrap();
        assert_eq!(maps[0].degenerate_pixels, 32 * 32);
        assert!(maps[0].map.values().iter().all(|&v| v == 0.0));
    }
}

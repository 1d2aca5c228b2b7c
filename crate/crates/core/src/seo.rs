//! Spectral edges: gradients of local spectral-angle neighborhoods.
//!
//! For each pixel, the spectral angular distance to every pixel in its
//! `k × k` window (coordinates clamped at the borders) forms a local map
//! `M`. The edge value is `|Gx ⋆ M| + |Gy ⋆ M|`, where `⋆` correlates the
//! whole window down to one scalar and `Gy = Gxᵀ`.

use crate::hsi::render::{luma, render_false_color};
use crate::hsi::{normalize_map, HyperCube, Map2D};
use crate::ssg::angle_from_parts;
use crate::{Error, Result};
use rayon::prelude::*;

/// Name of the detector standing in for a learned edge model in
/// [`edge_ground_truth`].
pub const EDGE_GT_DETECTOR: &str = "sobel3-magnitude";

#[derive(Debug, Clone, PartialEq)]
pub struct SeoConfig {
    pub kernel_sizes: Vec<usize>,
}

impl Default for SeoConfig {
    fn default() -> Self {
        Self {
            kernel_sizes: vec![3, 5, 7],
        }
    }
}

impl SeoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kernel_sizes.is_empty() {
            return Err(Error::InvalidArgument("no kernel sizes".into()));
        }
        for &k in &self.kernel_sizes {
            taps(k)?;
        }
        Ok(())
    }
}

/// Smoothing and derivative taps of the Sobel family.
fn taps(k: usize) -> Result<(&'static [f64], &'static [f64])> {
    match k {
        3 => Ok((&[1.0, 2.0, 1.0], &[-1.0, 0.0, 1.0])),
        5 => Ok((&[1.0, 4.0, 6.0, 4.0, 1.0], &[-1.0, -2.0, 0.0, 2.0, 1.0])),
        7 => Ok((
            &[1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0],
            &[-1.0, -4.0, -5.0, 0.0, 5.0, 4.0, 1.0],
        )),
        _ => Err(Error::InvalidArgument(format!(
            "unsupported gradient kernel size {k} (expected 3, 5 or 7)"
        ))),
    }
}

/// `Gx = smooth ⊗ deriv` (rows smooth, columns differentiate) and its
/// transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientKernelPair {
    pub size: usize,
    pub gx: Vec<Vec<f64>>,
    pub gy: Vec<Vec<f64>>,
}

pub fn make_gradient_kernels(k: usize) -> Result<GradientKernelPair> {
    let (smooth, deriv) = taps(k)?;
    let gx: Vec<Vec<f64>> = smooth
        .iter()
        .map(|&s| deriv.iter().map(|&d| s * d).collect())
        .collect();
    let gy = (0..k).map(|i| (0..k).map(|j| gx[j][i]).collect()).collect();
    Ok(GradientKernelPair { size: k, gx, gy })
}

#[inline]
fn clamp_coord(v: isize, n: usize) -> usize {
    v.clamp(0, n as isize - 1) as usize
}

/// Spectral angle from pixel `(i, j)` to each pixel of its clamped `k × k`
/// window, row-major.
pub fn local_sad_map(cube: &HyperCube, i: usize, j: usize, k: usize) -> Result<Vec<Vec<f64>>> {
    if i >= cube.height() || j >= cube.width() {
        return Err(Error::InvalidArgument(format!(
            "pixel ({i}, {j}) outside image"
        )));
    }
    if k.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "window size {k} must be odd"
        )));
    }
    let r = (k / 2) as isize;
    let center = cube.spectrum(i, j);
    let (mut nbr, c) = (vec![0.0; cube.channels()], center.as_slice());
    let nc: f64 = c.iter().map(|x| x * x).sum();
    Ok((-r..=r)
        .map(|a| {
            (-r..=r)
                .map(|b| {
                    let p = clamp_coord(i as isize + a, cube.height());
                    let q = clamp_coord(j as isize + b, cube.width());
                    if (p, q) == (i, j) {
                        return 0.0;
                    }
                    cube.spectrum_into(p, q, &mut nbr);
                    let dot: f64 = c.iter().zip(&nbr).map(|(x, y)| x * y).sum();
                    let nn: f64 = nbr.iter().map(|x| x * x).sum();
                    angle_from_parts(dot, nc, nn).unwrap_or(0.0)
                })
                .collect()
        })
        .collect())
}

/// Pixel-interleaved spectra and their squared norms, computed once per
/// image and shared by every window.
struct Spectra {
    h: usize,
    w: usize,
    c: usize,
    data: Vec<f64>,
    norm_sq: Vec<f64>,
}

impl Spectra {
    fn new(cube: &HyperCube) -> Self {
        let c = cube.channels();
        let data: Vec<f64> = cube.to_interleaved().into_iter().map(f64::from).collect();
        let norm_sq = data
            .chunks_exact(c)
            .map(|s| s.iter().map(|x| x * x).sum())
            .collect();
        Self {
            h: cube.height(),
            w: cube.width(),
            c,
            data,
            norm_sq,
        }
    }

    #[inline]
    fn pixel(&self, p: usize) -> &[f64] {
        &self.data[p * self.c..(p + 1) * self.c]
    }
}

/// Correlates a `k × k` window with `smooth ⊗ deriv` along rows (`gx`) and
/// its transpose (`gy`).
///
/// Terms are paired symmetrically about the window center, which makes the
/// result bit-exact under 90° rotations and mirror flips of the window.
#[inline]
fn window_gradients(m: &[f64], k: usize, smooth: &[f64], deriv: &[f64]) -> (f64, f64) {
    let c = k / 2;
    let at = |a: usize, b: usize| m[a * k + b];
    let row_diff = |a: usize| {
        let mut acc = 0.0;
        for t in 1..=c {
            acc += deriv[c + t] * (at(a, c + t) - at(a, c - t));
        }
        acc
    };
    let col_diff = |b: usize| {
        let mut acc = 0.0;
        for t in 1..=c {
            acc += deriv[c + t] * (at(c + t, b) - at(c - t, b));
        }
        acc
    };
    let mut gx = smooth[c] * row_diff(c);
    let mut gy = smooth[c] * col_diff(c);
    for t in 1..=c {
        gx += smooth[c + t] * (row_diff(c + t) + row_diff(c - t));
        gy += smooth[c + t] * (col_diff(c + t) + col_diff(c - t));
    }
    (gx, gy)
}

/// Spectral edge map, stored as f32.
pub fn spectral_edge(cube: &HyperCube, k: usize) -> Result<Map2D> {
    let values = spectral_edge_values(cube, k)?;
    Map2D::raw(
        cube.height(),
        cube.width(),
        values.into_iter().map(|v| v as f32).collect(),
    )
}

/// `|G_x * M| + |G_y * M|` per pixel in double precision, row-major.
pub fn spectral_edge_values(cube: &HyperCube, k: usize) -> Result<Vec<f64>> {
    let (smooth, deriv) = taps(k)?;
    let spectra = Spectra::new(cube);
    let (h, w) = (spectra.h, spectra.w);
    let r = (k / 2) as isize;

    let rows: Vec<Vec<f64>> = (0..h)
        .into_par_iter()
        .map(|i| {
            let mut window = vec![0.0; k * k];
            let mut out = Vec::with_capacity(w);
            for j in 0..w {
                let center = i * w + j;
                let (cv, cn) = (spectra.pixel(center), spectra.norm_sq[center]);
                for (a, win_row) in window.chunks_exact_mut(k).enumerate() {
                    let p = clamp_coord(i as isize + a as isize - r, h);
                    for (b, slot) in win_row.iter_mut().enumerate() {
                        let q = clamp_coord(j as isize + b as isize - r, w);
                        let n = p * w + q;
                        *slot = if n == center {
                            0.0
                        } else {
                            let dot: f64 =
                                cv.iter().zip(spectra.pixel(n)).map(|(x, y)| x * y).sum();
                            angle_from_parts(dot, cn, spectra.norm_sq[n]).unwrap_or(0.0)
                        };
                    }
                }
                let (gx, gy) = window_gradients(&window, k, smooth, deriv);
                out.push(gx.abs() + gy.abs());
            }
            out
        })
        .collect();
    Ok(rows.concat())
}

/// One edge map per configured kernel size.
pub fn run_seo(cube: &HyperCube, cfg: &SeoConfig) -> Result<Vec<Map2D>> {
    cfg.validate()?;
    cfg.kernel_sizes
        .iter()
        .map(|&k| spectral_edge(cube, k))
        .collect()
}

/// 3×3 Sobel gradient magnitude with replicate borders.
pub fn sobel_magnitude(plane: &[f64], h: usize, w: usize) -> Vec<f64> {
    let px = |i: isize, j: isize| plane[clamp_coord(i, h) * w + clamp_coord(j, w)];
    let mut out = Vec::with_capacity(h * w);
    for i in 0..h as isize {
        for j in 0..w as isize {
            let gx = (px(i - 1, j + 1) + 2.0 * px(i, j + 1) + px(i + 1, j + 1))
                - (px(i - 1, j - 1) + 2.0 * px(i, j - 1) + px(i + 1, j - 1));
            let gy = (px(i + 1, j - 1) + 2.0 * px(i + 1, j) + px(i + 1, j + 1))
                - (px(i - 1, j - 1) + 2.0 * px(i - 1, j) + px(i - 1, j + 1));
            out.push(gx.hypot(gy));
        }
    }
    out
}

fn normalized_term(values: Vec<f64>, h: usize, w: usize) -> Result<Map2D> {
    let raw = Map2D::raw(h, w, values.into_iter().map(|v| v as f32).collect())?;
    Ok(normalize_map(&raw))
}

/// Binary edge ground truth from the false-color image and the summed
/// saliency maps.
///
/// Each source contributes a min-max normalized Sobel magnitude; the sum is
/// clamped to `[0, 1]` and thresholded at 0.5. See [`EDGE_GT_DETECTOR`].
pub fn edge_ground_truth(false_color: &[Map2D; 3], saliency: &[Map2D]) -> Result<Map2D> {
    let (h, w) = (false_color[0].height(), false_color[0].width());
    let all_same = false_color
        .iter()
        .chain(saliency)
        .all(|m| m.height() == h && m.width() == w);
    if !all_same || saliency.is_empty() {
        return Err(Error::DimensionMismatch(
            "false-color planes and saliency maps must share dims".into(),
        ));
    }
    let fc_term = normalized_term(sobel_magnitude(&luma(false_color), h, w), h, w)?;

    let mut summed = vec![0.0f64; h * w];
    for m in saliency {
        for (s, &v) in summed.iter_mut().zip(m.values()) {
            *s += v as f64;
        }
    }
    let summed = normalized_term(summed, h, w)?;
    let sal_plane: Vec<f64> = summed.values().iter().map(|&v| v as f64).collect();
    let sal_term = normalized_term(sobel_magnitude(&sal_plane, h, w), h, w)?;

    let values = fc_term
        .values()
        .iter()
        .zip(sal_term.values())
        .map(|(&a, &b)| {
            let e = (a as f64 + b as f64).clamp(0.0, 1.0);
            if e >= 0.5 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Map2D::binary(h, w, values)
}

/// Convenience: false-color rendering plus [`edge_ground_truth`].
pub fn edge_ground_truth_from_cube(cube: &HyperCube, saliency: &[Map2D]) -> Result<Map2D> {
    edge_ground_truth(&render_false_color(cube), saliency)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn sobel3_coefficients() {
        let g = make_gradient_kernels(3).unwrap();
        assert_eq!(
            g.gx,
            vec![
                vec![-1.0, 0.0, 1.0],
                vec![-2.0, 0.0, 2.0],
                vec![-1.0, 0.0, 1.0]
            ]
        );
        assert!(make_gradient_kernels(9).is_err());
        assert!(make_gradient_kernels(4).is_err());
    }

    #[test]
    fn kernel_structure() {
        for k in [3, 5, 7] {
            let g = make_gradient_kernels(k).unwrap();
            let total: f64 = g.gx.iter().flatten().sum();
            assert_eq!(total, 0.0);
            for r in 0..k {
                assert_eq!(g.gx[r].iter().sum::<f64>(), 0.0);
                for c in 0..k {
                    assert_eq!(g.gy[r][c], g.gx[c][r]);
                    assert_eq!(g.gx[r][c], -g.gx[r][k - 1 - c]);
                }
            }
        }
    }

    #[test]
    fn local_map_center_and_orthogonal_neighbor() {
        let cube = HyperCube::from_fn(3, 3, 2, |b, i, j| match (i, j) {
            (0, 2) => (b == 1) as u8 as f32,
            _ => (b == 0) as u8 as f32,
        })
        .unwrap();
        let m = local_sad_map(&cube, 1, 1, 3).unwrap();
        assert_eq!(m[1][1], 0.0);
        assert_eq!(m[0][2], FRAC_PI_2);
        let others: f64 = m.iter().flatten().sum::<f64>() - m[0][2];
        assert_eq!(others, 0.0);
        assert!(local_sad_map(&cube, 3, 0, 3).is_err());
    }

    #[test]
    fn vertical_step_response() {
        // columns 0..4 hold e0, columns 4..8 hold e1
        let cube =
            HyperCube::from_fn(6, 8, 2, |b, _, j| ((j < 4) == (b == 0)) as u8 as f32).unwrap();
        let e = spectral_edge(&cube, 3).unwrap();
        let max = std::f32::consts::PI * 2.0;
        for i in 0..6 {
            for j in 0..8 {
                let v = e.get(i, j);
                if j == 3 || j == 4 {
                    assert!((v - max).abs() < 1e-6, "({i},{j}) = {v}");
                } else {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn constant_cube_zero() {
        let cube = HyperCube::constant(9, 7, 3, 4.0).unwrap();
        for m in run_seo(&cube, &SeoConfig::default()).unwrap() {
            assert!(m.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn edge_gt_constant_and_mismatch() {
        let fc = [0, 1, 2].map(|_| Map2D::zeros(5, 5, crate::MapKind::Normalized).unwrap());
        let sal = vec![Map2D::raw(5, 5, vec![1.0; 25]).unwrap(); 3];
        let e = edge_ground_truth(&fc, &sal).unwrap();
        assert_eq!(e.kind(), crate::MapKind::Binary);
        assert!(e.values().iter().all(|&v| v == 0.0));
        let wrong = vec![Map2D::raw(4, 5, vec![1.0; 20]).unwrap()];
        assert!(edge_ground_truth(&fc, &wrong).is_err());
    }
}

//! Bilinear spatial and linear spectral resampling.
//!
//! Spatial resampling uses half-pixel centers: output pixel `d` samples the
//! source at `(d + 0.5) * in / out - 0.5`, clamped to the valid range.
//! Spectral resampling places `out_c` samples uniformly from the first to the
//! last band, so both end bands are kept.

use super::HyperCube;
use crate::Result;
use rayon::prelude::*;

/// Source taps for one output coordinate: `(lo, hi, frac)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tap {
    pub lo: usize,
    pub hi: usize,
    pub frac: f64,
}

pub(crate) fn axis_taps(input: usize, output: usize) -> Vec<Tap> {
    let scale = input as f64 / output as f64;
    (0..output)
        .map(|d| {
            let src = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, (input - 1) as f64);
            let lo = src.floor() as usize;
            let hi = (lo + 1).min(input - 1);
            Tap {
                lo,
                hi,
                frac: src - lo as f64,
            }
        })
        .collect()
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

/// Bilinear resize of a single row-major plane, evaluated in `f64`.
pub fn resize_plane<T>(src: &[T], h: usize, w: usize, out_h: usize, out_w: usize) -> Vec<f64>
where
    T: Copy + Into<f64>,
{
    debug_assert_eq!(src.len(), h * w);
    let rows = axis_taps(h, out_h);
    let cols = axis_taps(w, out_w);
    let mut out = Vec::with_capacity(out_h * out_w);
    for r in &rows {
        let top = &src[r.lo * w..(r.lo + 1) * w];
        let bottom = &src[r.hi * w..(r.hi + 1) * w];
        for c in &cols {
            let a = lerp(top[c.lo].into(), top[c.hi].into(), c.frac);
            let b = lerp(bottom[c.lo].into(), bottom[c.hi].into(), c.frac);
            out.push(lerp(a, b, r.frac));
        }
    }
    out
}

/// Positions along the band axis for `out_c` uniformly spaced samples.
fn band_taps(channels: usize, out_c: usize) -> Vec<Tap> {
    (0..out_c)
        .map(|k| {
            let pos = if out_c == 1 {
                (channels - 1) as f64 / 2.0
            } else {
                k as f64 * (channels - 1) as f64 / (out_c - 1) as f64
            };
            let lo = (pos.floor() as usize).min(channels - 1);
            let hi = (lo + 1).min(channels - 1);
            Tap {
                lo,
                hi,
                frac: pos - lo as f64,
            }
        })
        .collect()
}

/// Resamples a cube to `out_h × out_w × out_c`. Spatial resampling is done
/// per band; the band axis and any wavelength table are interpolated
/// linearly at the same positions.
pub fn resample_cube(
    cube: &HyperCube,
    out_h: usize,
    out_w: usize,
    out_c: usize,
) -> Result<HyperCube> {
    if out_h == 0 || out_w == 0 || out_c == 0 {
        return Err(crate::Error::InvalidDimensions(format!(
            "resample target must be positive, got {out_h}x{out_w}x{out_c}"
        )));
    }
    let (h, w, c) = (cube.height(), cube.width(), cube.channels());

    let spatial: Vec<Vec<f64>> = (0..c)
        .into_par_iter()
        .map(|b| resize_plane(cube.band(b), h, w, out_h, out_w))
        .collect();

    let taps = band_taps(c, out_c);
    let plane = out_h * out_w;
    let mut data = vec![0f32; plane * out_c];
    data.par_chunks_mut(plane)
        .zip(taps.par_iter())
        .for_each(|(dst, t)| {
            let (lo, hi) = (&spatial[t.lo], &spatial[t.hi]);
            for (p, d) in dst.iter_mut().enumerate() {
                *d = lerp(lo[p], hi[p], t.frac) as f32;
            }
        });

    let wavelengths = cube.wavelengths().map(|wl| {
        taps.iter()
            .map(|t| lerp(wl[t.lo] as f64, wl[t.hi] as f64, t.frac) as f32)
            .collect()
    });
    HyperCube::new(out_h, out_w, out_c, data, wavelengths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_when_dims_match() {
        let cube = HyperCube::from_fn(5, 4, 3, |b, i, j| {
            (b as f32 * 0.7 + i as f32) * 1.3 - j as f32
        })
        .unwrap()
        .with_wavelengths(Some(vec![400.0, 410.5, 433.0]))
        .unwrap();
        assert_eq!(resample_cube(&cube, 5, 4, 3).unwrap(), cube);
    }

    #[test]
    fn constants_preserved() {
        let cube = HyperCube::constant(7, 9, 5, 0.3).unwrap();
        let out = resample_cube(&cube, 4, 13, 2).unwrap();
        assert_eq!((out.height(), out.width(), out.channels()), (4, 13, 2));
        assert!(out.data().iter().all(|&v| v == 0.3));
    }

    #[test]
    fn downsample_4x4_matches_direct_bilinear() {
        let vals: Vec<f32> = (0..16).map(|v| (v * v) as f32).collect();
        let cube = HyperCube::new(4, 4, 1, vals.clone(), None).unwrap();
        let out = resample_cube(&cube, 2, 2, 1).unwrap();
        // 2x downsampling with half-pixel centers samples at source
        // coordinate 0.5 and 2.5 on each axis: the mean of each 2x2 block.
        let px = |i: usize, j: usize| vals[i * 4 + j] as f64;
        let expected: Vec<f32> = [(0, 0), (0, 2), (2, 0), (2, 2)]
            .iter()
            .map(|&(i, j)| {
                ((px(i, j) + px(i, j + 1) + px(i + 1, j) + px(i + 1, j + 1)) / 4.0) as f32
            })
            .collect();
        assert_eq!(out.data(), expected.as_slice());
        assert_eq!(out.data(), &[10.5, 24.5, 114.5, 160.5]);
    }

    #[test]
    fn spectral_interpolation_keeps_end_bands() {
        let cube = HyperCube::new(
            1,
            1,
            5,
            vec![0.0, 1.0, 2.0, 3.0, 4.0],
            Some(vec![400.0, 500.0, 600.0, 700.0, 800.0]),
        )
        .unwrap();
        let out = resample_cube(&cube, 1, 1, 3).unwrap();
        assert_eq!(out.data(), &[0.0, 2.0, 4.0]);
        assert_eq!(out.wavelengths().unwrap(), &[400.0, 600.0, 800.0]);
        let out = resample_cube(&cube, 1, 1, 9).unwrap();
        assert_eq!(out.data()[1], 0.5);
    }
}

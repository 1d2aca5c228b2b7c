//! Synthetic two-material scenes with a known salient region.

use super::{HyperCube, Map2D, SpectralVector};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// Pixel centers within `radius` of `(cy, cx)`.
    Disk { cy: f64, cx: f64, radius: f64 },
    /// Half-open pixel rectangle.
    Rect {
        top: usize,
        left: usize,
        height: usize,
        width: usize,
    },
}

impl Shape {
    /// A disk centered in an `h × w` image.
    pub fn centered_disk(h: usize, w: usize, radius: f64) -> Self {
        Shape::Disk {
            cy: (h as f64 - 1.0) / 2.0,
            cx: (w as f64 - 1.0) / 2.0,
            radius,
        }
    }

    /// A rectangle covering the middle half of each axis.
    pub fn centered_rect(h: usize, w: usize) -> Self {
        Shape::Rect {
            top: h / 4,
            left: w / 4,
            height: (h / 2).max(1),
            width: (w / 2).max(1),
        }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        match *self {
            Shape::Disk { cy, cx, radius } => {
                let (dy, dx) = (i as f64 - cy, j as f64 - cx);
                dy * dy + dx * dx <= radius * radius
            }
            Shape::Rect {
                top,
                left,
                height,
                width,
            } => (top..top + height).contains(&i) && (left..left + width).contains(&j),
        }
    }

    fn fits(&self, h: usize, w: usize) -> bool {
        match *self {
            Shape::Disk { cy, cx, radius } => {
                radius >= 0.0
                    && cy - radius >= 0.0
                    && cx - radius >= 0.0
                    && cy + radius <= (h - 1) as f64
                    && cx + radius <= (w - 1) as f64
            }
            Shape::Rect {
                top,
                left,
                height,
                width,
            } => height > 0 && width > 0 && top + height <= h && left + width <= w,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub cube: HyperCube,
    pub ground_truth: Map2D,
}

/// Background spectrum everywhere, foreground spectrum inside `shape`, plus
/// i.i.d. Gaussian noise of standard deviation `noise_sigma` drawn from a
/// ChaCha8 stream seeded with `seed`.
pub fn synth_scene(
    h: usize,
    w: usize,
    shape: Shape,
    fg: &SpectralVector,
    bg: &SpectralVector,
    noise_sigma: f64,
    seed: u64,
) -> Result<Scene> {
    if h == 0 || w == 0 {
        return Err(Error::InvalidDimensions(format!("{h}x{w}")));
    }
    let c = fg.len();
    if c == 0 || bg.len() != c {
        return Err(Error::DimensionMismatch(format!(
            "foreground has {} bands, background {}",
            fg.len(),
            bg.len()
        )));
    }
    if fg.norm() == 0.0 || bg.norm() == 0.0 {
        return Err(Error::Degenerate("zero-norm spectrum".into()));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise_sigma {noise_sigma}")));
    }
    if !shape.fits(h, w) {
        return Err(Error::InvalidArgument(format!(
            "{shape:?} does not fit in {h}x{w}"
        )));
    }

    let mask: Vec<bool> = (0..h * w).map(|p| shape.contains(p / w, p % w)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sigma).expect("sigma validated");
    let mut data = Vec::with_capacity(h * w * c);
    for b in 0..c {
        let (f, g) = (fg.0[b], bg.0[b]);
        for &inside in &mask {
            let base = if inside { f } else { g };
            let n = if noise_sigma > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            data.push((base + n) as f32);
        }
    }
    let gt = mask.iter().map(|&m| m as u8 as f32).collect();
    Ok(Scene {
        cube: HyperCube::new(h, w, c, data, None)?,
        ground_truth: Map2D::binary(h, w, gt)?,
    })
}

/// Two nonnegative spectra with disjoint support (even / odd bands), hence
/// orthogonal.
pub fn orthogonal_pair(channels: usize) -> (SpectralVector, SpectralVector) {
    assert!(channels >= 2, "need at least two bands");
    let fg = (0..channels)
        .map(|b| if b % 2 == 0 { 1.0 } else { 0.0 })
        .collect();
    let bg = (0..channels)
        .map(|b| if b % 2 == 1 { 1.0 } else { 0.0 })
        .collect();
    (SpectralVector(fg), SpectralVector(bg))
}

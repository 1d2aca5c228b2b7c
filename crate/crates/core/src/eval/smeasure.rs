//! Structure measure: a weighted sum of region-aware and object-aware
//! structural similarity.
//!
//! Follows the reference definitions: the region term splits both maps into
//! four quadrants at the (rounded, 1-based) ground-truth centroid and
//! area-weights a per-quadrant SSIM-style score; the object term scores the
//! foreground and background distributions separately. `EPS` is the double
//! machine epsilon used by the reference.

use super::check_dims;
use crate::hsi::Map2D;
use crate::Result;

const EPS: f64 = f64::EPSILON;

struct Plane<'a> {
    h: usize,
    w: usize,
    s: &'a [f32],
    g: &'a [f32],
}

impl Plane<'_> {
    fn gt(&self, i: usize, j: usize) -> bool {
        self.g[i * self.w + j] >= 0.5
    }

    fn pred(&self, i: usize, j: usize) -> f64 {
        self.s[i * self.w + j] as f64
    }
}

/// Mean and sample standard deviation (`n − 1`, 0 for a single value).
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn object_score(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let (x, sigma) = mean_std(values);
    2.0 * x / (x * x + 1.0 + sigma + EPS)
}

/// Object-aware similarity.
pub fn s_object(s: &Map2D, g: &Map2D) -> Result<f64> {
    check_dims(s, g)?;
    let p = Plane {
        h: s.height(),
        w: s.width(),
        s: s.values(),
        g: g.values(),
    };
    Ok(object_term(&p))
}

fn object_term(p: &Plane<'_>) -> f64 {
    let (mut fg, mut bg) = (Vec::new(), Vec::new());
    for i in 0..p.h {
        for j in 0..p.w {
            if p.gt(i, j) {
                fg.push(p.pred(i, j));
            } else {
                bg.push(1.0 - p.pred(i, j));
            }
        }
    }
    let u = fg.len() as f64 / (p.h * p.w) as f64;
    u * object_score(&fg) + (1.0 - u) * object_score(&bg)
}

/// 1-based `(x, y)` centroid; the image center when the ground truth is
/// empty.
fn centroid(p: &Plane<'_>) -> (usize, usize) {
    let (mut total, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for i in 0..p.h {
        for j in 0..p.w {
            if p.gt(i, j) {
                total += 1.0;
                sx += (j + 1) as f64;
                sy += (i + 1) as f64;
            }
        }
    }
    if total == 0.0 {
        (
            (p.w as f64 / 2.0).round() as usize,
            (p.h as f64 / 2.0).round() as usize,
        )
    } else {
        ((sx / total).round() as usize, (sy / total).round() as usize)
    }
}

/// SSIM-style score over the rectangle `rows × cols`.
fn quadrant_ssim(p: &Plane<'_>, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> f64 {
    let n = (rows.len() * cols.len()) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let (mut sx, mut sy) = (0.0, 0.0);
    for i in rows.clone() {
        for j in cols.clone() {
            sx += p.pred(i, j);
            sy += p.gt(i, j) as u8 as f64;
        }
    }
    let (x, y) = (sx / n, sy / n);
    let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
    for i in rows {
        for j in cols.clone() {
            let dx = p.pred(i, j) - x;
            let dy = p.gt(i, j) as u8 as f64 - y;
            vx += dx * dx;
            vy += dy * dy;
            cxy += dx * dy;
        }
    }
    let (vx, vy, cxy) = (
        vx / (n - 1.0 + EPS),
        vy / (n - 1.0 + EPS),
        cxy / (n - 1.0 + EPS),
    );
    let alpha = 4.0 * x * y * cxy;
    let beta = (x * x + y * y) * (vx + vy);
    if alpha != 0.0 {
        alpha / (beta + EPS)
    } else if beta == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Region-aware similarity.
pub fn s_region(s: &Map2D, g: &Map2D) -> Result<f64> {
    check_dims(s, g)?;
    let p = Plane {
        h: s.height(),
        w: s.width(),
        s: s.values(),
        g: g.values(),
    };
    Ok(region_term(&p))
}

fn region_term(p: &Plane<'_>) -> f64 {
    let (x, y) = centroid(p);
    let area = (p.h * p.w) as f64;
    let w1 = (x * y) as f64 / area;
    let w2 = ((p.w - x) * y) as f64 / area;
    let w3 = (x * (p.h - y)) as f64 / area;
    let w4 = 1.0 - w1 - w2 - w3;
    w1 * quadrant_ssim(p, 0..y, 0..x)
        + w2 * quadrant_ssim(p, 0..y, x..p.w)
        + w3 * quadrant_ssim(p, y..p.h, 0..x)
        + w4 * quadrant_ssim(p, y..p.h, x..p.w)
}

/// `alpha · S_r + (1 − alpha) · S_o`, clamped to `[0, 1]`.
///
/// An all-background ground truth scores `1 − mean(S)`; an all-foreground one
/// scores `mean(S)`.
pub fn s_measure(s: &Map2D, g: &Map2D, alpha: f64) -> Result<f64> {
    check_dims(s, g)?;
    let p = Plane {
        h: s.height(),
        w: s.width(),
        s: s.values(),
        g: g.values(),
    };
    let fg = g.values().iter().filter(|&&v| v >= 0.5).count();
    let q = if fg == 0 {
        1.0 - s.mean()
    } else if fg == g.len() {
        s.mean()
    } else {
        alpha * region_term(&p) + (1.0 - alpha) * object_term(&p)
    };
    Ok(q.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_match_scores_one() {
        let g = Map2D::binary(
            4,
            5,
            vec![
                0., 0., 0., 0., 0., //
                0., 1., 1., 0., 0., //
                0., 1., 1., 1., 0., //
                0., 0., 0., 0., 0.,
            ],
        )
        .unwrap();
        let q = s_measure(&g, &g, 0.5).unwrap();
        assert!((q - 1.0).abs() < 1e-6, "{q}");
    }

    #[test]
    fn degenerate_conventions() {
        let zeros = Map2D::zeros(3, 3, crate::MapKind::Binary).unwrap();
        assert_eq!(s_measure(&zeros, &zeros, 0.5).unwrap(), 1.0);
        let s = Map2D::normalized(3, 3, vec![0.2; 9]).unwrap();
        assert!((s_measure(&s, &zeros, 0.5).unwrap() - 0.8).abs() < 1e-7);
        let ones = Map2D::binary(3, 3, vec![1.0; 9]).unwrap();
        assert!((s_measure(&s, &ones, 0.5).unwrap() - 0.2).abs() < 1e-7);
    }

    #[test]
    fn inverted_halves() {
        // The centroid (x, y) = (2, 2) splits the map into two uniform
        // quadrants; a zero-variance quadrant scores 1 whatever its mean, so
        // the region term is 1 while the object term is 0.
        let g = Map2D::binary(2, 4, vec![1., 1., 0., 0., 1., 1., 0., 0.]).unwrap();
        let inv = Map2D::binary(2, 4, vec![0., 0., 1., 1., 0., 0., 1., 1.]).unwrap();
        assert_eq!(s_object(&inv, &g).unwrap(), 0.0);
        assert_eq!(s_region(&inv, &g).unwrap(), 1.0);
        assert_eq!(s_measure(&inv, &g, 0.5).unwrap(), 0.5);
    }
}

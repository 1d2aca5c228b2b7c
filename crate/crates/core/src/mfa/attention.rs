use super::tensor::{FeatureTensor, Matrix};
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalizer {
    /// Elementwise logistic weights; windows are not renormalized.
    #[default]
    Sigmoid,
    /// Weights normalized over each window.
    Softmax,
}

impl Normalizer {
    pub fn name(self) -> &'static str {
        match self {
            Normalizer::Sigmoid => "sigmoid",
            Normalizer::Softmax => "softmax",
        }
    }
}

impl std::str::FromStr for Normalizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(Normalizer::Sigmoid),
            "softmax" => Ok(Normalizer::Softmax),
            _ => Err(Error::InvalidArgument(format!("unknown normalizer {s:?}"))),
        }
    }
}

/// Projections, relative-position bias table and window size of one
/// attention head.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionParams {
    /// `Dx × d`
    pub wq: Matrix,
    /// `Dy × d`
    pub wk: Matrix,
    /// `Dy × d`
    pub wv: Matrix,
    /// `(2k-1) × (2k-1)` row-major, indexed by `(dy + k - 1, dx + k - 1)`.
    pub bias: Vec<f64>,
    pub kernel: usize,
    pub normalizer: Normalizer,
}

impl AttentionParams {
    /// Uniform(−0.1, 0.1) projections and a zero bias table.
    pub fn init(
        dx: usize,
        dy: usize,
        d: usize,
        kernel: usize,
        normalizer: Normalizer,
        rng: &mut impl Rng,
    ) -> Self {
        Self {
            wq: Matrix::random(dx, d, -0.1, 0.1, rng),
            wk: Matrix::random(dy, d, -0.1, 0.1, rng),
            wv: Matrix::random(dy, d, -0.1, 0.1, rng),
            bias: vec![0.0; (2 * kernel - 1).pow(2)],
            kernel,
            normalizer,
        }
    }

    pub fn head_dim(&self) -> usize {
        self.wq.cols()
    }

    pub fn validate(&self, dx: usize, dy: usize) -> Result<()> {
        let k = self.kernel;
        if k.is_multiple_of(2) || !(1..=13).contains(&k) {
            return Err(Error::InvalidArgument(format!(
                "attention kernel {k} must be odd and in 1..=13"
            )));
        }
        let d = self.wq.cols();
        if self.wq.rows() != dx || self.wk.rows() != dy || self.wv.rows() != dy {
            return Err(Error::DimensionMismatch(format!(
                "projections expect query depth {} and key depth {}/{}, got {dx} and {dy}",
                self.wq.rows(),
                self.wk.rows(),
                self.wv.rows()
            )));
        }
        if self.wk.cols() != d || self.wv.cols() != d {
            return Err(Error::DimensionMismatch("projection widths differ".into()));
        }
        if self.bias.len() != (2 * k - 1).pow(2) {
            return Err(Error::LengthMismatch {
                expected: (2 * k - 1).pow(2),
                actual: self.bias.len(),
            });
        }
        if let Some(i) = self.bias.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(())
    }

    #[inline]
    fn bias_index(&self, di: isize, dj: isize) -> usize {
        let k = self.kernel as isize;
        ((di + k - 1) * (2 * k - 1) + (dj + k - 1)) as usize
    }
}

/// First row (or column) of the window around `pos`. Windows are shifted to
/// stay inside the image, never shrunk.
#[inline]
pub fn window_start(pos: usize, kernel: usize, extent: usize) -> usize {
    let r = kernel / 2;
    pos.saturating_sub(r).min(extent - kernel)
}

fn project(t: &FeatureTensor, m: &Matrix) -> Vec<f64> {
    let d = m.cols();
    let mut out = vec![0.0; t.height() * t.width() * d];
    out.par_chunks_mut(d)
        .zip(t.data().par_chunks_exact(t.depth()))
        .for_each(|(o, x)| m.left_mul_into(x, o));
    out
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Intermediate values kept for the backward pass.
pub(crate) struct AttentionCache {
    q: Vec<f64>,
    k: Vec<f64>,
    v: Vec<f64>,
    /// `k²` weights per pixel, window row-major.
    weights: Vec<f64>,
}

fn check_inputs(x: &FeatureTensor, y: &FeatureTensor, p: &AttentionParams) -> Result<()> {
    if !x.same_spatial(y) {
        return Err(Error::DimensionMismatch(format!(
            "query {}x{} vs key {}x{}",
            x.height(),
            x.width(),
            y.height(),
            y.width()
        )));
    }
    p.validate(x.depth(), y.depth())?;
    if p.kernel > x.height().min(x.width()) {
        return Err(Error::InvalidArgument(format!(
            "kernel {} exceeds feature size {}x{}",
            p.kernel,
            x.height(),
            x.width()
        )));
    }
    Ok(())
}

pub(crate) fn forward_cached(
    x: &FeatureTensor,
    y: &FeatureTensor,
    p: &AttentionParams,
) -> Result<(FeatureTensor, AttentionCache)> {
    check_inputs(x, y, p)?;
    let (h, w) = (x.height(), x.width());
    let (d, ks) = (p.head_dim(), p.kernel);
    let scale = 1.0 / (d as f64).sqrt();
    let q = project(x, &p.wq);
    let k = project(y, &p.wk);
    let v = project(y, &p.wv);

    let mut out = vec![0.0; h * w * d];
    let mut weights = vec![0.0; h * w * ks * ks];
    out.par_chunks_mut(w * d)
        .zip(weights.par_chunks_mut(w * ks * ks))
        .enumerate()
        .for_each(|(i, (out_row, wt_row))| {
            let i0 = window_start(i, ks, h);
            for j in 0..w {
                let j0 = window_start(j, ks, w);
                let qi = &q[(i * w + j) * d..][..d];
                let wts = &mut wt_row[j * ks * ks..][..ks * ks];
                for a in 0..ks {
                    for b in 0..ks {
                        let (pi, pj) = (i0 + a, j0 + b);
                        let kn = &k[(pi * w + pj) * d..][..d];
                        let dot: f64 = qi.iter().zip(kn).map(|(u, v)| u * v).sum();
                        let bias = p.bias
                            [p.bias_index(pi as isize - i as isize, pj as isize - j as isize)];
                        wts[a * ks + b] = dot * scale + bias;
                    }
                }
                match p.normalizer {
                    Normalizer::Sigmoid => wts.iter_mut().for_each(|l| *l = sigmoid(*l)),
                    Normalizer::Softmax => {
                        let max = wts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        let mut sum = 0.0;
                        for l in wts.iter_mut() {
                            *l = (*l - max).exp();
                            sum += *l;
                        }
                        wts.iter_mut().for_each(|l| *l /= sum);
                    }
                }
                let o = &mut out_row[j * d..][..d];
                for a in 0..ks {
                    for b in 0..ks {
                        let wt = wts[a * ks + b];
                        let vn = &v[((i0 + a) * w + j0 + b) * d..][..d];
                        for (oc, &vc) in o.iter_mut().zip(vn) {
                            *oc += wt * vc;
                        }
                    }
                }
            }
        });
    Ok((
        FeatureTensor::new(h, w, d, out)?,
        AttentionCache { q, k, v, weights },
    ))
}

/// Neighborhood attention of queries from `x` over keys/values from `y`.
///
/// For each pixel, logits against the `k × k` window are
/// `q·k / √d + B[relative offset]`; the normalized weights mix the window's
/// value vectors. Output depth is the head dimension `d`.
pub fn neighborhood_attention(
    x: &FeatureTensor,
    y: &FeatureTensor,
    p: &AttentionParams,
) -> Result<FeatureTensor> {
    forward_cached(x, y, p).map(|(out, _)| out)
}

/// Gradients of a scalar loss with respect to the inputs and parameters of
/// one attention head.
#[derive(Debug, Clone)]
pub struct AttentionGrads {
    pub x: FeatureTensor,
    pub y: FeatureTensor,
    pub wq: Matrix,
    pub wk: Matrix,
    pub wv: Matrix,
    pub bias: Vec<f64>,
}

pub(crate) fn backward_cached(
    x: &FeatureTensor,
    y: &FeatureTensor,
    p: &AttentionParams,
    cache: &AttentionCache,
    grad_out: &FeatureTensor,
) -> AttentionGrads {
    let (h, w) = (x.height(), x.width());
    let (d, ks) = (p.head_dim(), p.kernel);
    let scale = 1.0 / (d as f64).sqrt();
    let mut gq = vec![0.0; h * w * d];
    let mut gk = vec![0.0; h * w * d];
    let mut gv = vec![0.0; h * w * d];
    let mut gbias = vec![0.0; p.bias.len()];
    let mut gw = vec![0.0; ks * ks];

    for i in 0..h {
        let i0 = window_start(i, ks, h);
        for j in 0..w {
            let j0 = window_start(j, ks, w);
            let pix = i * w + j;
            let go = grad_out.pixel(i, j);
            let wts = &cache.weights[pix * ks * ks..][..ks * ks];
            for a in 0..ks {
                for b in 0..ks {
                    let n = (i0 + a) * w + j0 + b;
                    let vn = &cache.v[n * d..][..d];
                    gw[a * ks + b] = go.iter().zip(vn).map(|(g, v)| g * v).sum();
                    let wt = wts[a * ks + b];
                    for (g, &o) in gv[n * d..][..d].iter_mut().zip(go) {
                        *g += wt * o;
                    }
                }
            }
            // through the normalizer to the logits
            match p.normalizer {
                Normalizer::Sigmoid => {
                    for (g, &s) in gw.iter_mut().zip(wts) {
                        *g *= s * (1.0 - s);
                    }
                }
                Normalizer::Softmax => {
                    let dotp: f64 = gw.iter().zip(wts).map(|(g, s)| g * s).sum();
                    for (g, &s) in gw.iter_mut().zip(wts) {
                        *g = s * (*g - dotp);
                    }
                }
            }
            let qi = &cache.q[pix * d..][..d];
            for a in 0..ks {
                for b in 0..ks {
                    let gl = gw[a * ks + b];
                    let (pi, pj) = (i0 + a, j0 + b);
                    let n = pi * w + pj;
                    gbias[p.bias_index(pi as isize - i as isize, pj as isize - j as isize)] += gl;
                    let kn = &cache.k[n * d..][..d];
                    for c in 0..d {
                        gq[pix * d + c] += gl * scale * kn[c];
                        gk[n * d + c] += gl * scale * qi[c];
                    }
                }
            }
        }
    }

    let mut gx = FeatureTensor::zeros(h, w, x.depth());
    let mut gy = FeatureTensor::zeros(h, w, y.depth());
    let mut gwq = Matrix::zeros(p.wq.rows(), d);
    let mut gwk = Matrix::zeros(p.wk.rows(), d);
    let mut gwv = Matrix::zeros(p.wv.rows(), d);
    for i in 0..h {
        for j in 0..w {
            let pix = i * w + j;
            let (q, k, v) = (
                &gq[pix * d..][..d],
                &gk[pix * d..][..d],
                &gv[pix * d..][..d],
            );
            gwq.add_outer(x.pixel(i, j), q);
            gwk.add_outer(y.pixel(i, j), k);
            gwv.add_outer(y.pixel(i, j), v);
            p.wq.add_mul_transpose(q, gx.pixel_mut(i, j));
            let gyp = gy.pixel_mut(i, j);
            p.wk.add_mul_transpose(k, gyp);
            p.wv.add_mul_transpose(v, gyp);
        }
    }
    AttentionGrads {
        x: gx,
        y: gy,
        wq: gwq,
        wk: gwk,
        wv: gwv,
        bias: gbias,
    }
}

/// Backward pass of [`neighborhood_attention`] for an upstream gradient
/// `grad_out`. For self-attention, add `x` and `y` gradients.
pub fn attention_backward(
    x: &FeatureTensor,
    y: &FeatureTensor,
    p: &AttentionParams,
    grad_out: &FeatureTensor,
) -> Result<AttentionGrads> {
    let (out, cache) = forward_cached(x, y, p)?;
    if grad_out.height() != out.height()
        || grad_out.width() != out.width()
        || grad_out.depth() != out.depth()
    {
        return Err(Error::DimensionMismatch("upstream gradient shape".into()));
    }
    Ok(backward_cached(x, y, p, &cache, grad_out))
}

/// Window weights at pixel `(i, j)`, row-major over the shifted window.
pub fn attention_weights(
    x: &FeatureTensor,
    y: &FeatureTensor,
    p: &AttentionParams,
    i: usize,
    j: usize,
) -> Result<Vec<f64>> {
    let (_, cache) = forward_cached(x, y, p)?;
    let kk = p.kernel * p.kernel;
    Ok(cache.weights[(i * x.width() + j) * kk..][..kk].to_vec())
}

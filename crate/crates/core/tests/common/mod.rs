//! Straightforward reference implementations used as test oracles. They are
//! written independently of the library code paths they check: direct 2-D
//! kernels instead of separable passes, explicit per-pixel loops, pairwise
//! counting instead of histograms.

#![allow(dead_code, clippy::needless_range_loop)]

use hsod::hsi::Map2D;
use hsod::mfa::{AttentionParams, FeatureTensor, MfaParams, Normalizer};
use hsod::HyperCube;

/// Angle between two vectors via `2·atan2(|â − b̂|, |â + b̂|)`, which stays
/// accurate near 0 and π where `acos` of the cosine does not.
pub fn naive_sad(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (u, v) = (x / na, y / nb);
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

fn clampi(v: i64, n: usize) -> usize {
    if v < 0 {
        0
    } else if v as usize >= n {
        n - 1
    } else {
        v as usize
    }
}

/// A plain `[band][row][col]` array.
pub type Planes = Vec<Vec<Vec<f64>>>;

pub fn cube_planes(cube: &HyperCube) -> Planes {
    (0..cube.channels())
        .map(|b| {
            (0..cube.height())
                .map(|i| {
                    (0..cube.width())
                        .map(|j| cube.get(b, i, j) as f64)
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Full 5×5 binomial blur evaluated at even coordinates.
pub fn naive_reduce(planes: &Planes) -> Planes {
    let k = [1.0, 4.0, 6.0, 4.0, 1.0];
    planes
        .iter()
        .map(|p| {
            let (h, w) = (p.len(), p[0].len());
            (0..h / 2)
                .map(|oi| {
                    (0..w / 2)
                        .map(|oj| {
                            let mut acc = 0.0;
                            for a in 0..5 {
                                for b in 0..5 {
                                    let y = clampi(2 * oi as i64 + a as i64 - 2, h);
                                    let x = clampi(2 * oj as i64 + b as i64 - 2, w);
                                    acc += k[a] * k[b] * p[y][x];
                                }
                            }
                            acc / 256.0
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Bilinear sample with half-pixel centers.
pub fn naive_resize(p: &[Vec<f64>], oh: usize, ow: usize) -> Vec<Vec<f64>> {
    let (h, w) = (p.len(), p[0].len());
    let coord = |o: usize, n_in: usize, n_out: usize| {
        let s = ((o as f64 + 0.5) * n_in as f64 / n_out as f64 - 0.5)
            .max(0.0)
            .min((n_in - 1) as f64);
        let i0 = s.floor() as usize;
        let i1 = if i0 + 1 < n_in { i0 + 1 } else { i0 };
        (i0, i1, s - i0 as f64)
    };
    (0..oh)
        .map(|oi| {
            let (y0, y1, fy) = coord(oi, h, oh);
            (0..ow)
                .map(|oj| {
                    let (x0, x1, fx) = coord(oj, w, ow);
                    (1.0 - fy) * (1.0 - fx) * p[y0][x0]
                        + (1.0 - fy) * fx * p[y0][x1]
                        + fy * (1.0 - fx) * p[y1][x0]
                        + fy * fx * p[y1][x1]
                })
                .collect()
        })
        .collect()
}

/// Center-surround saliency map at full resolution.
pub fn naive_saliency(cube: &HyperCube, c: usize, s: usize) -> Vec<Vec<f64>> {
    let mut layers = vec![cube_planes(cube)];
    for _ in 0..s {
        let next = naive_reduce(layers.last().unwrap());
        layers.push(next);
    }
    let center = &layers[c];
    let (ch, cw) = (center[0].len(), center[0][0].len());
    let up: Planes = layers[s].iter().map(|p| naive_resize(p, ch, cw)).collect();
    let coarse: Vec<Vec<f64>> = (0..ch)
        .map(|i| {
            (0..cw)
                .map(|j| {
                    let a: Vec<f64> = center.iter().map(|p| p[i][j]).collect();
                    let b: Vec<f64> = up.iter().map(|p| p[i][j]).collect();
                    naive_sad(&a, &b)
                })
                .collect()
        })
        .collect();
    naive_resize(&coarse, cube.height(), cube.width())
}

fn gradient_kernel(k: usize) -> Vec<Vec<f64>> {
    let (smooth, deriv): (Vec<f64>, Vec<f64>) = match k {
        3 => (vec![1., 2., 1.], vec![-1., 0., 1.]),
        5 => (vec![1., 4., 6., 4., 1.], vec![-1., -2., 0., 2., 1.]),
        7 => (
            vec![1., 6., 15., 20., 15., 6., 1.],
            vec![-1., -4., -5., 0., 5., 4., 1.],
        ),
        _ => panic!("size {k}"),
    };
    smooth
        .iter()
        .map(|s| deriv.iter().map(|d| s * d).collect())
        .collect()
}

/// Triple-loop spectral edge: for every pixel build the local angle map and
/// correlate it with the full 2-D kernels.
pub fn naive_spectral_edge(cube: &HyperCube, k: usize) -> Vec<Vec<f64>> {
    let gx = gradient_kernel(k);
    let r = (k / 2) as i64;
    let (h, w) = (cube.height(), cube.width());
    let spectrum = |i: usize, j: usize| -> Vec<f64> {
        (0..cube.channels())
            .map(|b| cube.get(b, i, j) as f64)
            .collect()
    };
    (0..h)
        .map(|i| {
            (0..w)
                .map(|j| {
                    let center = spectrum(i, j);
                    let mut m = vec![vec![0.0; k]; k];
                    for a in 0..k {
                        for b in 0..k {
                            let p = clampi(i as i64 + a as i64 - r, h);
                            let q = clampi(j as i64 + b as i64 - r, w);
                            m[a][b] = naive_sad(&center, &spectrum(p, q));
                        }
                    }
                    let (mut sx, mut sy) = (0.0, 0.0);
                    for a in 0..k {
                        for b in 0..k {
                            sx += gx[a][b] * m[a][b];
                            sy += gx[b][a] * m[a][b];
                        }
                    }
                    sx.abs() + sy.abs()
                })
                .collect()
        })
        .collect()
}

fn proj(x: &[f64], m: &hsod::mfa::Matrix) -> Vec<f64> {
    (0..m.cols())
        .map(|c| (0..m.rows()).map(|r| x[r] * m.get(r, c)).sum())
        .collect()
}

/// Neighborhood attention evaluated pixel by pixel.
pub fn naive_attention(
    x: &FeatureTensor,
    y: &FeatureTensor,
    p: &AttentionParams,
) -> Vec<Vec<Vec<f64>>> {
    let (h, w, k) = (x.height(), x.width(), p.kernel);
    let d = p.wq.cols();
    let start = |pos: usize, n: usize| -> usize {
        let s = pos as i64 - (k / 2) as i64;
        s.max(0).min((n - k) as i64) as usize
    };
    (0..h)
        .map(|i| {
            (0..w)
                .map(|j| {
                    let q = proj(x.pixel(i, j), &p.wq);
                    let (i0, j0) = (start(i, h), start(j, w));
                    let mut logits = Vec::new();
                    let mut values = Vec::new();
                    for pi in i0..i0 + k {
                        for pj in j0..j0 + k {
                            let kv = proj(y.pixel(pi, pj), &p.wk);
                            let dot: f64 = q.iter().zip(&kv).map(|(a, b)| a * b).sum();
                            let di = pi as i64 - i as i64 + k as i64 - 1;
                            let dj = pj as i64 - j as i64 + k as i64 - 1;
                            let bias = p.bias[(di * (2 * k as i64 - 1) + dj) as usize];
                            logits.push(dot / (d as f64).sqrt() + bias);
                            values.push(proj(y.pixel(pi, pj), &p.wv));
                        }
                    }
                    let weights: Vec<f64> = match p.normalizer {
                        Normalizer::Sigmoid => {
                            logits.iter().map(|l| 1.0 / (1.0 + (-l).exp())).collect()
                        }
                        Normalizer::Softmax => {
                            let e: Vec<f64> = logits.iter().map(|l| l.exp()).collect();
                            let z: f64 = e.iter().sum();
                            e.iter().map(|v| v / z).collect()
                        }
                    };
                    (0..d)
                        .map(|c| weights.iter().zip(&values).map(|(wt, v)| wt * v[c]).sum())
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Mixed-frequency attention with every stage spelled out.
pub fn naive_mfa(f_de: &FeatureTensor, f_ds: &FeatureTensor, p: &MfaParams) -> Vec<Vec<Vec<f64>>> {
    let c = f_ds.depth();
    let half = c / 2;
    let g = |from: usize, to: usize| {
        FeatureTensor::from_fn(f_ds.height(), f_ds.width(), to - from, |i, j, d| {
            f_ds.pixel(i, j)[from + d]
        })
        .unwrap()
    };
    let (g1, g2) = (g(0, half), g(half, c));
    let fh = naive_attention(f_de, &g1, &p.high);
    let fl = naive_attention(&g2, &g2, &p.low);
    let w = &p.proj.weight;
    fh.iter()
        .zip(&fl)
        .map(|(rh, rl)| {
            rh.iter()
                .zip(rl)
                .map(|(a, b)| {
                    let cat: Vec<f64> = a.iter().chain(b).copied().collect();
                    (0..w.cols())
                        .map(|o| {
                            let z: f64 = (0..w.rows()).map(|r| cat[r] * w.get(r, o)).sum::<f64>()
                                + p.proj.bias[o];
                            if z > 0.0 {
                                z
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn naive_mae(s: &Map2D, g: &Map2D) -> f64 {
    let mut acc = 0.0;
    for i in 0..s.height() {
        for j in 0..s.width() {
            acc += (s.get(i, j) as f64 - g.get(i, j) as f64).abs();
        }
    }
    acc / (s.height() * s.width()) as f64
}

fn q255(v: f32) -> i32 {
    (v as f64 * 255.0).round() as i32
}

/// `(precision, recall, fpr)` at each threshold by direct counting.
pub fn naive_pr(s: &Map2D, g: &Map2D) -> Vec<(f64, f64, f64)> {
    (0..256)
        .map(|t| {
            let (mut tp, mut fp, mut pos, mut neg) = (0.0, 0.0, 0.0, 0.0);
            for (&v, &gt) in s.values().iter().zip(g.values()) {
                let on = q255(v) >= t;
                if gt == 1.0 {
                    pos += 1.0;
                    if on {
                        tp += 1.0;
                    }
                } else {
                    neg += 1.0;
                    if on {
                        fp += 1.0;
                    }
                }
            }
            let precision = if tp + fp == 0.0 { 1.0 } else { tp / (tp + fp) };
            let recall = if pos == 0.0 { 0.0 } else { tp / pos };
            let fpr = if neg == 0.0 { 0.0 } else { fp / neg };
            (precision, recall, fpr)
        })
        .collect()
}

pub fn naive_f_max(s: &Map2D, g: &Map2D, beta2: f64) -> f64 {
    naive_pr(s, g)
        .into_iter()
        .map(|(p, r, _)| {
            if p == 0.0 && r == 0.0 {
                0.0
            } else {
                (1.0 + beta2) * p * r / (beta2 * p + r)
            }
        })
        .fold(0.0, f64::max)
}

/// AUC as the probability that a random positive outranks a random
/// negative on the quantized scale, ties counting one half.
pub fn naive_auc(s: &Map2D, g: &Map2D) -> f64 {
    let pos: Vec<i32> = s
        .values()
        .iter()
        .zip(g.values())
        .filter(|(_, &g)| g == 1.0)
        .map(|(&v, _)| q255(v))
        .collect();
    let neg: Vec<i32> = s
        .values()
        .iter()
        .zip(g.values())
        .filter(|(_, &g)| g != 1.0)
        .map(|(&v, _)| q255(v))
        .collect();
    let mut wins = 0.0;
    for &p in &pos {
        for &n in &neg {
            wins += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

pub fn naive_cc(s: &Map2D, g: &Map2D) -> f64 {
    let n = s.len() as f64;
    let xs: Vec<f64> = s.values().iter().map(|&v| v as f64).collect();
    let ys: Vec<f64> = g.values().iter().map(|&v| v as f64).collect();
    let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
    let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
    let sxx: f64 = xs.iter().map(|a| a * a).sum();
    let syy: f64 = ys.iter().map(|a| a * a).sum();
    (sxy - sx * sy / n) / ((sxx - sx * sx / n) * (syy - sy * sy / n)).sqrt()
}

/// Second implementation of the structure measure built on explicit
/// quadrant copies.
pub fn naive_s_measure(s: &Map2D, g: &Map2D, alpha: f64) -> f64 {
    let eps = f64::EPSILON;
    let (h, w) = (s.height(), s.width());
    let sv = |i: usize, j: usize| s.get(i, j) as f64;
    let gv = |i: usize, j: usize| g.get(i, j) as f64;
    let ngt: f64 = g.values().iter().map(|&v| v as f64).sum();
    let mean_s: f64 = s.values().iter().map(|&v| v as f64).sum::<f64>() / (h * w) as f64;
    if ngt == 0.0 {
        return (1.0 - mean_s).clamp(0.0, 1.0);
    }
    if ngt == (h * w) as f64 {
        return mean_s.clamp(0.0, 1.0);
    }

    let obj = |vals: Vec<f64>| -> f64 {
        if vals.is_empty() {
            return 0.0;
        }
        let n = vals.len() as f64;
        let m = vals.iter().sum::<f64>() / n;
        let sd = if vals.len() > 1 {
            (vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        2.0 * m / (m * m + 1.0 + sd + eps)
    };
    let mut fg = vec![];
    let mut bg = vec![];
    for i in 0..h {
        for j in 0..w {
            if gv(i, j) == 1.0 {
                fg.push(sv(i, j));
            } else {
                bg.push(1.0 - sv(i, j));
            }
        }
    }
    let u = ngt / (h * w) as f64;
    let s_o = u * obj(fg) + (1.0 - u) * obj(bg);

    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..h {
        for j in 0..w {
            cx += gv(i, j) * (j as f64 + 1.0);
            cy += gv(i, j) * (i as f64 + 1.0);
        }
    }
    let x = (cx / ngt).round() as usize;
    let y = (cy / ngt).round() as usize;
    let quad = |r0: usize, r1: usize, c0: usize, c1: usize| -> (Vec<f64>, Vec<f64>) {
        let mut a = vec![];
        let mut b = vec![];
        for i in r0..r1 {
            for j in c0..c1 {
                a.push(sv(i, j));
                b.push(gv(i, j));
            }
        }
        (a, b)
    };
    let ssim = |(a, b): (Vec<f64>, Vec<f64>)| -> f64 {
        if a.is_empty() {
            return 0.0;
        }
        let n = a.len() as f64;
        let mx = a.iter().sum::<f64>() / n;
        let my = b.iter().sum::<f64>() / n;
        let vx = a.iter().map(|v| (v - mx).powi(2)).sum::<f64>() / (n - 1.0 + eps);
        let vy = b.iter().map(|v| (v - my).powi(2)).sum::<f64>() / (n - 1.0 + eps);
        let cxy = a
            .iter()
            .zip(&b)
            .map(|(p, q)| (p - mx) * (q - my))
            .sum::<f64>()
            / (n - 1.0 + eps);
        let al = 4.0 * mx * my * cxy;
        let be = (mx * mx + my * my) * (vx + vy);
        if al != 0.0 {
            al / (be + eps)
        } else if be == 0.0 {
            1.0
        } else {
            0.0
        }
    };
    let area = (h * w) as f64;
    let w1 = (x * y) as f64 / area;
    let w2 = ((w - x) * y) as f64 / area;
    let w3 = (x * (h - y)) as f64 / area;
    let w4 = 1.0 - w1 - w2 - w3;
    let s_r = w1 * ssim(quad(0, y, 0, x))
        + w2 * ssim(quad(0, y, x, w))
        + w3 * ssim(quad(y, h, 0, x))
        + w4 * ssim(quad(y, h, x, w));
    (alpha * s_r + (1.0 - alpha) * s_o).clamp(0.0, 1.0)
}

/// Random `h × w` prediction in `[0, 1]` and a binary ground truth holding
/// both classes.
pub fn random_instance(h: usize, w: usize, rng: &mut impl rand::Rng) -> (Map2D, Map2D) {
    loop {
        let s: Vec<f32> = (0..h * w).map(|_| rng.random::<f32>()).collect();
        let g: Vec<f32> = (0..h * w)
            .map(|_| (rng.random::<f32>() < 0.4) as u8 as f32)
            .collect();
        let ones = g.iter().filter(|&&v| v == 1.0).count();
        if ones > 0 && ones < h * w {
            return (
                Map2D::normalized(h, w, s).unwrap(),
                Map2D::binary(h, w, g).unwrap(),
            );
        }
    }
}

/// Random `h × w × c` cube with positive samples.
pub fn random_cube(h: usize, w: usize, c: usize, rng: &mut impl rand::Rng) -> HyperCube {
    let data = (0..h * w * c)
        .map(|_| rng.random_range(0.05f32..1.0))
        .collect();
    HyperCube::new(h, w, c, data, None).unwrap()
}

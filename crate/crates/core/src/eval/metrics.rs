use super::check_dims;
use crate::hsi::Map2D;
use crate::{Error, Result};

/// Number of binarization thresholds, `0..=255`.
pub const THRESHOLDS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub threshold: u8,
    pub precision: f64,
    pub recall: f64,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// Mean absolute error.
pub fn mae(s: &Map2D, g: &Map2D) -> Result<f64> {
    check_dims(s, g)?;
    let total: f64 = s
        .values()
        .iter()
        .zip(g.values())
        .map(|(&a, &b)| (a as f64 - b as f64).abs())
        .sum();
    Ok(total / s.len() as f64)
}

/// `round(v · 255)`, halves rounded up.
#[inline]
pub fn quantize255(v: f32) -> u8 {
    (v as f64 * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Confusion counts at every threshold `t`, binarizing with
/// `round(S·255) ≥ t`. Computed from a histogram, so the sweep is linear in
/// the pixel count.
#[derive(Debug, Clone)]
struct Sweep {
    tp: [u64; THRESHOLDS],
    fp: [u64; THRESHOLDS],
    pos: u64,
    neg: u64,
}

fn sweep(s: &Map2D, g: &Map2D) -> Result<Sweep> {
    check_dims(s, g)?;
    let mut hist_pos = [0u64; THRESHOLDS];
    let mut hist_neg = [0u64; THRESHOLDS];
    for (&v, &gt) in s.values().iter().zip(g.values()) {
        let q = quantize255(v) as usize;
        if gt >= 0.5 {
            hist_pos[q] += 1;
        } else {
            hist_neg[q] += 1;
        }
    }
    let (mut tp, mut fp) = ([0u64; THRESHOLDS], [0u64; THRESHOLDS]);
    let (mut acc_p, mut acc_n) = (0, 0);
    for t in (0..THRESHOLDS).rev() {
        acc_p += hist_pos[t];
        acc_n += hist_neg[t];
        tp[t] = acc_p;
        fp[t] = acc_n;
    }
    Ok(Sweep {
        tp,
        fp,
        pos: acc_p,
        neg: acc_n,
    })
}

fn ratio(num: u64, den: u64, empty: f64) -> f64 {
    if den == 0 {
        empty
    } else {
        num as f64 / den as f64
    }
}

/// The full 256-threshold curve. Precision is 1 for an empty binarization;
/// recall (TPR) and FPR are 0 when the corresponding class is empty.
pub fn threshold_sweep(s: &Map2D, g: &Map2D) -> Result<Vec<CurvePoint>> {
    let sw = sweep(s, g)?;
    Ok((0..THRESHOLDS)
        .map(|t| {
            let predicted = sw.tp[t] + sw.fp[t];
            CurvePoint {
                threshold: t as u8,
                precision: ratio(sw.tp[t], predicted, 1.0),
                recall: ratio(sw.tp[t], sw.pos, 0.0),
                tpr: ratio(sw.tp[t], sw.pos, 0.0),
                fpr: ratio(sw.fp[t], sw.neg, 0.0),
            }
        })
        .collect())
}

fn f_beta(precision: f64, recall: f64, beta2: f64) -> f64 {
    let den = beta2 * precision + recall;
    if den == 0.0 {
        0.0
    } else {
        (1.0 + beta2) * precision * recall / den
    }
}

#[derive(Debug, Clone)]
pub struct PrResult {
    pub curve: Vec<CurvePoint>,
    pub f_beta_max: f64,
    pub best_threshold: u8,
}

pub fn pr_f_measure(s: &Map2D, g: &Map2D, beta2: f64) -> Result<PrResult> {
    let curve = threshold_sweep(s, g)?;
    if g.values().iter().all(|&v| v < 0.5) {
        return Err(Error::Degenerate("ground truth has no positives".into()));
    }
    let (best_threshold, f_beta_max) = curve
        .iter()
        .map(|p| (p.threshold, f_beta(p.precision, p.recall, beta2)))
        .fold((0u8, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    Ok(PrResult {
        curve,
        f_beta_max,
        best_threshold,
    })
}

#[derive(Debug, Clone)]
pub struct RocResult {
    /// `(0,0)`, the distinct operating points of non-empty binarizations
    /// sorted by FPR then TPR, and `(1,1)`.
    pub curve: Vec<RocPoint>,
    pub auc: f64,
}

pub fn roc_auc(s: &Map2D, g: &Map2D) -> Result<RocResult> {
    let sw = sweep(s, g)?;
    if sw.pos == 0 || sw.neg == 0 {
        return Err(Error::Degenerate(
            "ground truth needs both positives and negatives".into(),
        ));
    }
    let mut pts: Vec<RocPoint> = Vec::new();
    for t in 0..THRESHOLDS {
        if sw.tp[t] + sw.fp[t] == 0 {
            continue;
        }
        let p = RocPoint {
            fpr: sw.fp[t] as f64 / sw.neg as f64,
            tpr: sw.tp[t] as f64 / sw.pos as f64,
        };
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts.sort_by(|a, b| a.fpr.total_cmp(&b.fpr).then(a.tpr.total_cmp(&b.tpr)));
    let mut curve = Vec::with_capacity(pts.len() + 2);
    curve.push(RocPoint { fpr: 0.0, tpr: 0.0 });
    curve.extend(pts);
    curve.push(RocPoint { fpr: 1.0, tpr: 1.0 });
    let auc = curve
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum();
    Ok(RocResult { curve, auc })
}

/// Pearson correlation with population moments.
pub fn cc(s: &Map2D, g: &Map2D) -> Result<f64> {
    check_dims(s, g)?;
    let n = s.len() as f64;
    let ms = s.mean();
    let mg = g.mean();
    let (mut cov, mut vs, mut vg) = (0.0, 0.0, 0.0);
    for (&a, &b) in s.values().iter().zip(g.values()) {
        let (da, db) = (a as f64 - ms, b as f64 - mg);
        cov += da * db;
        vs += da * da;
        vg += db * db;
    }
    if vs == 0.0 || vg == 0.0 {
        return Err(Error::Degenerate("correlation of a constant map".into()));
    }
    let r = (cov / n) / ((vs / n).sqrt() * (vg / n).sqrt());
    Ok(r.clamp(-1.0, 1.0))
}

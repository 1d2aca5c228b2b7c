use super::check_dims;
use crate::hsi::Map2D;
use crate::{Error, Result};

/// Prediction clamping bound for BCE.
pub const BCE_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    #[default]
    Sum,
    Mean,
}

/// `−Σ [X log Y + (1 − X) log(1 − Y)]` with `Y` clamped to
/// `[BCE_EPS, 1 − BCE_EPS]`. `y` is the prediction, `x` the target.
pub fn bce_loss(y: &Map2D, x: &Map2D, reduction: Reduction) -> Result<f64> {
    check_dims(y, x)?;
    let sum: f64 = y
        .values()
        .iter()
        .zip(x.values())
        .map(|(&p, &t)| {
            let p = (p as f64).clamp(BCE_EPS, 1.0 - BCE_EPS);
            let t = t as f64;
            -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
        })
        .sum();
    Ok(match reduction {
        Reduction::Sum => sum,
        Reduction::Mean => sum / y.len() as f64,
    })
}

/// `1 − ΣSG / Σ(S + G − SG)`, evaluated as `(union − inter) / union`.
pub fn iou_loss(s: &Map2D, g: &Map2D) -> Result<f64> {
    check_dims(s, g)?;
    let (mut inter, mut union) = (0.0, 0.0);
    for (&a, &b) in s.values().iter().zip(g.values()) {
        let (a, b) = (a as f64, b as f64);
        inter += a * b;
        union += a + b - a * b;
    }
    if union == 0.0 {
        return Err(Error::Degenerate("IoU of two empty maps".into()));
    }
    Ok(((union - inter) / union).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridLoss {
    pub edge: f64,
    pub saliency: f64,
    pub total: f64,
}

/// Edge BCE plus IoU + BCE on the final saliency map.
pub fn hybrid_loss(m_e: &Map2D, e: &Map2D, s: &Map2D, g: &Map2D) -> Result<HybridLoss> {
    let edge = bce_loss(m_e, e, Reduction::Sum)?;
    let saliency = iou_loss(s, g)? + bce_loss(s, g, Reduction::Sum)?;
    Ok(HybridLoss {
        edge,
        saliency,
        total: edge + saliency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::approx_constant)] // pinned hand value
    fn bce_examples() {
        let x = Map2D::binary(1, 1, vec![1.0]).unwrap();
        let y = Map2D::normalized(1, 1, vec![0.5]).unwrap();
        assert!((bce_loss(&y, &x, Reduction::Sum).unwrap() - 0.693147).abs() < 1e-6);

        let g = Map2D::binary(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(bce_loss(&g, &g, Reduction::Mean).unwrap() < 1e-5);
        let inv = Map2D::binary(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let l = bce_loss(&inv, &g, Reduction::Sum).unwrap();
        assert!((l - 4.0 * -(BCE_EPS.ln())).abs() < 1e-6);
        assert!((l / 4.0 - 16.118).abs() < 1e-3);
        assert!((bce_loss(&inv, &g, Reduction::Mean).unwrap() - l / 4.0).abs() < 1e-12);
    }

    #[test]
    fn iou_examples() {
        let g = Map2D::binary(1, 4, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(iou_loss(&g, &g).unwrap(), 0.0);
        let disjoint = Map2D::binary(1, 4, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(iou_loss(&disjoint, &g).unwrap(), 1.0);
        let overlap = Map2D::binary(1, 4, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(iou_loss(&overlap, &g).unwrap(), 2.0 / 3.0);
        let empty = Map2D::zeros(1, 4, crate::MapKind::Binary).unwrap();
        assert!(iou_loss(&empty, &empty).is_err());
    }

    #[test]
    fn hybrid_is_additive() {
        let g = Map2D::binary(1, 3, vec![1.0, 0.0, 1.0]).unwrap();
        let s = Map2D::normalized(1, 3, vec![0.8, 0.3, 0.6]).unwrap();
        let l = hybrid_loss(&s, &g, &s, &g).unwrap();
        assert_eq!(l.total, l.edge + l.saliency);
        let perfect = hybrid_loss(&g, &g, &g, &g).unwrap();
        assert!(perfect.total < 1e-4);
    }
}

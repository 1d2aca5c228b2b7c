//! Decoder skip fusion: edge features by concatenation, saliency features
//! by resize-project-add.

use super::tensor::{FeatureTensor, Matrix};
use crate::hsi::resample::resize_plane;
use crate::{Error, Result};

/// `[D_out², F_SE]` along depth.
pub fn fuse_edge_skip(d_out2: &FeatureTensor, f_se: &FeatureTensor) -> Result<FeatureTensor> {
    d_out2.concat_depth(f_se)
}

/// Bilinear spatial resize followed by a per-pixel linear channel map.
#[derive(Debug, Clone, PartialEq)]
pub struct ResizeProject {
    /// `D_in × D_out`
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl ResizeProject {
    pub fn zeros(d_in: usize, d_out: usize) -> Self {
        Self {
            weight: Matrix::zeros(d_in, d_out),
            bias: vec![0.0; d_out],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            weight: Matrix::identity(d),
            bias: vec![0.0; d],
        }
    }

    pub fn apply(&self, t: &FeatureTensor, out_h: usize, out_w: usize) -> Result<FeatureTensor> {
        if self.weight.rows() != t.depth() || self.bias.len() != self.weight.cols() {
            return Err(Error::DimensionMismatch(format!(
                "projection {}x{} for input depth {}",
                self.weight.rows(),
                self.weight.cols(),
                t.depth()
            )));
        }
        let planes: Vec<Vec<f64>> = (0..t.depth())
            .map(|d| resize_plane(&t.channel_plane(d), t.height(), t.width(), out_h, out_w))
            .collect();
        let d_out = self.weight.cols();
        let mut data = vec![0.0; out_h * out_w * d_out];
        let mut px = vec![0.0; t.depth()];
        for (p, o) in data.chunks_exact_mut(d_out).enumerate() {
            for (x, plane) in px.iter_mut().zip(&planes) {
                *x = plane[p];
            }
            self.weight.left_mul_into(&px, o);
            for (oc, b) in o.iter_mut().zip(&self.bias) {
                *oc += b;
            }
        }
        FeatureTensor::new(out_h, out_w, d_out, data)
    }
}

/// `D_out³ + [proj1(R1), proj2(R2)]`, with both projections resized to
/// `D_out³`'s grid.
pub fn fuse_saliency_skip(
    d_out3: &FeatureTensor,
    r1: &FeatureTensor,
    r2: &FeatureTensor,
    proj1: &ResizeProject,
    proj2: &ResizeProject,
) -> Result<FeatureTensor> {
    let (h, w) = (d_out3.height(), d_out3.width());
    let skip = proj1
        .apply(r1, h, w)?
        .concat_depth(&proj2.apply(r2, h, w)?)?;
    if skip.depth() != d_out3.depth() {
        return Err(Error::DimensionMismatch(format!(
            "projected skip depth {} vs decoder depth {}",
            skip.depth(),
            d_out3.depth()
        )));
    }
    let mut out = d_out3.clone();
    out.add_assign(&skip);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_skip_concatenates() {
        let a = FeatureTensor::from_fn(3, 3, 8, |i, j, d| (i * 9 + j * 3 + d) as f64).unwrap();
        let b = FeatureTensor::from_fn(3, 3, 4, |_, _, d| -(d as f64)).unwrap();
        let out = fuse_edge_skip(&a, &b).unwrap();
        assert_eq!(out.depth(), 12);
        assert_eq!(out.channels(0, 8).unwrap(), a);
        assert!(fuse_edge_skip(&a, &FeatureTensor::zeros(2, 3, 4)).is_err());
    }

    #[test]
    fn zero_projections_are_identity() {
        let d3 = FeatureTensor::from_fn(8, 8, 16, |i, j, d| (i as f64 - j as f64) * 0.3 + d as f64)
            .unwrap();
        let r1 = FeatureTensor::from_fn(16, 16, 8, |i, _, _| i as f64).unwrap();
        let r2 = FeatureTensor::from_fn(12, 12, 8, |_, j, _| j as f64).unwrap();
        let out = fuse_saliency_skip(
            &d3,
            &r1,
            &r2,
            &ResizeProject::zeros(8, 8),
            &ResizeProject::zeros(8, 8),
        )
        .unwrap();
        assert_eq!(out, d3);
        let bad = fuse_saliency_skip(
            &d3,
            &r1,
            &r2,
            &ResizeProject::zeros(8, 8),
            &ResizeProject::zeros(8, 4),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn hand_instance_2x2() {
        // D_out3: 2x2x2, R1: 1x1x1 (value 3), R2: 4x4x1 holding 0..16.
        let d3 =
            FeatureTensor::new(2, 2, 2, vec![1.0, 10.0, 2.0, 20.0, 3.0, 30.0, 4.0, 40.0]).unwrap();
        let r1 = FeatureTensor::new(1, 1, 1, vec![3.0]).unwrap();
        let r2 = FeatureTensor::new(4, 4, 1, (0..16).map(f64::from).collect()).unwrap();
        let out = fuse_saliency_skip(
            &d3,
            &r1,
            &r2,
            &ResizeProject::identity(1),
            &ResizeProject::identity(1),
        )
        .unwrap();
        // R1 upsamples to a constant 3; R2 downsamples to 2x2 block means
        // (0+1+4+5)/4 = 2.5, 4.5, 10.5, 12.5.
        assert_eq!(out.data(), &[4.0, 12.5, 5.0, 24.5, 6.0, 40.5, 7.0, 52.5]);
    }
}

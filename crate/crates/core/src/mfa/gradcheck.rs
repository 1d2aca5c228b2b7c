//! Central-difference verification of the analytic backward passes.

use super::attention::{attention_backward, neighborhood_attention, AttentionParams};
use super::mixed::{
    loss_and_pattern, mfa_backward, mixed_frequency_attention, preactivations, relu_pattern,
    MfaConfig, MfaParams,
};
use super::tensor::FeatureTensor;
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A scalar-valued function of a flat coordinate vector with an analytic
/// gradient.
pub trait GradTarget {
    fn values(&self) -> Vec<f64>;
    fn set_values(&mut self, values: &[f64]);
    fn loss(&self) -> Result<f64>;
    fn gradient(&self) -> Result<Vec<f64>>;

    /// Signs of every piecewise-linear activation. Coordinates whose
    /// `±eps` probes change this pattern straddle a kink and are skipped.
    fn kink_pattern(&self) -> Result<Option<Vec<bool>>> {
        Ok(None)
    }

    /// Loss and kink pattern together; override when one evaluation can
    /// produce both.
    fn probe(&self) -> Result<(f64, Option<Vec<bool>>)> {
        Ok((self.loss()?, self.kink_pattern()?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// `max |analytic − numeric| / max(1, |analytic|, |numeric|)`
    pub max_rel_error: f64,
    pub worst_index: usize,
    pub checked: usize,
    pub skipped_kinks: usize,
}

impl GradCheckReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_error < tol
    }
}

fn finite(v: f64, index: usize) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(index))
    }
}

pub fn grad_check<T: GradTarget>(target: &mut T, eps: f64) -> Result<GradCheckReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let base = target.values();
    let analytic = target.gradient()?;
    if analytic.len() != base.len() {
        return Err(Error::LengthMismatch {
            expected: base.len(),
            actual: analytic.len(),
        });
    }
    let pattern = target.kink_pattern()?;

    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst_index: 0,
        checked: 0,
        skipped_kinks: 0,
    };
    let mut probe = base.clone();
    for i in 0..base.len() {
        let a = finite(analytic[i], i)?;
        probe[i] = base[i] + eps;
        target.set_values(&probe);
        let (plus, plus_kinks) = target.probe()?;
        let plus = finite(plus, i)?;
        probe[i] = base[i] - eps;
        target.set_values(&probe);
        let (minus, minus_kinks) = target.probe()?;
        let minus = finite(minus, i)?;
        probe[i] = base[i];

        if pattern.is_some() && (plus_kinks != pattern || minus_kinks != pattern) {
            report.skipped_kinks += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * eps);
        let rel = (a - numeric).abs() / 1f64.max(a.abs()).max(numeric.abs());
        report.checked += 1;
        if rel > report.max_rel_error {
            report.max_rel_error = rel;
            report.worst_index = i;
        }
    }
    target.set_values(&base);
    Ok(report)
}

fn unpack(values: &[f64], t: &mut FeatureTensor) -> usize {
    let n = t.data().len();
    t.data_mut().copy_from_slice(&values[..n]);
    n
}

/// Loss `Σ mixed_frequency_attention(F_DE, F_DS)` over inputs and all
/// parameters.
#[derive(Debug, Clone)]
pub struct MfaProblem {
    pub f_de: FeatureTensor,
    pub f_ds: FeatureTensor,
    pub params: MfaParams,
}

impl MfaProblem {
    /// Inputs uniform(−1, 1); every parameter, bias tables included,
    /// uniform(−0.5, 0.5).
    pub fn random(
        size: (usize, usize),
        c_e: usize,
        c_s: usize,
        c_out: usize,
        cfg: &MfaConfig,
        seed: u64,
    ) -> Result<Self> {
        let mut params = MfaParams::init(cfg, c_e, c_s, c_out, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        params.randomize(0.5, &mut rng);
        let f_de = FeatureTensor::random(size.0, size.1, c_e, -1.0, 1.0, &mut rng);
        let f_ds = FeatureTensor::random(size.0, size.1, c_s, -1.0, 1.0, &mut rng);
        Ok(Self { f_de, f_ds, params })
    }
}

impl MfaProblem {
    /// Shifts each output bias so that zero falls in the widest gap of the
    /// middle half of that channel's pre-activations. Both ReLU branches stay
    /// populated while small probes rarely cross a kink.
    pub fn center_relu_gaps(&mut self) -> Result<()> {
        let pre = preactivations(&self.f_de, &self.f_ds, &self.params)?;
        let c_out = self.params.output_depth();
        for o in 0..c_out {
            let mut z: Vec<f64> = pre.iter().skip(o).step_by(c_out).copied().collect();
            z.sort_by(f64::total_cmp);
            let n = z.len();
            if n < 2 {
                continue;
            }
            let (lo, hi) = (n / 4, (3 * n / 4).max(n / 4 + 1).min(n - 1));
            let i = (lo..hi)
                .max_by(|&a, &b| (z[a + 1] - z[a]).total_cmp(&(z[b + 1] - z[b])))
                .unwrap_or(0);
            self.params.proj.bias[o] -= 0.5 * (z[i] + z[i + 1]);
        }
        Ok(())
    }
}

impl GradTarget for MfaProblem {
    fn values(&self) -> Vec<f64> {
        let mut v = self.f_de.data().to_vec();
        v.extend_from_slice(self.f_ds.data());
        v.extend(self.params.values());
        v
    }

    fn set_values(&mut self, values: &[f64]) {
        let mut off = unpack(values, &mut self.f_de);
        off += unpack(&values[off..], &mut self.f_ds);
        for (p, &v) in self.params.values_mut().zip(&values[off..]) {
            *p = v;
        }
    }

    fn loss(&self) -> Result<f64> {
        Ok(
            mixed_frequency_attention(&self.f_de, &self.f_ds, &self.params)?
                .data()
                .iter()
                .sum(),
        )
    }

    fn gradient(&self) -> Result<Vec<f64>> {
        let out = mixed_frequency_attention(&self.f_de, &self.f_ds, &self.params)?;
        let ones = FeatureTensor::new(
            out.height(),
            out.width(),
            out.depth(),
            vec![1.0; out.data().len()],
        )?;
        let g = mfa_backward(&self.f_de, &self.f_ds, &self.params, &ones)?;
        let mut v = g.f_de.into_data();
        v.extend(g.f_ds.into_data());
        v.extend(g.params);
        Ok(v)
    }

    fn kink_pattern(&self) -> Result<Option<Vec<bool>>> {
        relu_pattern(&self.f_de, &self.f_ds, &self.params).map(Some)
    }

    fn probe(&self) -> Result<(f64, Option<Vec<bool>>)> {
        let (loss, pattern) = loss_and_pattern(&self.f_de, &self.f_ds, &self.params)?;
        Ok((loss, Some(pattern)))
    }
}

/// Loss `Σ NA(X, Y)` for a single head; `y = None` means self-attention.
#[derive(Debug, Clone)]
pub struct AttentionProblem {
    pub x: FeatureTensor,
    pub y: Option<FeatureTensor>,
    pub params: AttentionParams,
}

impl AttentionProblem {
    fn y(&self) -> &FeatureTensor {
        self.y.as_ref().unwrap_or(&self.x)
    }

    fn param_slices_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        let p = &mut self.params;
        p.wq.data_mut()
            .iter_mut()
            .chain(p.wk.data_mut().iter_mut())
            .chain(p.wv.data_mut().iter_mut())
            .chain(p.bias.iter_mut())
    }
}

impl GradTarget for AttentionProblem {
    fn values(&self) -> Vec<f64> {
        let mut v = self.x.data().to_vec();
        if let Some(y) = &self.y {
            v.extend_from_slice(y.data());
        }
        let p = &self.params;
        v.extend_from_slice(p.wq.data());
        v.extend_from_slice(p.wk.data());
        v.extend_from_slice(p.wv.data());
        v.extend_from_slice(&p.bias);
        v
    }

    fn set_values(&mut self, values: &[f64]) {
        let mut off = unpack(values, &mut self.x);
        if let Some(y) = &mut self.y {
            off += unpack(&values[off..], y);
        }
        for (p, &v) in self.param_slices_mut().zip(&values[off..]) {
            *p = v;
        }
    }

    fn loss(&self) -> Result<f64> {
        Ok(neighborhood_attention(&self.x, self.y(), &self.params)?
            .data()
            .iter()
            .sum())
    }

    fn gradient(&self) -> Result<Vec<f64>> {
        let out = neighborhood_attention(&self.x, self.y(), &self.params)?;
        let ones = FeatureTensor::new(
            out.height(),
            out.width(),
            out.depth(),
            vec![1.0; out.data().len()],
        )?;
        let g = attention_backward(&self.x, self.y(), &self.params, &ones)?;
        let mut v = g.x.into_data();
        match &self.y {
            Some(_) => v.extend(g.y.into_data()),
            None => v.iter_mut().zip(g.y.data()).for_each(|(a, b)| *a += b),
        }
        v.extend_from_slice(g.wq.data());
        v.extend_from_slice(g.wk.data());
        v.extend_from_slice(g.wv.data());
        v.extend(g.bias);
        Ok(v)
    }
}

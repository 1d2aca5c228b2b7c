use super::{cc, mae, pr_f_measure, roc_auc, s_measure, CurvePoint};
use crate::hsi::Map2D;
use crate::{Error, Result};
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub beta2: f64,
    pub alpha: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            beta2: 0.3,
            alpha: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub mae: f64,
    pub s_measure: f64,
    pub f_beta_max: f64,
    pub auc: f64,
    /// `None` when the prediction is constant.
    pub cc: Option<f64>,
    pub curve: Vec<CurvePoint>,
}

/// All metrics for a prediction in `[0, 1]` against a binary ground truth
/// containing both classes.
pub fn evaluate(s: &Map2D, g: &Map2D, cfg: &EvalConfig) -> Result<MetricReport> {
    if let Some((i, &v)) = s
        .values()
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        return Err(Error::OutOfRange {
            index: i,
            value: v as f64,
        });
    }
    let pr = pr_f_measure(s, g, cfg.beta2)?;
    let roc = roc_auc(s, g)?;
    let cc = match cc(s, g) {
        Ok(v) => Some(v),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MetricReport {
        mae: mae(s, g)?,
        s_measure: s_measure(s, g, cfg.alpha)?,
        f_beta_max: pr.f_beta_max,
        auc: roc.auc,
        cc,
        curve: pr.curve,
    })
}

impl MetricReport {
    /// Flat `key=value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let cc = self
            .cc
            .map_or("undefined".to_string(), |v| format!("{v:.6}"));
        writeln!(out, "mae={:.6}", self.mae).unwrap();
        writeln!(out, "s_measure={:.6}", self.s_measure).unwrap();
        writeln!(out, "f_beta_max={:.6}", self.f_beta_max).unwrap();
        writeln!(out, "auc={:.6}", self.auc).unwrap();
        writeln!(out, "cc={cc}").unwrap();
        out
    }

    /// One row per threshold: `threshold,precision,recall,tpr,fpr`.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("threshold,precision,recall,tpr,fpr\n");
        for p in &self.curve {
            writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{:.6}",
                p.threshold, p.precision, p.recall, p.tpr, p.fpr
            )
            .unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_keys_and_csv_rows() {
        let g = Map2D::binary(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let s = Map2D::normalized(2, 2, vec![0.9, 0.2, 0.4, 0.7]).unwrap();
        let r = evaluate(&s, &g, &EvalConfig::default()).unwrap();
        let text = r.to_text();
        for key in ["mae=", "s_measure=", "f_beta_max=", "auc=", "cc="] {
            assert!(text.lines().any(|l| l.starts_with(key)), "{key}");
        }
        assert_eq!(r.curve_csv().lines().count(), 257);
        assert_eq!(r.auc, 1.0);
    }

    #[test]
    fn constant_prediction_has_undefined_cc() {
        let g = Map2D::binary(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let s = Map2D::normalized(2, 2, vec![0.5; 4]).unwrap();
        let r = evaluate(&s, &g, &EvalConfig::default()).unwrap();
        assert_eq!(r.cc, None);
        assert!(r.to_text().contains("cc=undefined"));
        let raw = Map2D::raw(2, 2, vec![2.0; 4]).unwrap();
        assert!(evaluate(&raw, &g, &EvalConfig::default()).is_err());
    }
}

//! Saliency evaluation metrics and training losses.

mod loss;
mod metrics;
mod report;
mod smeasure;

pub use loss::{bce_loss, hybrid_loss, iou_loss, HybridLoss, Reduction, BCE_EPS};
pub use metrics::{
    cc, mae, pr_f_measure, quantize255, roc_auc, threshold_sweep, CurvePoint, PrResult, RocPoint,
    RocResult, THRESHOLDS,
};
pub use report::{evaluate, EvalConfig, MetricReport};
pub use smeasure::{s_measure, s_object, s_region};

use crate::hsi::Map2D;
use crate::{Error, Result};

pub(crate) fn check_dims(a: &Map2D, b: &Map2D) -> Result<()> {
    if a.same_dims(b) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )))
    }
}

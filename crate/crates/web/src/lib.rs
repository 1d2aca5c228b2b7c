//! Browser bindings: build a synthetic scene, then look at its saliency
//! maps, spectral edges at a chosen window size, and the resulting metrics.

use hsod::eval::{evaluate, roc_auc, EvalConfig};
use hsod::hsi::normalize_map;
use hsod::hsi::synth::{orthogonal_pair, synth_scene, Scene, Shape};
use hsod::seo::spectral_edge;
use hsod::ssg::{run_ssg, SaliencyMap, SsgConfig};
use hsod::Map2D;
use wasm_bindgen::prelude::*;

fn js_err(e: hsod::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Grayscale RGBA bytes for an `ImageData`; raw maps are min-max scaled.
fn rgba(map: &Map2D) -> Vec<u8> {
    let shown = normalize_map(map);
    shown
        .values()
        .iter()
        .flat_map(|&v| {
            let g = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
            [g, g, g, 255]
        })
        .collect()
}

#[wasm_bindgen]
pub struct Demo {
    scene: Scene,
    saliency: Vec<SaliencyMap>,
}

#[wasm_bindgen]
impl Demo {
    /// A `size × size` disk scene with orthogonal object/background spectra.
    /// `size` must be at least 128 for the default eight-layer pyramid.
    #[wasm_bindgen(constructor)]
    pub fn new(
        size: usize,
        channels: usize,
        radius: f64,
        noise: f64,
        seed: u64,
    ) -> Result<Demo, JsError> {
        if channels < 2 {
            return Err(JsError::new("need at least two bands"));
        }
        let (fg, bg) = orthogonal_pair(channels);
        let shape = Shape::centered_disk(size, size, radius);
        let scene = synth_scene(size, size, shape, &fg, &bg, noise, seed).map_err(js_err)?;
        let saliency = run_ssg(&scene.cube, &SsgConfig::default()).map_err(js_err)?;
        Ok(Demo { scene, saliency })
    }

    pub fn size(&self) -> usize {
        self.scene.cube.width()
    }

    pub fn saliency_count(&self) -> usize {
        self.saliency.len()
    }

    pub fn ground_truth_rgba(&self) -> Vec<u8> {
        rgba(&self.scene.ground_truth)
    }

    pub fn saliency_rgba(&self, index: usize) -> Result<Vec<u8>, JsError> {
        let m = self
            .saliency
            .get(index)
            .ok_or_else(|| JsError::new("no such saliency map"))?;
        Ok(rgba(&m.map))
    }

    /// Spectral edge map for an odd window size in {3, 5, 7}.
    pub fn edge_rgba(&self, k: usize) -> Result<Vec<u8>, JsError> {
        Ok(rgba(&spectral_edge(&self.scene.cube, k).map_err(js_err)?))
    }

    /// `key=value` metric report of saliency map `index` against the ground
    /// truth.
    pub fn metrics(&self, index: usize) -> Result<String, JsError> {
        let m = self
            .saliency
            .get(index)
            .ok_or_else(|| JsError::new("no such saliency map"))?;
        let report = evaluate(
            &normalize_map(&m.map),
            &self.scene.ground_truth,
            &EvalConfig::default(),
        )
        .map_err(js_err)?;
        Ok(report.to_text())
    }

    /// ROC curve as a flat `[fpr0, tpr0, fpr1, tpr1, …]` array.
    pub fn roc(&self, index: usize) -> Result<Vec<f64>, JsError> {
        let m = self
            .saliency
            .get(index)
            .ok_or_else(|| JsError::new("no such saliency map"))?;
        let r = roc_auc(&normalize_map(&m.map), &self.scene.ground_truth).map_err(js_err)?;
        Ok(r.curve.iter().flat_map(|p| [p.fpr, p.tpr]).collect())
    }
}

//! False-color rendering.

use super::{normalize_map, HyperCube, Map2D};

pub const RED_NM: f32 = 650.0;
pub const GREEN_NM: f32 = 550.0;
pub const BLUE_NM: f32 = 450.0;

fn nearest_band(wavelengths: &[f32], target: f32) -> usize {
    wavelengths
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - target)
                .abs()
                .partial_cmp(&(b.1 - target).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap()
}

/// Band indices used for the R, G and B planes.
///
/// With a wavelength table these are the bands nearest 650/550/450 nm;
/// otherwise bands at 75%, 50% and 25% of the band axis.
pub fn false_color_bands(cube: &HyperCube) -> [usize; 3] {
    match cube.wavelengths() {
        Some(wl) => [RED_NM, GREEN_NM, BLUE_NM].map(|t| nearest_band(wl, t)),
        None => {
            let last = (cube.channels() - 1) as f64;
            [0.75, 0.5, 0.25].map(|f| (f * last).round() as usize)
        }
    }
}

/// Renders min-max normalized R, G, B planes.
pub fn render_false_color(cube: &HyperCube) -> [Map2D; 3] {
    false_color_bands(cube).map(|b| {
        let raw = Map2D::raw(cube.height(), cube.width(), cube.band(b).to_vec())
            .expect("band plane has map dims");
        normalize_map(&raw)
    })
}

/// Rec. 601 luma of normalized R, G, B planes.
pub fn luma(rgb: &[Map2D; 3]) -> Vec<f64> {
    let [r, g, b] = rgb;
    r.values()
        .iter()
        .zip(g.values())
        .zip(b.values())
        .map(|((&r, &g), &b)| 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64)
        .collect()
}

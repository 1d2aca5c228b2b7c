//! Hyperspectral cube and 2-D map data model.

pub mod codec;
mod cube;
mod map;
pub mod render;
pub mod resample;
pub mod synth;

pub use cube::{HyperCube, SpectralVector};
pub use map::{normalize_map, Map2D, MapKind};

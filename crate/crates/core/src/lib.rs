//! Spectrum-driven salient object detection building blocks for hyperspectral
//! cubes.
//!
//! The crate is organized around the stages of the pipeline:
//!
//! - [`hsi`] – the cube and map data model, file codecs, resampling,
//!   false-color rendering and synthetic scenes.
//! - [`ssg`] – spectral saliency maps from center-surround comparisons across
//!   a Gaussian pyramid, using the spectral angular distance.
//! - [`seo`] – spectral edge maps from gradients of local spectral-angle
//!   neighborhoods, plus edge ground-truth synthesis.
//! - [`mfa`] – a small mixed-frequency neighborhood attention bottleneck with
//!   an analytic backward pass and a finite-difference checker.
//! - [`eval`] – saliency metrics (MAE, S-measure, PR/F-measure, ROC/AUC, CC)
//!   and the training losses.
//!
//! All operators are pure. Internally they parallelize over rows with
//! [`rayon`]; every output element depends only on the inputs, so results are
//! bit-identical for any worker count. Use [`par::with_threads`] to pin the
//! pool size.

pub mod config;
pub mod error;
pub mod eval;
pub mod hsi;
pub mod mfa;
pub mod par;
pub mod seo;
pub mod ssg;

pub use error::{Error, Result};
pub use hsi::{HyperCube, Map2D, MapKind};

//! Mixed-frequency neighborhood attention at toy scale.
//!
//! A saliency feature is split channel-wise into two groups. The first group
//! supplies keys and values for a cross-attention head queried by the edge
//! feature (high-frequency head, wide window); the second attends to itself
//! (low-frequency head, narrower window). The two head outputs are
//! concatenated, projected per pixel and passed through ReLU.
//!
//! Everything is evaluated in `f64` and has a hand-written backward pass,
//! verified against central differences by [`gradcheck`].

mod attention;
pub mod bundle;
mod fusion;
pub mod gradcheck;
mod mixed;
mod tensor;

pub use attention::{
    attention_backward, attention_weights, neighborhood_attention, window_start, AttentionGrads,
    AttentionParams, Normalizer,
};
pub use fusion::{fuse_edge_skip, fuse_saliency_skip, ResizeProject};
pub use mixed::{
    mfa_backward, mixed_frequency_attention, split_channels, MfaConfig, MfaGrads, MfaParams,
    OutputProjection,
};
pub use tensor::{FeatureTensor, Matrix};

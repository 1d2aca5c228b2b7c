use super::attention::{backward_cached, forward_cached, AttentionParams, Normalizer};
use super::tensor::{FeatureTensor, Matrix};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct MfaConfig {
    pub k_high: usize,
    pub k_low: usize,
    /// Only single-head attention is implemented.
    pub heads: usize,
    pub normalizer: Normalizer,
}

impl Default for MfaConfig {
    fn default() -> Self {
        Self {
            k_high: 13,
            k_low: 9,
            heads: 1,
            normalizer: Normalizer::Sigmoid,
        }
    }
}

/// Per-pixel `1 × 1` projection applied to the concatenated head outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputProjection {
    /// `(d_high + d_low) × C_out`
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MfaParams {
    pub high: AttentionParams,
    pub low: AttentionParams,
    pub proj: OutputProjection,
}

impl MfaParams {
    /// Seeded initialization for an edge feature of depth `c_e` and a
    /// saliency feature of depth `c_s`. Head dimensions equal the saliency
    /// group depths.
    pub fn init(cfg: &MfaConfig, c_e: usize, c_s: usize, c_out: usize, seed: u64) -> Result<Self> {
        if cfg.heads != 1 {
            return Err(Error::InvalidArgument(format!(
                "only single-head attention is supported, got {}",
                cfg.heads
            )));
        }
        if c_s < 2 || c_e == 0 || c_out == 0 {
            return Err(Error::InvalidArgument(format!(
                "need C_S ≥ 2, C_E ≥ 1 and C_out ≥ 1 (got {c_s}, {c_e}, {c_out})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g1, g2) = (c_s / 2, c_s - c_s / 2);
        let high = AttentionParams::init(c_e, g1, g1, cfg.k_high, cfg.normalizer, &mut rng);
        let low = AttentionParams::init(g2, g2, g2, cfg.k_low, cfg.normalizer, &mut rng);
        let proj = OutputProjection {
            weight: Matrix::random(g1 + g2, c_out, -0.1, 0.1, &mut rng),
            bias: vec![0.0; c_out],
        };
        Ok(Self { high, low, proj })
    }

    /// Replaces every parameter, including the bias tables, with draws from
    /// uniform(−`scale`, `scale`).
    pub fn randomize(&mut self, scale: f64, rng: &mut impl Rng) {
        for v in self.values_mut() {
            *v = rng.random_range(-scale..scale);
        }
    }

    /// All scalar parameters in a fixed order: high head (Wq, Wk, Wv, B),
    /// low head, projection weight, projection bias.
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for head in [&self.high, &self.low] {
            out.extend_from_slice(head.wq.data());
            out.extend_from_slice(head.wk.data());
            out.extend_from_slice(head.wv.data());
            out.extend_from_slice(&head.bias);
        }
        out.extend_from_slice(self.proj.weight.data());
        out.extend_from_slice(&self.proj.bias);
        out
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        let [high, low] = [&mut self.high, &mut self.low].map(|h| {
            h.wq.data_mut()
                .iter_mut()
                .chain(h.wk.data_mut().iter_mut())
                .chain(h.wv.data_mut().iter_mut())
                .chain(h.bias.iter_mut())
        });
        high.chain(low)
            .chain(self.proj.weight.data_mut().iter_mut())
            .chain(self.proj.bias.iter_mut())
    }

    pub fn num_values(&self) -> usize {
        self.values().len()
    }

    pub fn output_depth(&self) -> usize {
        self.proj.weight.cols()
    }
}

/// `G1 = channels [0, ⌊C/2⌋)`, `G2 = channels [⌊C/2⌋, C)`.
pub fn split_channels(f_ds: &FeatureTensor) -> Result<(FeatureTensor, FeatureTensor)> {
    let c = f_ds.depth();
    if c < 2 {
        return Err(Error::InvalidArgument(format!(
            "cannot split a depth-{c} feature into two groups"
        )));
    }
    Ok((f_ds.channels(0, c / 2)?, f_ds.channels(c / 2, c)?))
}

struct Forward {
    g1: FeatureTensor,
    g2: FeatureTensor,
    high_out: FeatureTensor,
    high_cache: super::attention::AttentionCache,
    low_cache: super::attention::AttentionCache,
    concat: FeatureTensor,
    pre: Vec<f64>,
    out: FeatureTensor,
}

fn forward(f_de: &FeatureTensor, f_ds: &FeatureTensor, params: &MfaParams) -> Result<Forward> {
    if !f_de.same_spatial(f_ds) {
        return Err(Error::DimensionMismatch(format!(
            "edge feature {}x{} vs saliency feature {}x{}",
            f_de.height(),
            f_de.width(),
            f_ds.height(),
            f_ds.width()
        )));
    }
    let (g1, g2) = split_channels(f_ds)?;
    let (high_out, high_cache) = forward_cached(f_de, &g1, &params.high)?;
    let (low_out, low_cache) = forward_cached(&g2, &g2, &params.low)?;
    let concat = high_out.concat_depth(&low_out)?;

    let proj = &params.proj;
    let c_out = proj.weight.cols();
    if proj.weight.rows() != concat.depth() || proj.bias.len() != c_out {
        return Err(Error::DimensionMismatch(format!(
            "projection is {}x{} with {} biases, head outputs have depth {}",
            proj.weight.rows(),
            c_out,
            proj.bias.len(),
            concat.depth()
        )));
    }
    let (h, w) = (f_ds.height(), f_ds.width());
    let mut pre = vec![0.0; h * w * c_out];
    for (z, x) in pre
        .chunks_exact_mut(c_out)
        .zip(concat.data().chunks_exact(concat.depth()))
    {
        proj.weight.left_mul_into(x, z);
        for (zc, b) in z.iter_mut().zip(&proj.bias) {
            *zc += b;
        }
    }
    let out = FeatureTensor::new(h, w, c_out, pre.iter().map(|&z| z.max(0.0)).collect())?;
    Ok(Forward {
        g1,
        g2,
        high_out,
        high_cache,
        low_cache,
        concat,
        pre,
        out,
    })
}

/// `ReLU(proj([NA(F_DE, G1), NA(G2, G2)]))`, output `h × w × C_out`.
pub fn mixed_frequency_attention(
    f_de: &FeatureTensor,
    f_ds: &FeatureTensor,
    params: &MfaParams,
) -> Result<FeatureTensor> {
    forward(f_de, f_ds, params).map(|f| f.out)
}

/// Output-projection pre-activations, pixel-major like the output.
pub(crate) fn preactivations(
    f_de: &FeatureTensor,
    f_ds: &FeatureTensor,
    params: &MfaParams,
) -> Result<Vec<f64>> {
    forward(f_de, f_ds, params).map(|f| f.pre)
}

/// Pre-activation signs of the output projection; a change in this pattern
/// marks a ReLU kink between two evaluations.
pub(crate) fn relu_pattern(
    f_de: &FeatureTensor,
    f_ds: &FeatureTensor,
    params: &MfaParams,
) -> Result<Vec<bool>> {
    forward(f_de, f_ds, params).map(|f| f.pre.iter().map(|&z| z > 0.0).collect())
}

/// `Σ output` and the pre-activation sign pattern from one forward pass.
pub(crate) fn loss_and_pattern(
    f_de: &FeatureTensor,
    f_ds: &FeatureTensor,
    params: &MfaParams,
) -> Result<(f64, Vec<bool>)> {
    let f = forward(f_de, f_ds, params)?;
    Ok((
        f.out.data().iter().sum(),
        f.pre.iter().map(|&z| z > 0.0).collect(),
    ))
}

#[derive(Debug, Clone)]
pub struct MfaGrads {
    pub f_de: FeatureTensor,
    pub f_ds: FeatureTensor,
    /// Same layout as [`MfaParams::values`].
    pub params: Vec<f64>,
}

/// Gradients of `Σ grad_out ⊙ output` with respect to both inputs and every
/// parameter.
pub fn mfa_backward(
    f_de: &FeatureTensor,
    f_ds: &FeatureTensor,
    params: &MfaParams,
    grad_out: &FeatureTensor,
) -> Result<MfaGrads> {
    let fw = forward(f_de, f_ds, params)?;
    if grad_out.data().len() != fw.out.data().len() || !grad_out.same_spatial(&fw.out) {
        return Err(Error::DimensionMismatch("upstream gradient shape".into()));
    }
    let c_out = fw.out.depth();
    let cat_depth = fw.concat.depth();
    let proj = &params.proj;

    let mut g_weight = Matrix::zeros(cat_depth, c_out);
    let mut g_bias = vec![0.0; c_out];
    let mut g_cat = FeatureTensor::zeros(fw.concat.height(), fw.concat.width(), cat_depth);
    let mut gz = vec![0.0; c_out];
    for ((z, go), (x, gc)) in fw
        .pre
        .chunks_exact(c_out)
        .zip(grad_out.data().chunks_exact(c_out))
        .zip(
            fw.concat
                .data()
                .chunks_exact(cat_depth)
                .zip(g_cat.data_mut().chunks_exact_mut(cat_depth)),
        )
    {
        for c in 0..c_out {
            gz[c] = if z[c] > 0.0 { go[c] } else { 0.0 };
            g_bias[c] += gz[c];
        }
        g_weight.add_outer(x, &gz);
        proj.weight.add_mul_transpose(&gz, gc);
    }

    let d_high = fw.high_out.depth();
    let g_high = g_cat.channels(0, d_high)?;
    let g_low = g_cat.channels(d_high, cat_depth)?;
    let hg = backward_cached(f_de, &fw.g1, &params.high, &fw.high_cache, &g_high);
    let lg = backward_cached(&fw.g2, &fw.g2, &params.low, &fw.low_cache, &g_low);

    let mut g_g2 = lg.x.clone();
    g_g2.add_assign(&lg.y);
    let g_ds = hg.y.concat_depth(&g_g2)?;

    let mut pvals = Vec::with_capacity(params.num_values());
    for g in [&hg, &lg] {
        pvals.extend_from_slice(g.wq.data());
        pvals.extend_from_slice(g.wk.data());
        pvals.extend_from_slice(g.wv.data());
        pvals.extend_from_slice(&g.bias);
    }
    pvals.extend_from_slice(g_weight.data());
    pvals.extend_from_slice(&g_bias);
    Ok(MfaGrads {
        f_de: hg.x,
        f_ds: g_ds,
        params: pvals,
    })
}

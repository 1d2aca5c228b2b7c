//! Plain `key=value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are
//! rejected. [`RunConfig::to_text`] emits every key, and parsing that text
//! yields the same configuration.

use crate::eval::EvalConfig;
use crate::mfa::{MfaConfig, Normalizer};
use crate::seo::SeoConfig;
use crate::ssg::SsgConfig;
use crate::{Error, Result};
use std::fmt::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub ssg_num_layers: usize,
    pub ssg_centers: Vec<usize>,
    pub ssg_offset: usize,
    pub seo_kernel_sizes: Vec<usize>,
    pub attn_k_high: usize,
    pub attn_k_low: usize,
    pub attn_normalizer: Normalizer,
    pub attn_seed: u64,
    pub eval_beta2: f64,
    pub eval_alpha: f64,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ssg = SsgConfig::default();
        let mfa = MfaConfig::default();
        let eval = EvalConfig::default();
        Self {
            input: None,
            output: None,
            ssg_num_layers: ssg.num_layers,
            ssg_centers: ssg.center_indices,
            ssg_offset: ssg.surround_offset,
            seo_kernel_sizes: SeoConfig::default().kernel_sizes,
            attn_k_high: mfa.k_high,
            attn_k_low: mfa.k_low,
            attn_normalizer: mfa.normalizer,
            attn_seed: 0,
            eval_beta2: eval.beta2,
            eval_alpha: eval.alpha,
            threads: 1,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<usize>> {
    v.split(',').map(|s| parse_num(key, s.trim())).collect()
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub const KEYS: [&'static str; 13] = [
        "input",
        "output",
        "ssg.num_layers",
        "ssg.centers",
        "ssg.offset",
        "seo.kernel_sizes",
        "attn.k_high",
        "attn.k_low",
        "attn.normalizer",
        "attn.seed",
        "eval.beta2",
        "eval.alpha",
        "threads",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "input" => self.input = (!v.is_empty()).then(|| PathBuf::from(v)),
            "output" => self.output = (!v.is_empty()).then(|| PathBuf::from(v)),
            "ssg.num_layers" => self.ssg_num_layers = parse_num(key, v)?,
            "ssg.centers" => self.ssg_centers = parse_list(key, v)?,
            "ssg.offset" => self.ssg_offset = parse_num(key, v)?,
            "seo.kernel_sizes" => self.seo_kernel_sizes = parse_list(key, v)?,
            "attn.k_high" => self.attn_k_high = parse_num(key, v)?,
            "attn.k_low" => self.attn_k_low = parse_num(key, v)?,
            "attn.normalizer" => {
                self.attn_normalizer = v.parse().map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "attn.seed" => self.attn_seed = parse_num(key, v)?,
            "eval.beta2" => self.eval_beta2 = parse_num(key, v)?,
            "eval.alpha" => self.eval_alpha = parse_num(key, v)?,
            "threads" => self.threads = parse_num(key, v)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map_or(String::new(), |p| p.display().to_string())
        };
        let mut out = String::new();
        writeln!(out, "input={}", path(&self.input)).unwrap();
        writeln!(out, "output={}", path(&self.output)).unwrap();
        writeln!(out, "ssg.num_layers={}", self.ssg_num_layers).unwrap();
        writeln!(out, "ssg.centers={}", join(&self.ssg_centers)).unwrap();
        writeln!(out, "ssg.offset={}", self.ssg_offset).unwrap();
        writeln!(out, "seo.kernel_sizes={}", join(&self.seo_kernel_sizes)).unwrap();
        writeln!(out, "attn.k_high={}", self.attn_k_high).unwrap();
        writeln!(out, "attn.k_low={}", self.attn_k_low).unwrap();
        writeln!(out, "attn.normalizer={}", self.attn_normalizer.name()).unwrap();
        writeln!(out, "attn.seed={}", self.attn_seed).unwrap();
        // `{:?}` prints the shortest string that parses back to the same f64
        writeln!(out, "eval.beta2={:?}", self.eval_beta2).unwrap();
        writeln!(out, "eval.alpha={:?}", self.eval_alpha).unwrap();
        writeln!(out, "threads={}", self.threads).unwrap();
        out
    }

    pub fn ssg(&self) -> SsgConfig {
        SsgConfig {
            num_layers: self.ssg_num_layers,
            center_indices: self.ssg_centers.clone(),
            surround_offset: self.ssg_offset,
            ..SsgConfig::default()
        }
    }

    pub fn seo(&self) -> SeoConfig {
        SeoConfig {
            kernel_sizes: self.seo_kernel_sizes.clone(),
        }
    }

    pub fn mfa(&self) -> MfaConfig {
        MfaConfig {
            k_high: self.attn_k_high,
            k_low: self.attn_k_low,
            normalizer: self.attn_normalizer,
            ..MfaConfig::default()
        }
    }

    pub fn eval(&self) -> EvalConfig {
        EvalConfig {
            beta2: self.eval_beta2,
            alpha: self.eval_alpha,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.ssg_num_layers, 8);
        assert_eq!(c.ssg_centers, vec![2, 3, 4]);
        assert_eq!(c.ssg_offset, 3);
        assert_eq!(c.seo_kernel_sizes, vec![3, 5, 7]);
        assert_eq!((c.attn_k_high, c.attn_k_low), (13, 9));
        assert_eq!((c.eval_beta2, c.eval_alpha), (0.3, 0.5));
    }

    #[test]
    fn parse_and_reject() {
        let c = RunConfig::parse(
            "# comment\nssg.centers = 1, 2\nattn.normalizer=softmax\n\nthreads=4\n",
        )
        .unwrap();
        assert_eq!(c.ssg_centers, vec![1, 2]);
        assert_eq!(c.attn_normalizer, Normalizer::Softmax);
        assert_eq!(c.threads, 4);
        assert!(RunConfig::parse("bogus=1").is_err());
        assert!(RunConfig::parse("threads").is_err());
        assert!(RunConfig::parse("threads=x").is_err());
    }

    #[test]
    fn emitted_text_round_trips() {
        let c = RunConfig {
            input: Some("cube.hsc".into()),
            eval_beta2: 0.1 + 0.2,
            seo_kernel_sizes: vec![7],
            ..RunConfig::default()
        };
        let text = c.to_text();
        assert_eq!(text.lines().count(), RunConfig::KEYS.len());
        assert_eq!(RunConfig::parse(&text).unwrap(), c);
    }
}

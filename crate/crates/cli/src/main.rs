use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hsod::config::RunConfig;

mod cmd;
mod io;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl From<hsod::Error> for CliError {
    fn from(e: hsod::Error) -> Self {
        match e {
            hsod::Error::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "hsod",
    version,
    about = "Spectral saliency, spectral edges, attention checks and saliency metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand. Precedence: flags, then `THREADS`,
/// then the config file, then built-in defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the effective configuration to this file
    #[arg(long)]
    write_config: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_name = "N")]
    layers: Option<usize>,
    /// Pyramid center layers, comma separated
    #[arg(long)]
    centers: Option<String>,
    /// Surround offset
    #[arg(long)]
    offset: Option<usize>,
    /// SEO kernel sizes, comma separated
    #[arg(long)]
    kernel_sizes: Option<String>,
    #[arg(long)]
    k_high: Option<usize>,
    #[arg(long)]
    k_low: Option<usize>,
    /// sigmoid or softmax
    #[arg(long)]
    normalizer: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    beta2: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert between cube, map, PGM and raw interleaved float files
    Convert(cmd::ConvertArgs),
    /// Write a synthetic fixture cube and its ground truth
    Synth(cmd::SynthArgs),
    /// Spectral saliency maps I_S_1..I_S_n
    Ssg(cmd::IoArgs),
    /// Spectral edge maps, one per kernel size
    Seo(cmd::IoArgs),
    /// Binary edge ground truth from a cube
    EdgeGt(cmd::EdgeGtArgs),
    /// Run mixed-frequency attention on stored or random features
    Attn(cmd::AttnArgs),
    /// Check analytic attention gradients against finite differences
    Gradcheck(cmd::GradcheckArgs),
    /// Saliency metrics of a prediction against a ground truth
    Eval(cmd::EvalArgs),
    /// Time SSG and SEO across thread counts
    Bench(cmd::BenchArgs),
}

impl Common {
    fn resolve(
        &self,
        input: Option<&PathBuf>,
        output: Option<&PathBuf>,
    ) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        if let Ok(t) = std::env::var("THREADS") {
            cfg.set("threads", &t)?;
        }
        let path = |p: Option<&PathBuf>| p.map(|p| p.display().to_string());
        let overrides = [
            ("input", path(input)),
            ("output", path(output)),
            ("threads", self.threads.map(|v| v.to_string())),
            ("ssg.num_layers", self.layers.map(|v| v.to_string())),
            ("ssg.centers", self.centers.clone()),
            ("ssg.offset", self.offset.map(|v| v.to_string())),
            ("seo.kernel_sizes", self.kernel_sizes.clone()),
            ("attn.k_high", self.k_high.map(|v| v.to_string())),
            ("attn.k_low", self.k_low.map(|v| v.to_string())),
            ("attn.normalizer", self.normalizer.clone()),
            ("attn.seed", self.seed.map(|v| v.to_string())),
            ("eval.beta2", self.beta2.map(|v| v.to_string())),
            ("eval.alpha", self.alpha.map(|v| v.to_string())),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        if cfg.threads == 0 {
            return Err(CliError::Usage("threads must be ≥ 1".into()));
        }
        if let Some(path) = &self.write_config {
            io::write(path, cfg.to_text().as_bytes())?;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Convert(a) => cmd::convert(a),
        Command::Synth(a) => cmd::synth(a),
        Command::Ssg(a) => cmd::ssg(a),
        Command::Seo(a) => cmd::seo(a),
        Command::EdgeGt(a) => cmd::edge_gt(a),
        Command::Attn(a) => cmd::attn(a),
        Command::Gradcheck(a) => cmd::gradcheck(a),
        Command::Eval(a) => cmd::eval(a),
        Command::Bench(a) => cmd::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hsod: {e}");
            match e {
                CliError::Usage(_) => ExitCode::from(1),
                CliError::Data(_) => ExitCode::from(2),
            }
        }
    }
}

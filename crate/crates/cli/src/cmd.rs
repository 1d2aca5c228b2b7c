//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use hsod::config::RunConfig;
use hsod::eval::evaluate;
use hsod::hsi::render::{luma, render_false_color};
use hsod::hsi::synth::{orthogonal_pair, synth_scene, Shape};
use hsod::hsi::{codec, normalize_map};
use hsod::mfa::bundle::{
    self, named_to_tensor, params_from_bundle, params_to_bundle, tensor_to_named,
};
use hsod::mfa::gradcheck::{grad_check, MfaProblem};
use hsod::mfa::{mixed_frequency_attention, FeatureTensor, MfaParams};
use hsod::seo::{edge_ground_truth_from_cube, run_seo, EDGE_GT_DETECTOR};
use hsod::ssg::run_ssg;
use hsod::{par, HyperCube, Map2D, MapKind};
use rand::SeedableRng;

use crate::{io, CliError, Common};

fn ext(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

fn threaded<T: Send>(cfg: &RunConfig, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    Ok(par::with_threads(cfg.threads, f)?)
}

fn required(p: Option<PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
    p.ok_or_else(|| CliError::Usage(format!("missing required flag --{flag}")))
}

// convert -------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct ConvertArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
    /// `H,W,C` of a raw interleaved little-endian f32 input
    #[arg(long)]
    dims: Option<String>,
    /// Threshold a PGM at 0.5 into a binary map
    #[arg(long)]
    binary: bool,
    #[command(flatten)]
    common: Common,
}

fn parse_dims(s: &str) -> Result<(usize, usize, usize), CliError> {
    let v: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--dims expects H,W,C, got {s:?}")))?;
    match v[..] {
        [h, w, c] => Ok((h, w, c)),
        _ => Err(CliError::Usage(format!("--dims expects H,W,C, got {s:?}"))),
    }
}

fn interleaved_bytes(cube: &HyperCube) -> Vec<u8> {
    cube.to_interleaved()
        .iter()
        .flat_map(|v| v.to_le_bytes())
        .collect()
}

fn cube_from_interleaved(
    bytes: &[u8],
    (h, w, c): (usize, usize, usize),
) -> Result<HyperCube, CliError> {
    let n = h * w * c;
    if bytes.len() != 4 * n {
        return Err(CliError::Data(format!(
            "expected {} bytes for {h}x{w}x{c}, found {}",
            4 * n,
            bytes.len()
        )));
    }
    let vals: Vec<f32> = bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    Ok(HyperCube::from_fn(h, w, c, |b, i, j| {
        vals[(i * w + j) * c + b]
    })?)
}

pub fn convert(a: ConvertArgs) -> Result<(), CliError> {
    a.common.resolve(Some(&a.input), Some(&a.output))?;
    let (from, to) = (ext(&a.input), ext(&a.output));
    let bytes: Vec<u8> = match (from.as_str(), to.as_str()) {
        ("hsc", "hsc") => codec::write_cube(&io::read_cube(&a.input)?),
        ("hsc", "bip" | "raw") => interleaved_bytes(&io::read_cube(&a.input)?),
        ("hsc", "pgm") => {
            let cube = io::read_cube(&a.input)?;
            let y = luma(&render_false_color(&cube));
            let map = Map2D::raw(
                cube.height(),
                cube.width(),
                y.iter().map(|&v| v as f32).collect(),
            )?;
            codec::write_pgm16(&normalize_map(&map))?
        }
        ("bip" | "raw", "hsc") => {
            let dims = parse_dims(
                a.dims
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("raw input needs --dims H,W,C".into()))?,
            )?;
            codec::write_cube(&cube_from_interleaved(&io::read(&a.input)?, dims)?)
        }
        ("map" | "pgm", "map" | "pgm") => {
            let mut map = io::read_any_map(&a.input)?;
            if a.binary {
                let v = map
                    .values()
                    .iter()
                    .map(|&x| (x >= 0.5) as u8 as f32)
                    .collect();
                map = Map2D::binary(map.height(), map.width(), v)?;
            }
            if to == "pgm" {
                io::pgm_preview(&map)?
            } else {
                codec::write_map(&map)
            }
        }
        _ => return Err(CliError::Usage(format!("cannot convert .{from} to .{to}"))),
    };
    io::write(&a.output, &bytes)
}

// synth ---------------------------------------------------------------------

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum ShapeKind {
    Disk,
    Rect,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Output cube (.hsc)
    #[arg(long = "out")]
    output: PathBuf,
    /// Output ground truth (.map); a .pgm preview is written next to it
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, default_value_t = 128)]
    height: usize,
    #[arg(long, default_value_t = 128)]
    width: usize,
    #[arg(long, default_value_t = 16)]
    channels: usize,
    #[arg(long, value_enum, default_value_t = ShapeKind::Disk)]
    shape: ShapeKind,
    /// Disk radius; defaults to a quarter of the shorter side
    #[arg(long)]
    radius: Option<f64>,
    /// Standard deviation of additive Gaussian noise
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[command(flatten)]
    common: Common,
}

pub fn synth(a: SynthArgs) -> Result<(), CliError> {
    let cfg = a.common.resolve(None, Some(&a.output))?;
    if a.channels < 2 {
        return Err(CliError::Usage("--channels must be ≥ 2".into()));
    }
    let shape = match a.shape {
        ShapeKind::Disk => {
            let r = a.radius.unwrap_or(a.height.min(a.width) as f64 / 4.0);
            Shape::centered_disk(a.height, a.width, r)
        }
        ShapeKind::Rect => Shape::centered_rect(a.height, a.width),
    };
    let (fg, bg) = orthogonal_pair(a.channels);
    let scene = synth_scene(a.height, a.width, shape, &fg, &bg, a.noise, cfg.attn_seed)?;
    io::write(&a.output, &codec::write_cube(&scene.cube))?;
    io::write(&a.gt, &codec::write_map(&scene.ground_truth))?;
    io::write(
        &io::with_extension(&a.gt, "pgm"),
        &codec::write_pgm16(&scene.ground_truth)?,
    )
}

// ssg / seo -----------------------------------------------------------------

#[derive(Args, Debug)]
pub struct IoArgs {
    /// Input cube (.hsc); falls back to `input` from the config
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output directory; falls back to `output` from the config
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn load_io(a: &IoArgs) -> Result<(RunConfig, HyperCube, PathBuf), CliError> {
    let cfg = a.common.resolve(a.input.as_ref(), a.out_dir.as_ref())?;
    let input = required(cfg.input.clone(), "in")?;
    let out = required(cfg.output.clone(), "out-dir")?;
    let cube = io::read_cube(&input)?;
    io::create_dir(&out)?;
    Ok((cfg, cube, out))
}

pub fn ssg(a: IoArgs) -> Result<(), CliError> {
    let (cfg, cube, out) = load_io(&a)?;
    let ssg_cfg = cfg.ssg();
    let maps = threaded(&cfg, || run_ssg(&cube, &ssg_cfg))??;
    for (n, m) in maps.iter().enumerate() {
        let stem = format!("I_S_{}", n + 1);
        io::write_map_pair(&out, &stem, &m.map)?;
        if m.degenerate_pixels > 0 {
            eprintln!(
                "{stem}: {} zero-norm pixels contributed angle 0",
                m.degenerate_pixels
            );
        }
        println!(
            "{stem} center={} surround={} mean={:.6}",
            m.center,
            m.surround,
            m.map.mean()
        );
    }
    Ok(())
}

pub fn seo(a: IoArgs) -> Result<(), CliError> {
    let (cfg, cube, out) = load_io(&a)?;
    let seo_cfg = cfg.seo();
    let maps = threaded(&cfg, || run_seo(&cube, &seo_cfg))??;
    for (k, m) in seo_cfg.kernel_sizes.iter().zip(&maps) {
        let stem = format!("I_E_{k}");
        io::write_map_pair(&out, &stem, m)?;
        println!("{stem} k={k} mean={:.6}", m.mean());
    }
    Ok(())
}

// edge-gt -------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct EdgeGtArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Output binary edge map (.map); also writes .pgm and .meta next to it
    #[arg(long = "out")]
    output: PathBuf,
    /// Saliency maps to combine; computed from the cube when omitted
    #[arg(long, num_args = 1..)]
    saliency: Vec<PathBuf>,
    #[command(flatten)]
    common: Common,
}

pub fn edge_gt(a: EdgeGtArgs) -> Result<(), CliError> {
    let cfg = a.common.resolve(Some(&a.input), Some(&a.output))?;
    let cube = io::read_cube(&a.input)?;
    let saliency: Vec<Map2D> = if a.saliency.is_empty() {
        let ssg_cfg = cfg.ssg();
        threaded(&cfg, || run_ssg(&cube, &ssg_cfg))??
            .into_iter()
            .map(|m| normalize_map(&m.map))
            .collect()
    } else {
        a.saliency
            .iter()
            .map(|p| io::read_any_map(p))
            .collect::<Result<_, _>>()?
    };
    let edge = edge_ground_truth_from_cube(&cube, &saliency)?;
    io::write(&a.output, &codec::write_map(&edge))?;
    io::write(
        &io::with_extension(&a.output, "pgm"),
        &codec::write_pgm16(&edge)?,
    )?;
    let meta = format!(
        "detector={EDGE_GT_DETECTOR}\nthreshold=0.5\nsaliency_maps={}\nedge_pixels={}\n",
        saliency.len(),
        edge.values().iter().filter(|&&v| v == 1.0).count()
    );
    io::write(&io::with_extension(&a.output, "meta"), meta.as_bytes())
}

// attn ----------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct AttnArgs {
    /// Parameter bundle (MFA1); seeded random parameters when omitted
    #[arg(long)]
    params: Option<PathBuf>,
    /// Feature bundle holding rank-3 tensors `f_de` and `f_ds`
    #[arg(long)]
    features: Option<PathBuf>,
    /// Output bundle holding tensor `out`
    #[arg(long = "out")]
    output: Option<PathBuf>,
    /// Save the parameters actually used
    #[arg(long)]
    save_params: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    height: usize,
    #[arg(long, default_value_t = 16)]
    width: usize,
    #[arg(long, default_value_t = 4)]
    c_e: usize,
    #[arg(long, default_value_t = 8)]
    c_s: usize,
    #[arg(long, default_value_t = 4)]
    c_out: usize,
    #[command(flatten)]
    common: Common,
}

fn bundle_err(path: &Path) -> impl Fn(hsod::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

pub fn attn(a: AttnArgs) -> Result<(), CliError> {
    let cfg = a.common.resolve(a.features.as_ref(), a.output.as_ref())?;
    let (f_de, f_ds) = match &a.features {
        Some(path) => {
            let tensors = bundle::read_bundle(&io::read(path)?).map_err(bundle_err(path))?;
            let get = |name: &str| {
                tensors
                    .iter()
                    .find(|t| t.name == name)
                    .ok_or_else(|| {
                        CliError::Data(format!("{}: no tensor {name:?}", path.display()))
                    })
                    .and_then(|t| named_to_tensor(t).map_err(bundle_err(path)))
            };
            (get("f_de")?, get("f_ds")?)
        }
        None => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.attn_seed);
            (
                FeatureTensor::random(a.height, a.width, a.c_e, -1.0, 1.0, &mut rng),
                FeatureTensor::random(a.height, a.width, a.c_s, -1.0, 1.0, &mut rng),
            )
        }
    };
    let params = match &a.params {
        Some(path) => {
            let tensors = bundle::read_bundle(&io::read(path)?).map_err(bundle_err(path))?;
            params_from_bundle(&tensors).map_err(bundle_err(path))?
        }
        None => {
            // Bundles store f32; round now so a saved bundle reproduces this run.
            let mut p = MfaParams::init(
                &cfg.mfa(),
                f_de.depth(),
                f_ds.depth(),
                a.c_out,
                cfg.attn_seed,
            )?;
            p.values_mut().for_each(|v| *v = *v as f32 as f64);
            p
        }
    };
    let out = threaded(&cfg, || mixed_frequency_attention(&f_de, &f_ds, &params))??;
    if let Some(path) = &a.save_params {
        io::write(path, &bundle::write_bundle(&params_to_bundle(&params))?)?;
    }
    if let Some(path) = &a.output {
        io::write(
            path,
            &bundle::write_bundle(&[tensor_to_named("out", &out)])?,
        )?;
    }
    let d = out.data();
    let (lo, hi) = d
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    println!(
        "out={}x{}x{} min={lo:.6} max={hi:.6} mean={mean:.6} active={:.4}",
        out.height(),
        out.width(),
        out.depth(),
        d.iter().filter(|&&v| v > 0.0).count() as f64 / d.len() as f64
    );
    Ok(())
}

// gradcheck -----------------------------------------------------------------

#[derive(Args, Debug)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Pass threshold on the maximum relative error
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Spatial side of the random instance; defaults to the larger kernel
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, default_value_t = 2)]
    c_e: usize,
    #[arg(long, default_value_t = 4)]
    c_s: usize,
    #[arg(long, default_value_t = 2)]
    c_out: usize,
    #[command(flatten)]
    common: Common,
}

pub fn gradcheck(a: GradcheckArgs) -> Result<(), CliError> {
    let cfg = a.common.resolve(None, None)?;
    let mfa = cfg.mfa();
    let size = a.size.unwrap_or(mfa.k_high.max(mfa.k_low));
    let mut problem = MfaProblem::random((size, size), a.c_e, a.c_s, a.c_out, &mfa, cfg.attn_seed)?;
    problem.center_relu_gaps()?;
    let report = threaded(&cfg, || grad_check(&mut problem, a.eps))??;
    println!(
        "max_rel_error={:e} checked={} skipped_kinks={} normalizer={} k_high={} k_low={}",
        report.max_rel_error,
        report.checked,
        report.skipped_kinks,
        mfa.normalizer.name(),
        mfa.k_high,
        mfa.k_low
    );
    if report.passes(a.tol) {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "gradient check failed: {:e} ≥ {:e} at coordinate {}",
            report.max_rel_error, a.tol, report.worst_index
        )))
    }
}

// eval ----------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Predicted saliency (.map or .pgm); raw maps are min-max normalized
    #[arg(long)]
    pred: PathBuf,
    /// Binary ground truth (.map or .pgm)
    #[arg(long)]
    gt: PathBuf,
    /// Report destination; standard output when omitted
    #[arg(long)]
    report: Option<PathBuf>,
    /// CSV of threshold,precision,recall,tpr,fpr
    #[arg(long)]
    curves: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

pub fn eval(a: EvalArgs) -> Result<(), CliError> {
    let cfg = a.common.resolve(Some(&a.pred), a.report.as_ref())?;
    let mut pred = io::read_any_map(&a.pred)?;
    if pred.kind() == MapKind::Raw {
        eprintln!("{}: raw map, min-max normalizing", a.pred.display());
        pred = normalize_map(&pred);
    }
    let gt = io::read_any_map(&a.gt)?;
    let gt = gt
        .with_kind(MapKind::Binary)
        .map_err(|e| CliError::Data(format!("{}: {e}", a.gt.display())))?;
    let report = evaluate(&pred, &gt, &cfg.eval())?;
    if report.cc.is_none() {
        eprintln!("cc undefined: constant prediction or ground truth");
    }
    match &a.report {
        Some(p) => io::write(p, report.to_text().as_bytes())?,
        None => print!("{}", report.to_text()),
    }
    if let Some(p) = &a.curves {
        io::write(p, report.curve_csv().as_bytes())?;
    }
    Ok(())
}

// bench ---------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Cube to time; a noisy synthetic scene when omitted
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 224)]
    height: usize,
    #[arg(long, default_value_t = 224)]
    width: usize,
    #[arg(long, default_value_t = 50)]
    channels: usize,
    /// Time 1..=T threads
    #[arg(long, default_value_t = 4)]
    max_threads: usize,
    /// CSV destination; standard output when omitted
    #[arg(long = "out")]
    output: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn bits(maps: &[Map2D]) -> Vec<u32> {
    maps.iter()
        .flat_map(|m| m.values().iter().map(|v| v.to_bits()))
        .collect()
}

pub fn bench(a: BenchArgs) -> Result<(), CliError> {
    let cfg = a.common.resolve(a.input.as_ref(), a.output.as_ref())?;
    if a.max_threads == 0 {
        return Err(CliError::Usage("--max-threads must be ≥ 1".into()));
    }
    let cube = match &a.input {
        Some(p) => io::read_cube(p)?,
        None => {
            let (fg, bg) = orthogonal_pair(a.channels.max(2));
            let shape = Shape::centered_disk(a.height, a.width, a.height.min(a.width) as f64 / 4.0);
            synth_scene(a.height, a.width, shape, &fg, &bg, 0.05, cfg.attn_seed)?.cube
        }
    };
    let (ssg_cfg, seo_cfg) = (cfg.ssg(), cfg.seo());
    let mut csv = String::from("op,threads,seconds\n");
    let mut reference: Option<(Vec<u32>, Vec<u32>)> = None;
    for t in 1..=a.max_threads {
        let (ssg_s, ssg_maps) = par::with_threads(t, || {
            let start = Instant::now();
            let r = run_ssg(&cube, &ssg_cfg);
            (start.elapsed().as_secs_f64(), r)
        })?;
        let (seo_s, seo_maps) = par::with_threads(t, || {
            let start = Instant::now();
            let r = run_seo(&cube, &seo_cfg);
            (start.elapsed().as_secs_f64(), r)
        })?;
        let ssg_bits = bits(&ssg_maps?.into_iter().map(|m| m.map).collect::<Vec<_>>());
        let seo_bits = bits(&seo_maps?);
        writeln!(csv, "ssg,{t},{ssg_s:.6}").unwrap();
        writeln!(csv, "seo,{t},{seo_s:.6}").unwrap();
        match &reference {
            None => reference = Some((ssg_bits, seo_bits)),
            Some((r_ssg, r_seo)) => {
                if *r_ssg != ssg_bits || *r_seo != seo_bits {
                    return Err(CliError::Data(format!(
                        "outputs at {t} threads differ from 1 thread"
                    )));
                }
            }
        }
    }
    match &a.output {
        Some(p) => io::write(p, csv.as_bytes()),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

//! `gensamp` command line: scheme generation, sample synthesis, reconstruction,
//! experiments, stable sampling rate scans and standalone wavelet transforms.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gensamp::experiments::{
    gs_l1_reconstruct, gs_reconstruct, run_experiment, write_report, ExperimentConfig, ExperimentId, PipelineOptions,
};
use gensamp::harness::{add_noise, l2_error, synthesize_samples, TestFunction};
use gensamp::io::{
    read_coefficients, read_samples, read_scheme, write_coefficients, write_pgm, write_raster_1d, write_samples,
    write_scheme, CoefficientHeader,
};
use gensamp::sampling::{
    jittered_count, make_equispaced_1d, make_jittered_1d, make_log_1d, make_radial_2d, make_spiral_2d,
    make_uniform_2d, SamplingScheme,
};
use gensamp::solvers::stable_sampling_rate_scan;
use gensamp::wavelet::{Layout, WaveletSystem};
use gensamp::{baselines, Error};

#[derive(Parser)]
#[command(name = "gensamp", version, about = "Generalized sampling: wavelet coefficients from Fourier samples")]
struct Cli {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log verbosity (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a sampling scheme (CSV `omega_1[,omega_2],weight` + JSON sidecar).
    Scheme(SchemeArgs),
    /// Sample the Fourier transform of a test function on a scheme.
    Synth(SynthArgs),
    /// Recover coefficients (gs, gs-l1) or a direct reconstruction (tfs, gridding).
    Reconstruct(ReconstructArgs),
    /// Run a numerical experiment and write its summary CSV and rasters.
    Experiment(ExperimentArgs),
    /// Stable sampling rate scan for uniform or jittered sampling.
    Ssr(SsrArgs),
    /// Forward or inverse wavelet transform of a coefficient file.
    Transform(TransformArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeKindArg {
    Uniform,
    Jittered,
    Log,
    Uniform2d,
    Radial,
    Spiral,
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(value_enum)]
    kind: SchemeKindArg,
    /// Grid spacing ε.
    #[arg(long)]
    eps: Option<f64>,
    /// Jitter θ as a fraction of ε.
    #[arg(long)]
    jitter: Option<f64>,
    /// Sampling bandwidth K.
    #[arg(long = "K")]
    k: Option<f64>,
    /// Number of points (per axis for uniform2d).
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Target density δ (log scheme).
    #[arg(long)]
    delta: Option<f64>,
    /// Number of lines (radial).
    #[arg(long)]
    lines: Option<usize>,
    /// Spacing along lines (radial) or arc step (spiral).
    #[arg(long)]
    spacing: Option<f64>,
    /// Radial distance between spiral turns.
    #[arg(long)]
    pitch: Option<f64>,
    /// Fail when the density is not below this bound (default 1 in 1D, 1/2 in 2D).
    #[arg(long)]
    max_delta: Option<f64>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Scheme file written by `scheme`.
    #[arg(long)]
    scheme: PathBuf,
    /// Test function: constant, x-cos3pi, oscillating, sin-cos, damped-sin-cos, phantom.
    #[arg(long)]
    function: Option<String>,
    /// Signal-to-noise ratio in dB; 0 means noiseless.
    #[arg(long)]
    snr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Quadrature refinement factor.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Gs,
    GsL1,
    Tfs,
    Gridding,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Sample file written by `synth`.
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, value_enum, default_value = "gs")]
    method: MethodArg,
    /// Vanishing moments a (1 = Haar).
    #[arg(long)]
    order: Option<usize>,
    /// Wavelets per axis, a power of two.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Evaluation grid per axis (default 4N).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// ℓ¹ weight relative to ‖G*b‖_∞.
    #[arg(long)]
    lambda_rel: Option<f64>,
    /// Test function id; reports the L2 error when given.
    #[arg(long)]
    truth: Option<String>,
    /// Output prefix: `<out>.bin/.json` coefficients and `<out>_raster.csv/.pgm`.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// fig1, fig2, table1, fig6, example5 or ssr-scan.
    id: Option<String>,
    /// Comma separated orders.
    #[arg(long)]
    orders: Option<String>,
    /// Comma separated N values.
    #[arg(long = "N")]
    n: Option<String>,
    /// Comma separated SNR values in dB.
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Uniform,
    Jittered,
}

#[derive(Args)]
struct SsrArgs {
    #[arg(long)]
    order: Option<usize>,
    /// Comma separated N values.
    #[arg(long = "N")]
    n: Option<String>,
    /// Bound θ on 1/σ_min.
    #[arg(long)]
    theta: Option<f64>,
    /// `uniform` scans M (ε = 1); `jittered` scans K (ε = 0.77, jitter 0.1).
    #[arg(long, value_enum, default_value = "uniform")]
    family: FamilyArg,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    Forward,
    Inverse,
}

#[derive(Args)]
struct TransformArgs {
    /// Coefficient file (`.bin` with `.json` header).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    direction: Direction,
    #[arg(long, short)]
    out: PathBuf,
}

/// Error with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Singular(_)
            | Error::DensityViolation { .. }
            | Error::Unreachable(_)
            | Error::SearchExhausted(_)
            | Error::Quadrature(_) => 3,
            _ => 2,
        };
        Fail(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(2, msg.into())
}

type Res<T> = std::result::Result<T, Fail>;

/// Values from the config file, looked up when a flag is absent.
struct Config(toml::Table);

impl Config {
    fn load(path: Option<&Path>) -> Res<Self> {
        let Some(p) = path else { return Ok(Self(toml::Table::new())) };
        let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        let t = text.parse::<toml::Table>().map_err(|e| usage(format!("{}: {e}", p.display())))?;
        Ok(Self(t))
    }

    fn str(&self, key: &str) -> Option<String> {
        self.0.get(key).map(|v| match v {
            toml::Value::String(s) => s.clone(),
            toml::Value::Array(a) => a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            other => other.to_string(),
        })
    }

    fn get<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Res<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.str(key) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|_| usage(format!("config key {key}: cannot parse '{s}'"))),
        }
    }

    fn need<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Res<T> {
        self.get(flag, key)?.ok_or_else(|| usage(format!("missing --{key}")))
    }

    fn list<T: std::str::FromStr>(&self, flag: Option<String>, key: &str) -> Res<Option<Vec<T>>> {
        let Some(s) = flag.or_else(|| self.str(key)) else { return Ok(None) };
        let v: Vec<T> = s
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse().map_err(|_| usage(format!("--{key}: cannot parse '{x}'"))))
            .collect::<Res<_>>()?;
        if v.is_empty() {
            return Err(usage(format!("--{key}: empty list")));
        }
        Ok(Some(v))
    }
}

fn log2(n: usize) -> Res<u32> {
    if !n.is_power_of_two() {
        return Err(usage(format!("N = {n} is not a power of two")));
    }
    Ok(n.trailing_zeros())
}

fn cmd_scheme(a: SchemeArgs, c: &Config) -> Res<()> {
    let s: SamplingScheme = match a.kind {
        SchemeKindArg::Uniform => make_equispaced_1d(c.need(a.eps, "eps")?, c.need(a.m, "M")?)?,
        SchemeKindArg::Jittered => {
            let eps = c.need(a.eps, "eps")?;
            let m = match c.get(a.m, "M")? {
                Some(m) => m,
                None => jittered_count(c.need(a.k, "K")?, eps),
            };
            make_jittered_1d(eps, c.need(a.jitter, "jitter")?, m, c.get(a.seed, "seed")?.unwrap_or(1))?
        }
        SchemeKindArg::Log => make_log_1d(c.need(a.k, "K")?, c.need(a.delta, "delta")?, 1 << 22)?,
        SchemeKindArg::Uniform2d => {
            let e = c.need(a.eps, "eps")?;
            make_uniform_2d(e, e, c.need(a.m, "M")?)?
        }
        SchemeKindArg::Radial => make_radial_2d(c.need(a.k, "K")?, c.need(a.lines, "lines")?, c.need(a.spacing, "spacing")?)?,
        SchemeKindArg::Spiral => make_spiral_2d(c.need(a.k, "K")?, c.need(a.pitch, "pitch")?, c.need(a.spacing, "spacing")?)?,
    };
    let d = s.density();
    let total: f64 = s.weights.iter().sum();
    println!("points {}  delta {:.6}  sum(mu) {:.6}", s.len(), d.delta, total);
    write_scheme(&a.out, &s)?;
    let bound = c.get(a.max_delta, "max_delta")?.unwrap_or(if s.dim == 1 { 1.0 } else { 0.5 });
    s.check_density(bound)?;
    Ok(())
}

fn cmd_synth(a: SynthArgs, c: &Config) -> Res<()> {
    let scheme = read_scheme(&a.scheme)?;
    let f = TestFunction::from_id(&c.need(a.function, "function")?)?;
    let set = synthesize_samples(f, &scheme, c.get(a.depth, "depth")?.unwrap_or(1))?;
    let snr = c.get(a.snr, "snr")?.unwrap_or(0.0);
    let set = add_noise(&set, snr, c.get(a.seed, "seed")?.unwrap_or(1))?;
    write_samples(&a.out, &set)?;
    println!("wrote {} samples of {} (SNR {snr} dB)", set.values.len(), f.id());
    Ok(())
}

fn with_suffix(p: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    p.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn write_raster(prefix: &Path, dim: usize, p: usize, values: &[gensamp::C64]) -> Res<PathBuf> {
    if dim == 1 {
        let path = with_suffix(prefix, "_raster", "csv");
        write_raster_1d(&path, values)?;
        Ok(path)
    } else {
        let path = with_suffix(prefix, "_raster", "pgm");
        let re: Vec<f64> = values.iter().map(|z| z.re).collect();
        write_pgm(&path, &re, p, p)?;
        Ok(path)
    }
}

fn cmd_reconstruct(a: ReconstructArgs, c: &Config) -> Res<()> {
    let set = read_samples(&a.samples)?;
    let dim = set.scheme.dim;
    let n: usize = c.need(a.n, "N")?;
    let r = log2(n)?;
    let p = c.get(a.grid, "grid")?.unwrap_or(4 * n);
    let truth = c.get(a.truth, "truth")?.map(|s| TestFunction::from_id(&s)).transpose()?;
    let mut opt = PipelineOptions::default();
    opt.tol = c.get(a.tol, "tol")?.unwrap_or(opt.tol);
    opt.max_iter = c.get(a.max_iter, "max_iter")?.unwrap_or(opt.max_iter);
    opt.lambda_rel = c.get(a.lambda_rel, "lambda_rel")?.unwrap_or(opt.lambda_rel);
    let t = std::time::Instant::now();
    let (values, converged) = match a.method {
        MethodArg::Gs | MethodArg::GsL1 => {
            let order = c.need(a.order, "order")?;
            let g = if a.method == MethodArg::Gs { gs_reconstruct(&set, order, r, &opt)? } else { gs_l1_reconstruct(&set, order, r, &opt)? };
            let rep = &g.report;
            println!(
                "iterations {}  relative residual {:.3e}  converged {}  seconds {:.3}",
                rep.iterations, rep.relative_residual, rep.converged, rep.seconds
            );
            let header = CoefficientHeader::new(dim, order, g.system.coarse_scale(), r, g.layout);
            let path = with_suffix(&a.out, "", "bin");
            write_coefficients(&path, &header, g.coefficients())?;
            println!("coefficients {}", path.display());
            (g.evaluate(p)?, rep.converged)
        }
        MethodArg::Tfs => (baselines::truncated_fourier_series(&set, p)?.values, true),
        MethodArg::Gridding => (baselines::gridding(&set, p)?.values, true),
    };
    println!("wall time {:.3}s", t.elapsed().as_secs_f64());
    println!("raster {}", write_raster(&a.out, dim, p, &values)?.display());
    if let Some(f) = truth {
        println!("l2 error {:.6e}", l2_error(&values, f)?);
    }
    if !converged {
        return Err(Fail(3, "solver did not converge within the iteration limit".into()));
    }
    Ok(())
}

fn cmd_experiment(a: ExperimentArgs, c: &Config) -> Res<()> {
    let id: ExperimentId = c.need(a.id, "id")?.parse()?;
    let mut cfg = ExperimentConfig::new(id);
    cfg.orders = c.list(a.orders, "orders")?;
    cfg.ns = c.list(a.n, "N")?;
    cfg.snr = c.list(a.snr, "snr")?;
    cfg.seed = c.get(a.seed, "seed")?.unwrap_or(cfg.seed);
    cfg.depth = c.get(a.depth, "depth")?.unwrap_or(cfg.depth);
    let out = c.get(a.out, "out")?.unwrap_or_else(|| PathBuf::from("results"));
    let rep = run_experiment(&cfg)?;
    for r in &rep.rows {
        println!("{:<28} a={} N={:<5} M|K={:<7} snr={:<4} l2={:.3e} {:.2}s", r.method, r.order, r.n, r.m_or_k, r.snr, r.l2_error, r.seconds);
    }
    for (a, s) in &rep.ssr {
        println!("ssr a={a} N={} M={} 1/sigma_min={:.4}", s.n, s.m, s.condition);
    }
    for p in write_report(id, &rep, &out)? {
        log::info!("wrote {}", p.display());
    }
    if !rep.failures.is_empty() {
        for (l, e) in &rep.failures {
            eprintln!("row {l} failed: {e}");
        }
        return Err(Fail(3, format!("{} rows failed", rep.failures.len())));
    }
    Ok(())
}

fn cmd_ssr(a: SsrArgs, c: &Config) -> Res<()> {
    let order = c.need(a.order, "order")?;
    let ns: Vec<usize> = c.list(a.n, "N")?.ok_or_else(|| usage("missing --N"))?;
    let theta = c.get(a.theta, "theta")?.unwrap_or(2.0);
    let seed = c.get(a.seed, "seed")?.unwrap_or(1);
    let rows = match a.family {
        FamilyArg::Uniform => stable_sampling_rate_scan(order, &ns, theta, &|m| make_equispaced_1d(1.0, m), &|n| (n, 8 * n))?,
        FamilyArg::Jittered => stable_sampling_rate_scan(
            order,
            &ns,
            theta,
            &|k| make_jittered_1d(0.77, 0.1, jittered_count(k as f64, 0.77), seed),
            &|n| (n / 2, 8 * n),
        )?,
    };
    let mut w = csv::Writer::from_path(&a.out).map_err(|e| usage(e.to_string()))?;
    w.write_record(["order", "N", "param", "M", "sigma_min", "condition"]).map_err(|e| usage(e.to_string()))?;
    for r in &rows {
        println!("N={} param={} M={} 1/sigma_min={:.4}", r.n, r.param, r.m, r.condition);
        w.write_record([order.to_string(), r.n.to_string(), r.param.to_string(), r.m.to_string(), r.sigma_min.to_string(), r.condition.to_string()])
            .map_err(|e| usage(e.to_string()))?;
    }
    w.flush().map_err(|e| usage(e.to_string()))?;
    Ok(())
}

fn cmd_transform(a: TransformArgs) -> Res<()> {
    let (mut h, mut v) = read_coefficients(&a.input)?;
    let (from, to) = match a.direction {
        Direction::Forward => (Layout::Scaling, Layout::Wavelet),
        Direction::Inverse => (Layout::Wavelet, Layout::Scaling),
    };
    if h.layout != from {
        return Err(usage(format!("input layout is {:?}, expected {from:?}", h.layout)));
    }
    let sys = WaveletSystem::<f64>::with_scales(h.order, h.j, h.r)?;
    let mut scratch = vec![gensamp::C64::new(0.0, 0.0); v.len()];
    match (h.dim, a.direction) {
        (1, Direction::Forward) => sys.forward_in_place(&mut v, &mut scratch)?,
        (1, Direction::Inverse) => sys.inverse_in_place(&mut v, &mut scratch)?,
        (_, Direction::Forward) => sys.forward_2d_in_place(&mut v, h.n)?,
        (_, Direction::Inverse) => sys.inverse_2d_in_place(&mut v, h.n)?,
    }
    h.layout = to;
    write_coefficients(&a.out, &h, &v)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let run = || -> Res<()> {
        let c = Config::load(cli.config.as_deref())?;
        match cli.cmd {
            Cmd::Scheme(a) => cmd_scheme(a, &c),
            Cmd::Synth(a) => cmd_synth(a, &c),
            Cmd::Reconstruct(a) => cmd_reconstruct(a, &c),
            Cmd::Experiment(a) => cmd_experiment(a, &c),
            Cmd::Ssr(a) => cmd_ssr(a, &c),
            Cmd::Transform(a) => cmd_transform(a),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

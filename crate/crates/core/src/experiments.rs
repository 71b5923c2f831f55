//! Reconstruction pipelines and the numerical experiments built on them.
//!
//! Every experiment is a list of independent rows. Rows run in parallel, each
//! with its own seed derived from the configuration seed and the row index, and
//! a failing row is reported without stopping the others.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{dft_dwt_cs, gridding, integer_scheme_2d, radial_lines_mask, truncated_fourier_series};
use crate::error::{Error, Result};
use crate::harness::{add_noise, evaluate_1d, evaluate_2d, l2_error, synthesize_samples, SampleSet, TestFunction};
use crate::io::{write_pgm, write_raster_1d, write_summary, SummaryRow};
use crate::operator::{GsOperator, OperatorOptions};
use crate::sampling::{
    make_equispaced_1d, make_jittered_1d, jittered_count, make_log_1d, make_uniform_2d, radial_meeting_density,
    SamplingScheme,
};
use crate::solvers::{
    estimate_extremal_singular_values, fista_l1, lsqr, stable_sampling_rate_scan, FistaOptions, LinearOperator,
    SolveReport, SsrRow, StabilityEstimate,
};
use crate::wavelet::{Layout, WaveletSystem};
use crate::C64;

/// Solver settings shared by the reconstruction pipelines.
#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// `λ` of the ℓ¹ problems relative to `‖G*b‖_∞`.
    pub lambda_rel: f64,
    pub operator: OperatorOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 2000, lambda_rel: 1e-5, operator: OperatorOptions::default() }
    }
}

/// Coefficients recovered by GS together with the solver report.
#[derive(Clone, Debug)]
pub struct GsResult {
    pub system: WaveletSystem<f64>,
    pub layout: Layout,
    pub dim: usize,
    pub report: SolveReport<f64>,
}

impl GsResult {
    pub fn coefficients(&self) -> &[C64] {
        &self.report.solution
    }

    /// Values on the `P`-grid (`P^d` points).
    pub fn evaluate(&self, p: usize) -> Result<Vec<C64>> {
        if self.dim == 1 {
            evaluate_1d(&self.system, &self.report.solution, self.layout, p)
        } else {
            evaluate_2d(&self.system, &self.report.solution, self.layout, p)
        }
    }
}

fn gs_operator(set: &SampleSet, order: usize, r: u32, opt: &PipelineOptions) -> Result<GsOperator<f64>> {
    let system = WaveletSystem::new(order, r)?;
    GsOperator::with_options(system, set.scheme.clone(), &opt.operator)
}

/// Weighted least squares `min ‖√μ (G α − v)‖` by LSQR.
pub fn gs_reconstruct(set: &SampleSet, order: usize, r: u32, opt: &PipelineOptions) -> Result<GsResult> {
    let op = gs_operator(set, order, r, opt)?;
    let report = lsqr(&op, &set.weighted(), opt.tol, opt.max_iter)?;
    Ok(GsResult { system: op.system().clone(), layout: op.layout(), dim: set.scheme.dim, report })
}

/// `λ = rel·‖G*b‖_∞`; `‖G*b‖_∞` is the smallest `λ` with the zero solution.
pub fn relative_lambda(op: &dyn LinearOperator<f64>, b: &[C64], rel: f64) -> Result<f64> {
    let m = op.apply_adjoint(b)?.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(rel * m)
}

/// `min ½‖√μ (G α − v)‖² + λ‖α‖₁` by FISTA, with the wavelet-layout operator.
pub fn gs_l1_reconstruct(set: &SampleSet, order: usize, r: u32, opt: &PipelineOptions) -> Result<GsResult> {
    let mut oo = opt.operator.clone();
    oo.layout = Layout::Wavelet;
    let op = GsOperator::with_options(WaveletSystem::new(order, r)?, set.scheme.clone(), &oo)?;
    let b = set.weighted();
    let lambda = relative_lambda(&op, &b, opt.lambda_rel)?;
    if lambda == 0.0 {
        let report = SolveReport {
            solution: vec![C64::new(0.0, 0.0); op.cols()],
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
            seconds: 0.0,
            history: vec![],
        };
        return Ok(GsResult { system: op.system().clone(), layout: Layout::Wavelet, dim: set.scheme.dim, report });
    }
    let mut fo = FistaOptions::new(lambda);
    fo.max_iter = opt.max_iter;
    let report = fista_l1(&op, &b, fo)?;
    Ok(GsResult { system: op.system().clone(), layout: Layout::Wavelet, dim: set.scheme.dim, report })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    Fig1,
    Fig2,
    Table1,
    Fig6,
    Example5,
    SsrScan,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] =
        [Self::Fig1, Self::Fig2, Self::Table1, Self::Fig6, Self::Example5, Self::SsrScan];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Table1 => "table1",
            Self::Fig6 => "fig6",
            Self::Example5 => "example5",
            Self::SsrScan => "ssr-scan",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|e| e.as_str() == s || (s == "ssr" && *e == Self::SsrScan))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment '{s}'")))
    }
}

/// Parameters of one experiment run. Unset fields take the experiment's defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub orders: Option<Vec<usize>>,
    /// `N` per axis (a list for the convergence and stability scans).
    pub ns: Option<Vec<usize>>,
    pub snr: Option<Vec<f64>>,
    pub seed: u64,
    pub depth: usize,
}

impl ExperimentConfig {
    pub fn new(id: ExperimentId) -> Self {
        Self { id, orders: None, ns: None, snr: None, seed: 1, depth: 1 }
    }

    fn orders_or(&self, d: &[usize]) -> Vec<usize> {
        self.orders.clone().unwrap_or_else(|| d.to_vec())
    }

    fn ns_or(&self, d: &[usize]) -> Vec<usize> {
        self.ns.clone().unwrap_or_else(|| d.to_vec())
    }

    fn snr_or(&self, d: &[f64]) -> Vec<f64> {
        self.snr.clone().unwrap_or_else(|| d.to_vec())
    }
}

/// Reconstruction values on the evaluation grid, kept for raster output.
#[derive(Clone, Debug)]
pub struct RasterOut {
    pub name: String,
    pub dim: usize,
    pub grid: usize,
    pub values: Vec<C64>,
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentReport {
    pub rows: Vec<SummaryRow>,
    pub rasters: Vec<RasterOut>,
    /// Rows that failed: label and error message.
    pub failures: Vec<(String, String)>,
    /// Stable sampling rate results (ssr-scan only).
    pub ssr: Vec<(usize, SsrRow)>,
    /// `1/σ_min` at `M = 2N` (ssr-scan only).
    pub stability: Vec<(usize, StabilityEstimate)>,
}

struct RowOut {
    row: SummaryRow,
    raster: Option<RasterOut>,
}

type Job = (String, Box<dyn Fn(u64) -> Result<RowOut> + Send + Sync>);

fn run_jobs(jobs: Vec<Job>, seed: u64) -> ExperimentReport {
    let results: Vec<(String, Result<RowOut>)> = jobs
        .into_par_iter()
        .enumerate()
        .map(|(i, (label, job))| {
            let r = job(seed.wrapping_mul(1_000_003).wrapping_add(i as u64));
            (label, r)
        })
        .collect();
    let mut rep = ExperimentReport::default();
    for (label, r) in results {
        match r {
            Ok(o) => {
                rep.rows.push(o.row);
                rep.rasters.extend(o.raster);
            }
            Err(e) => {
                log::warn!("row {label} failed: {e}");
                rep.failures.push((label, e.to_string()));
            }
        }
    }
    rep
}

#[derive(Clone, Copy)]
enum Method {
    Gs(usize),
    GsL1(usize),
    Tfs,
    Gridding,
    DftDwt(usize),
}

impl Method {
    fn tag(&self) -> (&'static str, usize) {
        match *self {
            Method::Gs(a) => ("gs", a),
            Method::GsL1(a) => ("gs-l1", a),
            Method::Tfs => ("tfs", 0),
            Method::Gridding => ("gridding", 0),
            Method::DftDwt(a) => ("cs-dft-dwt", a),
        }
    }
}

/// One reconstruction of `f` from `set` by `method` with `N = 2^r` per axis,
/// error on the `4N` grid (the pixel grid for the DFT model).
fn reconstruct_row(
    f: TestFunction,
    set: &SampleSet,
    method: Method,
    r: u32,
    label: &str,
    m_or_k: usize,
    opt: &PipelineOptions,
) -> Result<RowOut> {
    let t = Instant::now();
    let n = 1usize << r;
    let p = 4 * n;
    let values = match method {
        Method::Gs(a) => gs_reconstruct(set, a, r, opt)?.evaluate(p)?,
        Method::GsL1(a) => gs_l1_reconstruct(set, a, r, opt)?.evaluate(p)?,
        Method::Tfs => truncated_fourier_series(set, p)?.values,
        Method::Gridding => gridding(set, p)?.values,
        Method::DftDwt(a) => {
            let lam = {
                let (x, y) = (&set.scheme.coords[0], &set.scheme.coords[1]);
                let op = crate::baselines::DftDwtOperator::new(a, n, x, y)?;
                let b: Vec<C64> = set.values.iter().map(|v| v * n as f64).collect();
                relative_lambda(&op, &b, opt.lambda_rel)?
            };
            let mut fo = FistaOptions::new(lam.max(f64::MIN_POSITIVE));
            fo.max_iter = opt.max_iter;
            dft_dwt_cs(set, a, n, fo)?.0.values
        }
    };
    let seconds = t.elapsed().as_secs_f64();
    let l2 = l2_error(&values, f)?;
    let (name, order) = method.tag();
    let snr = set.noise.map_or(0.0, |n| n.snr_db);
    Ok(RowOut {
        row: SummaryRow { method: format!("{name}:{label}"), order, n, m_or_k, snr, l2_error: l2, seconds },
        raster: Some(RasterOut {
            name: format!("{name}_{label}_a{order}_n{n}_snr{snr}"),
            dim: set.scheme.dim,
            grid: if matches!(method, Method::DftDwt(_)) { n } else { p },
            values,
        }),
    })
}

fn job(label: String, f: TestFunction, set: Arc<SampleSet>, method: Method, r: u32, m_or_k: usize) -> Job {
    let l = label.clone();
    (
        format!("{}:{label}", method.tag().0),
        Box::new(move |_| reconstruct_row(f, &set, method, r, &l, m_or_k, &PipelineOptions::default())),
    )
}

fn log2(n: usize) -> Result<u32> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros())
}

/// Error against `M` (uniform, `ε = 1`, `N = M/2`) or `K` (jittered and log,
/// `N = K`) for `x cos(3πx)`.
pub fn fig1(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let f = TestFunction::XCos3Pi;
    let orders = cfg.orders_or(&[1, 2, 3]);
    let ns = cfg.ns_or(&[16, 32, 64, 128, 256, 512]);
    let mut jobs: Vec<Job> = Vec::new();
    for &n in &ns {
        let r = log2(n)?;
        let m = 2 * n;
        let k = n as f64;
        let schemes = [
            ("uniform", make_equispaced_1d(1.0, m)?, m),
            ("jittered", make_jittered_1d(0.77, 0.1, jittered_count(k, 0.77), cfg.seed)?, n),
            ("log", make_log_1d(k, 0.97, 1 << 20)?, n),
        ];
        for (label, s, mk) in schemes {
            let set = Arc::new(synthesize_samples(f, &s, cfg.depth)?);
            let base = if label == "uniform" { Method::Tfs } else { Method::Gridding };
            jobs.push(job(label.into(), f, set.clone(), base, r, mk));
            for &a in &orders {
                jobs.push(job(label.into(), f, set.clone(), Method::Gs(a), r, mk));
            }
        }
    }
    Ok(run_jobs(jobs, cfg.seed))
}

/// The nonperiodic oscillating function on equispaced, jittered and log
/// schemes over `[-64, 64]`, GS with 64 DB4 functions against TFS/gridding.
pub fn fig2(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let f = TestFunction::Oscillating;
    let orders = cfg.orders_or(&[4]);
    let n = cfg.ns_or(&[64])[0];
    let r = log2(n)?;
    let schemes = [
        ("uniform", make_equispaced_1d(1.0, 128)?),
        ("jittered", make_jittered_1d(0.77, 0.1, jittered_count(64.0, 0.77), cfg.seed)?),
        ("log", make_log_1d(64.0, 0.97, 1 << 20)?),
    ];
    let mut jobs = Vec::new();
    for (label, s) in schemes {
        let m = s.len();
        let set = Arc::new(synthesize_samples(f, &s, cfg.depth)?);
        let base = if label == "uniform" { Method::Tfs } else { Method::Gridding };
        jobs.push(job(label.into(), f, set.clone(), base, r, m));
        for &a in &orders {
            jobs.push(job(label.into(), f, set.clone(), Method::Gs(a), r, m));
        }
    }
    Ok(run_jobs(jobs, cfg.seed))
}

/// `sin(5πx)cos(3πy)` with `64×64` Haar/DB2/DB3 from `128×128` uniform and
/// radial samples over `[-64, 64]²`, noiseless and at SNR 30.
pub fn table1(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let f = TestFunction::SinCos;
    let orders = cfg.orders_or(&[1, 2, 3]);
    let n = cfg.ns_or(&[64])[0];
    let r = log2(n)?;
    let k = n as f64;
    let uniform = make_uniform_2d(1.0, 1.0, 2 * n)?;
    let radial = radial_meeting_density(k, 0.5, 0.5, 1024)?;
    let mut jobs = Vec::new();
    for (label, s) in [("uniform", uniform), ("radial", radial)] {
        let clean = synthesize_samples(f, &s, cfg.depth)?;
        for (i, &snr) in cfg.snr_or(&[0.0, 30.0]).iter().enumerate() {
            let set = Arc::new(add_noise(&clean, snr, cfg.seed.wrapping_add(i as u64))?);
            let base = if label == "uniform" { Method::Tfs } else { Method::Gridding };
            jobs.push(job(label.into(), f, set.clone(), base, r, s.len()));
            for &a in &orders {
                jobs.push(job(label.into(), f, set.clone(), Method::Gs(a), r, s.len()));
            }
        }
    }
    Ok(run_jobs(jobs, cfg.seed))
}

/// Piecewise constant phantom from `2N×2N` uniform samples: TFS against GS.
pub fn fig6(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let f = TestFunction::Phantom;
    let orders = cfg.orders_or(&[4]);
    let n = cfg.ns_or(&[256])[0];
    let r = log2(n)?;
    let s = make_uniform_2d(1.0, 1.0, 2 * n)?;
    let set = Arc::new(synthesize_samples(f, &s, cfg.depth)?);
    let mut jobs = vec![job("uniform".into(), f, set.clone(), Method::Tfs, r, s.len())];
    for &a in &orders {
        jobs.push(job("uniform".into(), f, set.clone(), Method::Gs(a), r, s.len()));
    }
    let mut rep = run_jobs(jobs, cfg.seed);
    let p = 4 * n;
    let truth = (0..p * p)
        .map(|i| C64::new(f.eval(&[(i / p) as f64 / p as f64, (i % p) as f64 / p as f64]), 0.0))
        .collect();
    rep.rasters.push(RasterOut { name: "original".into(), dim: 2, grid: p, values: truth });
    Ok(rep)
}

/// Mask of the first `2N×2N` integer samples: radial lines covering 25%.
pub fn example5_mask(n: usize, seed: u64) -> Result<SamplingScheme> {
    let (x, y) = radial_lines_mask(2 * n, 0.25, seed)?;
    integer_scheme_2d(x, y)
}

/// `cos(3x)sin(5y)e^{-x-y}` from a 25% radial-lines mask: GS-ℓ¹ with `N×N`
/// functions against DFT+DWT compressed sensing on the `2N×2N` pixel grid.
pub fn example5(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let f = TestFunction::DampedSinCos;
    let orders = cfg.orders_or(&[4]);
    let n = cfg.ns_or(&[64])[0];
    let r = log2(n)?;
    let s = example5_mask(n, cfg.seed)?;
    let set = Arc::new(synthesize_samples(f, &s, cfg.depth)?);
    let mut jobs = Vec::new();
    for &a in &orders {
        jobs.push(job("mask".into(), f, set.clone(), Method::GsL1(a), r, s.len()));
        jobs.push(job("mask".into(), f, set.clone(), Method::DftDwt(a), r + 1, s.len()));
    }
    let mut rep = run_jobs(jobs, cfg.seed);
    let mask: Vec<C64> = {
        let p = 2 * n;
        let mut v = vec![C64::new(0.0, 0.0); p * p];
        for m in 0..s.len() {
            let i = (s.coords[0][m] + n as f64) as usize;
            let j = (s.coords[1][m] + n as f64) as usize;
            v[i * p + j] = C64::new(1.0, 0.0);
        }
        v
    };
    rep.rasters.push(RasterOut { name: "mask".into(), dim: 2, grid: 2 * n, values: mask });
    Ok(rep)
}

/// `1/σ_min` of the uniform `ε = 1`, `M = 2N` operator.
pub fn stability_at_linear_rate(order: usize, n: usize) -> Result<StabilityEstimate> {
    let op = GsOperator::new(WaveletSystem::<f64>::new(order, log2(n)?)?, make_equispaced_1d(1.0, 2 * n)?)?;
    estimate_extremal_singular_values(&op, 400)
}

/// Stable sampling rate with `θ = 2` for uniform `ε = 1` sampling (smallest
/// `M`) and `1/σ_min` at `M = 2N`, per order.
pub fn ssr_scan(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let orders = cfg.orders_or(&[1, 2, 3, 4]);
    let ns = cfg.ns_or(&[16, 32, 64, 128, 256, 512]);
    let mut rep = ExperimentReport::default();
    let results: Vec<(usize, Result<Vec<SsrRow>>, Vec<Result<StabilityEstimate>>)> = orders
        .par_iter()
        .map(|&a| {
            let ssr = stable_sampling_rate_scan(
                a,
                &ns,
                2.0,
                &|m| make_equispaced_1d(1.0, m),
                &|n| (n, 8 * n),
            );
            let st = ns.iter().map(|&n| stability_at_linear_rate(a, n)).collect();
            (a, ssr, st)
        })
        .collect();
    for (a, ssr, st) in results {
        match ssr {
            Ok(rows) => rep.ssr.extend(rows.into_iter().map(|r| (a, r))),
            Err(e) => rep.failures.push((format!("ssr:a{a}"), e.to_string())),
        }
        for (n, s) in ns.iter().zip(st) {
            match s {
                Ok(s) => {
                    rep.rows.push(SummaryRow {
                        method: "condition:uniform-2n".into(),
                        order: a,
                        n: *n,
                        m_or_k: s.m,
                        snr: 0.0,
                        l2_error: s.condition,
                        seconds: 0.0,
                    });
                    rep.stability.push((a, s));
                }
                Err(e) => rep.failures.push((format!("condition:a{a}:n{n}"), e.to_string())),
            }
        }
    }
    Ok(rep)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match cfg.id {
        ExperimentId::Fig1 => fig1(cfg),
        ExperimentId::Fig2 => fig2(cfg),
        ExperimentId::Table1 => table1(cfg),
        ExperimentId::Fig6 => fig6(cfg),
        ExperimentId::Example5 => example5(cfg),
        ExperimentId::SsrScan => ssr_scan(cfg),
    }
}

#[derive(Serialize)]
struct SsrCsvRow {
    order: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    sigma_min: f64,
    condition: f64,
}

/// Writes `<id>_summary.csv`, rasters (`.pgm` in 2D, `.csv` in 1D) and, for
/// the stability scan, `ssr.csv`. Returns the paths written.
pub fn write_report(id: ExperimentId, rep: &ExperimentReport, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    let p = dir.join(format!("{id}_summary.csv"));
    write_summary(&p, &rep.rows)?;
    out.push(p);
    for r in &rep.rasters {
        if r.dim == 1 {
            let p = dir.join(format!("{id}_{}.csv", r.name));
            write_raster_1d(&p, &r.values)?;
            out.push(p);
        } else {
            let p = dir.join(format!("{id}_{}.pgm", r.name));
            let re: Vec<f64> = r.values.iter().map(|z| z.re).collect();
            write_pgm(&p, &re, r.grid, r.grid)?;
            out.push(p);
        }
    }
    if !rep.ssr.is_empty() {
        let p = dir.join("ssr.csv");
        let mut w = csv::Writer::from_path(&p).map_err(|e| Error::Format(e.to_string()))?;
        for (a, r) in &rep.ssr {
            w.serialize(SsrCsvRow { order: *a, n: r.n, m: r.m, sigma_min: r.sigma_min, condition: r.condition })
                .map_err(|e| Error::Format(e.to_string()))?;
        }
        w.flush()?;
        out.push(p);
    }
    Ok(out)
}

//! Direct reconstructions used for comparison: truncated Fourier series on
//! uniform grids, gridding with density compensation, and a finite
//! dimensional DFT+DWT compressed sensing model on a pixel grid.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::SampleSet;
use crate::nudft::{NudftPlan, NudftPlan2d};
use crate::sampling::{Region, SamplingScheme, SchemeKind};
use crate::solvers::{fista_l1, FistaOptions, LinearOperator, SolveReport};
use crate::wavelet::WaveletSystem;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMethod {
    Tfs,
    Gridding,
    DftDwt,
}

/// Values of a reconstruction at `p/P` (1D) or `(p₁/P, p₂/P)` row-major (2D).
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineReconstruction {
    pub values: Vec<C64>,
    pub grid: usize,
    pub dim: usize,
    pub method: BaselineMethod,
    /// Content hash of the scheme the samples came from.
    pub scheme: String,
}

fn check_grid(p: usize) -> Result<()> {
    if !p.is_power_of_two() || p < 2 {
        return Err(Error::NotPowerOfTwo(p));
    }
    Ok(())
}

/// `Σ_m c_m e^{2πiω_m·x}` on the `P`-grid through the adjoint NUDFT.
fn synthesize_sum(scheme: &SamplingScheme, c: &[C64], p: usize) -> Result<Vec<C64>> {
    check_grid(p)?;
    if scheme.dim == 1 {
        let plan = NudftPlan::<f64>::new(&scheme.coords[0], p, 0)?;
        let s = (p as f64).sqrt();
        Ok(plan.apply_adjoint(c)?.into_iter().map(|z| z * s).collect())
    } else {
        let plan = NudftPlan2d::<f64>::new(&scheme.coords[0], &scheme.coords[1], p, 0)?;
        Ok(plan.apply_adjoint(c)?.into_iter().map(|z| z * p as f64).collect())
    }
}

/// Spacing volume `ε` (1D) or `ε₁ε₂` (2D) of an exact uniform grid.
fn uniform_cell(scheme: &SamplingScheme) -> Result<f64> {
    match scheme.kind {
        SchemeKind::Equispaced1d { eps, .. } => Ok(eps),
        SchemeKind::Uniform2d { eps, .. } => Ok(eps[0] * eps[1]),
        _ => Err(Error::InvalidParameter("truncated Fourier series needs a uniform grid scheme".into())),
    }
}

/// `f̃(x) = ε Σ_m f̂(ω_m) e^{2πiω_m x}` on `P` points.
pub fn truncated_fourier_series(samples: &SampleSet, p: usize) -> Result<BaselineReconstruction> {
    let cell = uniform_cell(&samples.scheme)?;
    let c: Vec<C64> = samples.values.iter().map(|v| v * cell).collect();
    Ok(BaselineReconstruction {
        values: synthesize_sum(&samples.scheme, &c, p)?,
        grid: p,
        dim: samples.scheme.dim,
        method: BaselineMethod::Tfs,
        scheme: samples.scheme.content_hash(),
    })
}

/// `f̃(x) = Σ_m μ_m f̂(ω_m) e^{2πiω_m x}` with the scheme's density compensation weights.
pub fn gridding(samples: &SampleSet, p: usize) -> Result<BaselineReconstruction> {
    let s = &samples.scheme;
    if s.weights.len() != s.len() || s.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidParameter("gridding needs one finite nonnegative weight per sample".into()));
    }
    let c: Vec<C64> = samples.values.iter().zip(&s.weights).map(|(v, w)| v * w).collect();
    Ok(BaselineReconstruction {
        values: synthesize_sum(s, &c, p)?,
        grid: p,
        dim: s.dim,
        method: BaselineMethod::Gridding,
        scheme: s.content_hash(),
    })
}

/// Integer frequencies `(k₁, k₂) ∈ [-P/2, P/2)²` lying within half a pixel of
/// one of `L` equiangular lines through the origin. `L` grows until at least
/// `fraction` of the grid is covered; `seed` rotates the pattern.
pub fn radial_lines_mask(p: usize, fraction: f64, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_grid(p)?;
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("mask fraction must be in (0, 1], got {fraction}")));
    }
    let offset: f64 = ChaCha8Rng::seed_from_u64(seed).random::<f64>() * PI;
    let h = (p / 2) as i64;
    let target = (fraction * (p * p) as f64).ceil() as usize;
    for lines in 1..=4 * p {
        let dirs: Vec<(f64, f64)> = (0..lines)
            .map(|j| {
                let t = offset + PI * j as f64 / lines as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for k1 in -h..h {
            for k2 in -h..h {
                let (a, b) = (k1 as f64, k2 as f64);
                if dirs.iter().any(|(c, s)| (a * s - b * c).abs() <= 0.5) {
                    x.push(a);
                    y.push(b);
                }
            }
        }
        if x.len() >= target {
            return Ok((x, y));
        }
    }
    Err(Error::SearchExhausted(format!("no radial mask reaches coverage {fraction}")))
}

/// A 2D scheme on given integer frequencies with unit weights (the cell of
/// the integer grid).
pub fn integer_scheme_2d(x: Vec<f64>, y: Vec<f64>) -> Result<SamplingScheme> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::ShapeMismatch { expected: x.len(), got: y.len() });
    }
    let k = x.iter().chain(&y).fold(0.0f64, |a, v| a.max(v.abs())) + 0.5;
    Ok(SamplingScheme {
        dim: 2,
        weights: vec![1.0; x.len()],
        coords: vec![x, y],
        region: Region::Rect { lo: [-k, -k], hi: [k, k] },
        kind: SchemeKind::Custom,
        weight_step: None,
    })
}

/// `P_Ω U_df U_dw⁻¹` on a `P×P` pixel grid, `U_df` the unitary DFT and `U_dw`
/// the orthogonal boundary-corrected wavelet transform.
pub struct DftDwtOperator {
    plan: NudftPlan2d<f64>,
    system: WaveletSystem<f64>,
    p: usize,
}

impl DftDwtOperator {
    pub fn new(order: usize, p: usize, x: &[f64], y: &[f64]) -> Result<Self> {
        check_grid(p)?;
        let system = WaveletSystem::new(order, p.trailing_zeros())?;
        let plan = NudftPlan2d::new(x, y, p, 0)?;
        Ok(Self { plan, system, p })
    }

    pub fn pixels(&self, coeffs: &[C64]) -> Result<Vec<C64>> {
        let mut u = coeffs.to_vec();
        self.system.inverse_2d_in_place(&mut u, self.p)?;
        Ok(u)
    }
}

impl LinearOperator<f64> for DftDwtOperator {
    fn rows(&self) -> usize {
        self.plan.m()
    }
    fn cols(&self) -> usize {
        self.p * self.p
    }
    fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.plan.apply(&self.pixels(x)?)
    }
    fn apply_adjoint(&self, y: &[C64]) -> Result<Vec<C64>> {
        let mut u = self.plan.apply_adjoint(y)?;
        self.system.forward_2d_in_place(&mut u, self.p)?;
        Ok(u)
    }
}

/// Finite dimensional compressed sensing: FISTA on `P_Ω U_df U_dw⁻¹ z ≈ y` with
/// `y = P·f̂(k)`, so that pixel values approximate `f(p/P)`. Samples must sit
/// on integer frequencies in `[-P/2, P/2)²`.
pub fn dft_dwt_cs(
    samples: &SampleSet,
    order: usize,
    p: usize,
    opt: FistaOptions,
) -> Result<(BaselineReconstruction, SolveReport<f64>)> {
    let s = &samples.scheme;
    if s.dim != 2 {
        return Err(Error::ShapeMismatch { expected: 2, got: s.dim });
    }
    let half = (p / 2) as f64;
    if s.coords.iter().flatten().any(|&w| w.fract() != 0.0 || w < -half || w >= half) {
        return Err(Error::InvalidParameter(format!("DFT model needs integer frequencies in [-{half}, {half})")));
    }
    let op = DftDwtOperator::new(order, p, &s.coords[0], &s.coords[1])?;
    let b: Vec<C64> = samples.values.iter().map(|v| v * p as f64).collect();
    let rep = fista_l1(&op, &b, opt)?;
    let values = op.pixels(&rep.solution)?;
    Ok((
        BaselineReconstruction { values, grid: p, dim: 2, method: BaselineMethod::DftDwt, scheme: s.content_hash() },
        rep,
    ))
}

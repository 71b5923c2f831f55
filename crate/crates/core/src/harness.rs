//! Test functions with accurate Fourier transforms, sample synthesis, noise,
//! L2 errors and evaluation of wavelet reconstructions on uniform grids.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SamplingScheme;
use crate::wavelet::{CoefficientVector, Layout, WaveletSystem};
use crate::C64;

/// Gauss–Legendre points per quadrature panel.
pub const GL_POINTS: usize = 16;

/// Upper bound on quadrature panels per integral.
pub const MAX_PANELS: usize = 1 << 24;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

/// `∫_a^b g(t) e^{-2πiωt} dt` by composite Gauss–Legendre with panels short
/// enough that `2π|ω|·panel ≤ 1/depth` and at least `64·depth` panels.
pub fn oscillatory_integral(g: impl Fn(f64) -> f64, a: f64, b: f64, w: f64, depth: usize) -> C64 {
    let (xs, ws) = gl16();
    let len = b - a;
    let d = depth.max(1) as f64;
    let panels = ((2.0 * PI * w.abs() * len * d).ceil() as usize).max(64 * depth.max(1));
    let h = len / panels as f64;
    let mut s = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut ps = C64::new(0.0, 0.0);
        for (x, wt) in xs.iter().zip(ws) {
            let t = mid + 0.5 * h * x;
            ps += C64::from_polar(wt * g(t), -2.0 * PI * w * t);
        }
        s += ps * (0.5 * h);
    }
    s
}

/// `Σ c_j e^{λ_j x}` on `[0, 1]`, whose transform is closed form.
#[derive(Clone, Debug)]
struct ExpSum(Vec<(C64, C64)>);

impl ExpSum {
    fn eval(&self, x: f64) -> f64 {
        self.0.iter().map(|(c, l)| c * (l * x).exp()).sum::<C64>().re
    }

    fn fourier(&self, w: f64) -> C64 {
        self.0
            .iter()
            .map(|(c, l)| {
                let mu = l - C64::new(0.0, 2.0 * PI * w);
                // (e^μ − 1)/μ, by series near 0
                let v = if mu.norm() < 1e-3 {
                    let mut term = C64::new(1.0, 0.0);
                    let mut s = term;
                    for k in 2..12 {
                        term = term * mu / k as f64;
                        s += term;
                    }
                    s
                } else {
                    (mu.exp() - 1.0) / mu
                };
                c * v
            })
            .sum()
    }

    fn cos_pi(k: f64) -> Self {
        Self(vec![(C64::new(0.5, 0.0), C64::new(0.0, k * PI)), (C64::new(0.5, 0.0), C64::new(0.0, -k * PI))])
    }
    fn sin_pi(k: f64) -> Self {
        Self(vec![(C64::new(0.0, -0.5), C64::new(0.0, k * PI)), (C64::new(0.0, 0.5), C64::new(0.0, -k * PI))])
    }
    fn one() -> Self {
        Self(vec![(C64::new(1.0, 0.0), C64::new(0.0, 0.0))])
    }
    /// `cos(3x) e^{-x}`.
    fn cos3_exp() -> Self {
        Self(vec![(C64::new(0.5, 0.0), C64::new(-1.0, 3.0)), (C64::new(0.5, 0.0), C64::new(-1.0, -3.0))])
    }
    /// `sin(5y) e^{-y}`.
    fn sin5_exp() -> Self {
        Self(vec![(C64::new(0.0, -0.5), C64::new(-1.0, 5.0)), (C64::new(0.0, 0.5), C64::new(-1.0, -5.0))])
    }
}

/// Axis-aligned rectangles and one disk with constant values, used for the
/// discontinuous 2D example.
pub mod phantom {
    /// `(x0, x1, y0, y1, value)`.
    pub const RECTS: [(f64, f64, f64, f64, f64); 3] =
        [(0.1, 0.6, 0.2, 0.45, 1.0), (0.55, 0.9, 0.6, 0.85, 0.6), (0.65, 0.8, 0.1, 0.3, 0.4)];
    /// `(cx, cy, r, value)`.
    pub const DISK: (f64, f64, f64, f64) = (0.3, 0.7, 0.15, 0.8);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    /// `f = 1` on `[0,1]`.
    Constant,
    /// `x cos(3πx)` on `[0,1]`.
    XCos3Pi,
    /// `-exp(x cos(4πx)) cos(7πx) + sin(3πx)` on `[0,1]`.
    Oscillating,
    /// `sin(5πx) cos(3πy)` on `[0,1]²`.
    SinCos,
    /// `cos(3x) sin(5y) exp(-x-y)` on `[0,1]²` (arguments without π).
    DampedSinCos,
    /// Piecewise constant rectangles and a disk on `[0,1]²`.
    Phantom,
}

pub const ALL_FUNCTIONS: [TestFunction; 6] = [
    TestFunction::Constant,
    TestFunction::XCos3Pi,
    TestFunction::Oscillating,
    TestFunction::SinCos,
    TestFunction::DampedSinCos,
    TestFunction::Phantom,
];

impl TestFunction {
    pub fn id(&self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::XCos3Pi => "x-cos3pi",
            Self::Oscillating => "oscillating",
            Self::SinCos => "sin-cos",
            Self::DampedSinCos => "damped-sin-cos",
            Self::Phantom => "phantom",
        }
    }

    pub fn from_id(s: &str) -> Result<Self> {
        ALL_FUNCTIONS
            .iter()
            .copied()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown test function '{s}'")))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Constant | Self::XCos3Pi | Self::Oscillating => 1,
            _ => 2,
        }
    }

    pub fn smoothness(&self) -> &'static str {
        match self {
            Self::Phantom => "discontinuous; in H^s for s < 1/2",
            _ => "smooth inside the unit cube, nonperiodic, discontinuous at the boundary when extended by zero",
        }
    }

    fn factors(&self) -> Option<(ExpSum, ExpSum)> {
        match self {
            Self::SinCos => Some((ExpSum::sin_pi(5.0), ExpSum::cos_pi(3.0))),
            Self::DampedSinCos => Some((ExpSum::cos3_exp(), ExpSum::sin5_exp())),
            _ => None,
        }
    }

    fn eval_1d(&self, x: f64) -> f64 {
        match self {
            Self::Constant => 1.0,
            Self::XCos3Pi => x * (3.0 * PI * x).cos(),
            Self::Oscillating => -(x * (4.0 * PI * x).cos()).exp() * (7.0 * PI * x).cos() + (3.0 * PI * x).sin(),
            _ => unreachable!("1D evaluation of a 2D function"),
        }
    }

    /// Pointwise value; zero outside `[0,1]^d` (the right end included).
    pub fn eval(&self, p: &[f64]) -> f64 {
        if p.len() != self.dim() || p.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
            return 0.0;
        }
        if self.dim() == 1 {
            return self.eval_1d(p[0]);
        }
        let (x, y) = (p[0], p[1]);
        if let Some((fx, fy)) = self.factors() {
            return fx.eval(x) * fy.eval(y);
        }
        let mut v = 0.0;
        for &(x0, x1, y0, y1, val) in &phantom::RECTS {
            if (x0..x1).contains(&x) && (y0..y1).contains(&y) {
                v += val;
            }
        }
        let (cx, cy, r, val) = phantom::DISK;
        if (x - cx).powi(2) + (y - cy).powi(2) < r * r {
            v += val;
        }
        v
    }

    /// `f̂(ω) = ∫ f(x) e^{-2πiω·x} dx`; `depth` refines the quadrature where one is used.
    pub fn fourier(&self, w: &[f64], depth: usize) -> Result<C64> {
        if w.len() != self.dim() {
            return Err(Error::ShapeMismatch { expected: self.dim(), got: w.len() });
        }
        let budget = 2.0 * PI * w.iter().map(|v| v.abs()).sum::<f64>() * depth.max(1) as f64;
        if budget > MAX_PANELS as f64 || w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Quadrature(format!("frequency {w:?} at depth {depth} needs more than {MAX_PANELS} panels")));
        }
        Ok(match self {
            Self::Constant => ExpSum::one().fourier(w[0]),
            Self::XCos3Pi | Self::Oscillating => oscillatory_integral(|x| self.eval_1d(x), 0.0, 1.0, w[0], depth),
            Self::SinCos | Self::DampedSinCos => {
                let (fx, fy) = self.factors().expect("separable");
                fx.fourier(w[0]) * fy.fourier(w[1])
            }
            Self::Phantom => phantom_fourier(w[0], w[1], depth),
        })
    }
}

fn interval_fourier(a: f64, b: f64, w: f64) -> C64 {
    if w == 0.0 {
        return C64::new(b - a, 0.0);
    }
    (C64::from_polar(1.0, -2.0 * PI * w * a) - C64::from_polar(1.0, -2.0 * PI * w * b)) / C64::new(0.0, 2.0 * PI * w)
}

fn phantom_fourier(w1: f64, w2: f64, depth: usize) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for &(x0, x1, y0, y1, val) in &phantom::RECTS {
        s += interval_fourier(x0, x1, w1) * interval_fourier(y0, y1, w2) * val;
    }
    // disk: x = cx + r sin θ, the chord integral in y is closed form
    let (cx, cy, r, val) = phantom::DISK;
    let chord = |s: f64| if w2 == 0.0 { 2.0 * s } else { (2.0 * PI * w2 * s).sin() / (PI * w2) };
    let (xs, ws) = gl16();
    let d = depth.max(1);
    let panels = ((2.0 * PI * r * (w1.abs() + w2.abs()) * d as f64).ceil() as usize).max(32 * d);
    let h = PI / panels as f64;
    let mut disk = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = -PI / 2.0 + (p as f64 + 0.5) * h;
        for (x, wt) in xs.iter().zip(ws) {
            let th = mid + 0.5 * h * x;
            let u = r * th.sin();
            let c = r * th.cos();
            disk += C64::from_polar(wt * 0.5 * h * c * chord(c), -2.0 * PI * w1 * u);
        }
    }
    s + disk * C64::from_polar(val, -2.0 * PI * (w1 * cx + w2 * cy))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

/// Samples `v_m = f̂(ω_m)` on a scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub scheme: SamplingScheme,
    pub values: Vec<C64>,
    pub noise: Option<NoiseSpec>,
}

impl SampleSet {
    pub fn new(scheme: SamplingScheme, values: Vec<C64>) -> Result<Self> {
        if values.len() != scheme.len() {
            return Err(Error::ShapeMismatch { expected: scheme.len(), got: values.len() });
        }
        Ok(Self { scheme, values, noise: None })
    }

    /// `b_m = √μ_m v_m`, the right-hand side of the weighted least-squares system.
    pub fn weighted(&self) -> Vec<C64> {
        self.values.iter().zip(&self.scheme.weights).map(|(v, w)| v * w.sqrt()).collect()
    }
}

/// `f̂` at every point of the scheme. Separable 2D functions are evaluated
/// per distinct coordinate.
pub fn synthesize_samples(f: TestFunction, scheme: &SamplingScheme, depth: usize) -> Result<SampleSet> {
    if scheme.dim != f.dim() {
        return Err(Error::ShapeMismatch { expected: f.dim(), got: scheme.dim });
    }
    let values: Vec<C64> = if let Some((fx, fy)) = f.factors() {
        let uniq = |c: &[f64], e: &ExpSum| -> HashMap<u64, C64> {
            let mut keys: Vec<f64> = c.to_vec();
            keys.sort_by(|a, b| a.total_cmp(b));
            keys.dedup();
            keys.into_par_iter().map(|w| (w.to_bits(), e.fourier(w))).collect()
        };
        let (mx, my) = (uniq(&scheme.coords[0], &fx), uniq(&scheme.coords[1], &fy));
        (0..scheme.len()).map(|m| mx[&scheme.coords[0][m].to_bits()] * my[&scheme.coords[1][m].to_bits()]).collect()
    } else {
        (0..scheme.len())
            .into_par_iter()
            .map(|m| f.fourier(&scheme.point(m), depth))
            .collect::<Result<Vec<_>>>()?
    };
    SampleSet::new(scheme.clone(), values)
}

/// Complex white Gaussian noise with `20 log₁₀(‖v‖/‖η‖) = snr_db`. An SNR of 0
/// means noiseless and leaves the samples untouched.
pub fn add_noise(samples: &SampleSet, snr_db: f64, seed: u64) -> Result<SampleSet> {
    if !(snr_db >= 0.0) {
        return Err(Error::InvalidParameter(format!("SNR must be nonnegative, got {snr_db}")));
    }
    let mut out = samples.clone();
    out.noise = Some(NoiseSpec { snr_db, seed });
    if snr_db == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta: Vec<C64> =
        (0..samples.values.len()).map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
    let nv = samples.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ne = eta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let s = nv * 10f64.powf(-snr_db / 20.0) / ne;
    for (v, e) in out.values.iter_mut().zip(&eta) {
        *v += e * s;
    }
    Ok(out)
}

/// Grid side `P` of a `P` (1D) or `P×P` (2D) array.
fn grid_side(len: usize, dim: usize) -> Result<usize> {
    let p = if dim == 1 { len } else { (len as f64).sqrt().round() as usize };
    if p == 0 || p.pow(dim as u32) != len {
        return Err(Error::InvalidParameter(format!("{len} values do not form a {dim}D square grid")));
    }
    Ok(p)
}

/// Discrete L2 norm of `recon − f` over `[0,1]^d` sampled at `p/P` (rectangle rule).
pub fn l2_error(recon: &[C64], f: TestFunction) -> Result<f64> {
    let d = f.dim();
    let p = grid_side(recon.len(), d)?;
    let h = 1.0 / p as f64;
    let s: f64 = if d == 1 {
        recon.iter().enumerate().map(|(i, r)| (r - f.eval(&[i as f64 * h])).norm_sqr()).sum()
    } else {
        recon
            .par_iter()
            .enumerate()
            .map(|(k, r)| (r - f.eval(&[(k / p) as f64 * h, (k % p) as f64 * h])).norm_sqr())
            .sum()
    };
    Ok((s * h.powi(d as i32)).sqrt())
}

/// Same metric between two reconstructions on the same grid.
pub fn l2_distance(a: &[C64], b: &[C64], dim: usize) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch { expected: a.len(), got: b.len() });
    }
    let p = grid_side(a.len(), dim)?;
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    Ok((s / (p as f64).powi(dim as i32)).sqrt())
}

/// `f̃ = Σ α_n ψ_n` at `p/P`, `P` a power of two at least `N`.
pub fn evaluate_1d(system: &WaveletSystem<f64>, alpha: &[C64], layout: Layout, p: usize) -> Result<Vec<C64>> {
    if !p.is_power_of_two() || p < system.n() {
        return Err(Error::InvalidParameter(format!("grid {p} must be a power of two ≥ N = {}", system.n())));
    }
    system.evaluate_on_dyadic_grid(&CoefficientVector { values: alpha.to_vec(), layout }, p.trailing_zeros())
}

/// Values of every scale-`R` scaling function on the grid: `B[p][k]`.
fn scaling_matrix(system: &WaveletSystem<f64>, p: usize) -> Result<Vec<f64>> {
    let n = system.n();
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            system.evaluate_on_dyadic_grid(&CoefficientVector { values: v, layout: Layout::Scaling }, p.trailing_zeros())
        })
        .collect::<Result<_>>()?;
    let mut b = vec![0.0; p * n];
    for (k, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            b[i * n + k] = *v;
        }
    }
    Ok(b)
}

/// 2D analogue of [`evaluate_1d`]: row-major `P×P`, first index along `x`.
pub fn evaluate_2d(system: &WaveletSystem<f64>, alpha: &[C64], layout: Layout, p: usize) -> Result<Vec<C64>> {
    let n = system.n();
    if alpha.len() != n * n {
        return Err(Error::ShapeMismatch { expected: n * n, got: alpha.len() });
    }
    if !p.is_power_of_two() || p < n {
        return Err(Error::InvalidParameter(format!("grid {p} must be a power of two ≥ N = {n}")));
    }
    let mut c = alpha.to_vec();
    if layout == Layout::Wavelet {
        system.inverse_2d_in_place(&mut c, n)?;
    }
    let b = scaling_matrix(system, p)?;
    // T = C Bᵀ  (N × P), then F = B T  (P × P)
    let mut t = vec![C64::new(0.0, 0.0); n * p];
    t.par_chunks_mut(p).enumerate().for_each(|(k1, row)| {
        for (j, o) in row.iter_mut().enumerate() {
            let brow = &b[j * n..(j + 1) * n];
            *o = c[k1 * n..(k1 + 1) * n].iter().zip(brow).map(|(x, y)| x * y).sum();
        }
    });
    let mut out = vec![C64::new(0.0, 0.0); p * p];
    out.par_chunks_mut(p).enumerate().for_each(|(i, row)| {
        let brow = &b[i * n..(i + 1) * n];
        for (k1, &bv) in brow.iter().enumerate() {
            if bv == 0.0 {
                continue;
            }
            for (o, tv) in row.iter_mut().zip(&t[k1 * p..(k1 + 1) * p]) {
                *o += tv * bv;
            }
        }
    });
    Ok(out)
}

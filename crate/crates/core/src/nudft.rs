//! Restricted, shifted nonuniform DFT
//!
//! ```text
//! (F γ)_m  = N^{-d/2} Σ_{k ∈ W^d} γ_k e^{-2πi ω_m·k/N}
//! (F* ζ)_k = N^{-d/2} Σ_m ζ_m e^{+2πi ω_m·k/N},   k ∈ W^d, zero elsewhere
//! ```
//!
//! with index window `W = [e, N-e)`. Three plan kinds: direct summation, an exact
//! FFT path when every `ω_m` lies on a grid `ℤ/r` for a small integer `r`, and a
//! Kaiser–Bessel gridding NUFFT on an oversampled grid of length `L = 2·N`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Plans with `M·N^d` at most this use direct summation.
pub const DIRECT_THRESHOLD: usize = 4096;
/// Largest grid refinement `r` tried by the uniform detector.
pub const MAX_UNIFORM_RATIO: usize = 16;
pub const DEFAULT_ACCURACY: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanKind {
    Direct,
    /// FFT of length `ratio·N` per axis.
    Uniform { ratio: [usize; 2] },
    /// Kaiser–Bessel gridding on `oversampled` points per axis with `width` taps.
    Nonuniform { oversampled: usize, width: usize },
}

/// Which path to use; `Auto` follows the policy above.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PlanChoice {
    #[default]
    Auto,
    Direct,
    Uniform,
    Nonuniform,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanOptions {
    pub accuracy: f64,
    pub choice: PlanChoice,
    /// Overrides the width derived from `accuracy`.
    pub width: Option<usize>,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self { accuracy: DEFAULT_ACCURACY, choice: PlanChoice::Auto, width: None }
    }
}

/// Spreading width for a requested relative accuracy at oversampling 2.
pub fn width_for_accuracy(acc: f64) -> usize {
    // measured worst-case relative error at σ = 2 is about 6·10^{-w}; keep a 2.5× margin
    (4..=14usize)
        .find(|&w| 15.0 * 10f64.powi(-(w as i32)) <= acc)
        .unwrap_or(16)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        Err(Error::NotPowerOfTwo(n))
    } else {
        Ok(())
    }
}

fn check_window(n: usize, edge: usize) -> Result<()> {
    if 2 * edge > n {
        Err(Error::InvalidParameter(format!("window offset {edge} too large for N = {n}")))
    } else {
        Ok(())
    }
}

/// Smallest `r ≤ MAX_UNIFORM_RATIO` with every `r·ω` an integer (to 1e-9).
pub fn grid_ratio(freqs: &[f64]) -> Option<usize> {
    (1..=MAX_UNIFORM_RATIO).find(|&r| {
        freqs.iter().all(|&w| {
            let v = w * r as f64;
            (v - v.round()).abs() <= 1e-9 * v.abs().max(1.0)
        })
    })
}

fn integer_bins(freqs: &[f64], r: usize, p: usize) -> Vec<usize> {
    freqs
        .iter()
        .map(|&w| ((w * r as f64).round() as i64).rem_euclid(p as i64) as usize)
        .collect()
}

/// Modified Bessel function `I₀` by its power series.
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > 1e-17 * sum {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// Kaiser–Bessel kernel of width `w` (in fine-grid cells) for oversampling `σ`.
#[derive(Clone, Copy, Debug)]
pub struct KaiserBessel {
    pub width: usize,
    pub beta: f64,
    norm: f64,
}

impl KaiserBessel {
    pub fn new(width: usize, sigma: f64) -> Self {
        let w = width as f64;
        let beta = PI * ((w / sigma).powi(2) * (sigma - 0.5).powi(2) - 0.8).max(1e-6).sqrt();
        Self { width, beta, norm: bessel_i0(beta) }
    }

    /// `ψ(t)`, supported on `|t| ≤ w/2`.
    pub fn eval(&self, t: f64) -> f64 {
        let z = 2.0 * t / self.width as f64;
        if z.abs() > 1.0 {
            0.0
        } else {
            bessel_i0(self.beta * (1.0 - z * z).sqrt()) / self.norm
        }
    }

    /// `ψ̂(ν) = ∫ ψ(t) e^{-2πiνt} dt`.
    pub fn fourier(&self, nu: f64) -> f64 {
        let w = self.width as f64;
        let s = self.beta * self.beta - (PI * w * nu).powi(2);
        let v = if s > 0.0 {
            let r = s.sqrt();
            r.sinh() / r
        } else if s < 0.0 {
            let r = (-s).sqrt();
            r.sin() / r
        } else {
            1.0
        };
        w * v / self.norm
    }
}

/// Cached FFTs of one length.
#[derive(Clone)]
struct FftPair<T: Real> {
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> FftPair<T> {
    fn new(len: usize) -> Self {
        let mut p = FftPlanner::new();
        Self { fwd: p.plan_fft_forward(len), inv: p.plan_fft_inverse(len) }
    }
}

/// In-place 2D FFT of a row-major `rows × cols` array.
fn fft_2d<T: Real>(buf: &mut [Complex<T>], rows: usize, cols: usize, r: &Arc<dyn Fft<T>>, c: &Arc<dyn Fft<T>>) {
    for row in buf.chunks_exact_mut(cols) {
        c.process(row);
    }
    let mut col = vec![Complex::zero(); rows];
    for j in 0..cols {
        for i in 0..rows {
            col[i] = buf[i * cols + j];
        }
        r.process(&mut col);
        for i in 0..rows {
            buf[i * cols + j] = col[i];
        }
    }
}

/// Per-axis gridding data for one coordinate list.
#[derive(Clone)]
struct Gridding<T: Real> {
    l: usize,
    w: usize,
    start: Vec<i64>,
    weights: Vec<T>,
    /// `1/ψ̂(k'/L)` for `k' = -N/2 .. N/2-1`, indexed by `k' + N/2`.
    deconv: Vec<T>,
    /// `e^{-2πi x_m N/2}`.
    phase: Vec<Complex<T>>,
}

impl<T: Real> Gridding<T> {
    fn new(coords: &[f64], n: usize, l: usize, w: usize) -> Self {
        let kb = KaiserBessel::new(w, l as f64 / n as f64);
        let c = (n / 2) as f64;
        let mut start = Vec::with_capacity(coords.len());
        let mut weights = Vec::with_capacity(coords.len() * w);
        let mut phase = Vec::with_capacity(coords.len());
        for &om in coords {
            let x = (om / n as f64).rem_euclid(1.0);
            let t = x * l as f64;
            let s = (t - w as f64 / 2.0).floor() as i64 + 1;
            start.push(s);
            for i in 0..w {
                weights.push(T::of(kb.eval(t - (s + i as i64) as f64)));
            }
            let ph = Complex::from_polar(1.0, -2.0 * PI * (x * c).rem_euclid(1.0));
            phase.push(Complex::new(T::of(ph.re), T::of(ph.im)));
        }
        let deconv = (0..n).map(|j| T::of(1.0 / kb.fourier((j as f64 - c) / l as f64))).collect();
        Self { l, w, start, weights, deconv, phase }
    }

    #[inline]
    fn idx(&self, m: usize, i: usize) -> usize {
        (self.start[m] + i as i64).rem_euclid(self.l as i64) as usize
    }
}

enum Inner<T: Real> {
    Direct,
    Uniform { p: usize, bins: Vec<usize>, fft: FftPair<T> },
    Nonuniform { grid: Gridding<T>, fft: FftPair<T> },
}

/// 1D plan for `F` and `F*`.
pub struct NudftPlan<T: Real> {
    freqs: Vec<f64>,
    n: usize,
    edge: usize,
    kind: PlanKind,
    inner: Inner<T>,
}

impl<T: Real> NudftPlan<T> {
    /// Plan with default accuracy and automatic path selection.
    pub fn new(freqs: &[f64], n: usize, edge: usize) -> Result<Self> {
        Self::with_options(freqs, n, edge, PlanOptions::default())
    }

    pub fn with_options(freqs: &[f64], n: usize, edge: usize, opt: PlanOptions) -> Result<Self> {
        check_n(n)?;
        check_window(n, edge)?;
        if let Some(w) = freqs.iter().find(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite frequency {w}")));
        }
        let m = freqs.len();
        let ratio = grid_ratio(freqs).filter(|r| r * n <= 1 << 22);
        let choice = match opt.choice {
            PlanChoice::Auto if m * n <= DIRECT_THRESHOLD => PlanChoice::Direct,
            PlanChoice::Auto if ratio.is_some() => PlanChoice::Uniform,
            PlanChoice::Auto => PlanChoice::Nonuniform,
            c => c,
        };
        let (kind, inner) = match choice {
            PlanChoice::Direct => (PlanKind::Direct, Inner::Direct),
            PlanChoice::Uniform => {
                let r = ratio.ok_or_else(|| Error::InvalidParameter("frequencies are not on a uniform grid".into()))?;
                let p = r * n;
                (PlanKind::Uniform { ratio: [r, 1] }, Inner::Uniform { p, bins: integer_bins(freqs, r, p), fft: FftPair::new(p) })
            }
            _ => {
                let w = opt.width.unwrap_or_else(|| width_for_accuracy(opt.accuracy));
                let l = 2 * n.next_power_of_two();
                (
                    PlanKind::Nonuniform { oversampled: l, width: w },
                    Inner::Nonuniform { grid: Gridding::new(freqs, n, l, w), fft: FftPair::new(l) },
                )
            }
        };
        Ok(Self { freqs: freqs.to_vec(), n, edge, kind, inner })
    }

    pub fn kind(&self) -> PlanKind {
        self.kind
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.freqs.len()
    }
    pub fn edge(&self) -> usize {
        self.edge
    }
    pub fn frequencies(&self) -> &[f64] {
        &self.freqs
    }

    pub fn apply(&self, gamma: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let mut out = vec![Complex::zero(); self.m()];
        self.apply_into(gamma, &mut out)?;
        Ok(out)
    }

    pub fn apply_adjoint(&self, zeta: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let mut out = vec![Complex::zero(); self.n];
        self.apply_adjoint_into(zeta, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, gamma: &[Complex<T>], out: &mut [Complex<T>]) -> Result<()> {
        let (n, e) = (self.n, self.edge);
        if gamma.len() != n {
            return Err(Error::ShapeMismatch { expected: n, got: gamma.len() });
        }
        if out.len() != self.m() {
            return Err(Error::ShapeMismatch { expected: self.m(), got: out.len() });
        }
        let scale = T::one() / T::of(n as f64).sqrt();
        match &self.inner {
            Inner::Direct => {
                for (o, &w) in out.iter_mut().zip(&self.freqs) {
                    let mut s: Complex<T> = Complex::zero();
                    for (k, g) in gamma.iter().enumerate().take(n - e).skip(e) {
                        let ph = -2.0 * PI * (w * k as f64 / n as f64).rem_euclid(1.0);
                        s += g * Complex::new(T::of(ph.cos()), T::of(ph.sin()));
                    }
                    *o = s * scale;
                }
            }
            Inner::Uniform { p, bins, fft } => {
                let mut buf = vec![Complex::zero(); *p];
                buf[e..n - e].copy_from_slice(&gamma[e..n - e]);
                fft.fwd.process(&mut buf);
                for (o, &b) in out.iter_mut().zip(bins) {
                    *o = buf[b] * scale;
                }
            }
            Inner::Nonuniform { grid, fft } => {
                let c = n / 2;
                let mut u = vec![Complex::zero(); grid.l];
                for k in e..n - e {
                    let kp = k as i64 - c as i64;
                    u[kp.rem_euclid(grid.l as i64) as usize] = gamma[k] * grid.deconv[k];
                }
                fft.fwd.process(&mut u);
                for (m, o) in out.iter_mut().enumerate() {
                    let mut s: Complex<T> = Complex::zero();
                    let ws = &grid.weights[m * grid.w..(m + 1) * grid.w];
                    for (i, &wt) in ws.iter().enumerate() {
                        s += u[grid.idx(m, i)] * wt;
                    }
                    *o = s * grid.phase[m] * scale;
                }
            }
        }
        Ok(())
    }

    pub fn apply_adjoint_into(&self, zeta: &[Complex<T>], out: &mut [Complex<T>]) -> Result<()> {
        let (n, e) = (self.n, self.edge);
        if zeta.len() != self.m() {
            return Err(Error::ShapeMismatch { expected: self.m(), got: zeta.len() });
        }
        if out.len() != n {
            return Err(Error::ShapeMismatch { expected: n, got: out.len() });
        }
        let scale = T::one() / T::of(n as f64).sqrt();
        out.iter_mut().for_each(|o| *o = Complex::zero());
        match &self.inner {
            Inner::Direct => {
                for (k, o) in out.iter_mut().enumerate().take(n - e).skip(e) {
                    let mut s: Complex<T> = Complex::zero();
                    for (z, &w) in zeta.iter().zip(&self.freqs) {
                        let ph = 2.0 * PI * (w * k as f64 / n as f64).rem_euclid(1.0);
                        s += z * Complex::new(T::of(ph.cos()), T::of(ph.sin()));
                    }
                    *o = s * scale;
                }
            }
            Inner::Uniform { p, bins, fft } => {
                let mut buf = vec![Complex::zero(); *p];
                for (z, &b) in zeta.iter().zip(bins) {
                    buf[b] += z;
                }
                fft.inv.process(&mut buf);
                for k in e..n - e {
                    out[k] = buf[k] * scale;
                }
            }
            Inner::Nonuniform { grid, fft } => {
                let c = n / 2;
                let mut u = vec![Complex::zero(); grid.l];
                for (m, z) in zeta.iter().enumerate() {
                    let v = z * grid.phase[m].conj();
                    let ws = &grid.weights[m * grid.w..(m + 1) * grid.w];
                    for (i, &wt) in ws.iter().enumerate() {
                        u[grid.idx(m, i)] += v * wt;
                    }
                }
                fft.inv.process(&mut u);
                for k in e..n - e {
                    let kp = k as i64 - c as i64;
                    out[k] = u[kp.rem_euclid(grid.l as i64) as usize] * grid.deconv[k] * scale;
                }
            }
        }
        Ok(())
    }
}

enum Inner2<T: Real> {
    Direct,
    Uniform { p: [usize; 2], bins: Vec<usize>, fft: [FftPair<T>; 2] },
    Nonuniform { grid: [Gridding<T>; 2], fft: FftPair<T> },
}

/// 2D plan over points `(ω¹_m, ω²_m)` acting on row-major `N×N` grids
/// (`k₁` the row index).
pub struct NudftPlan2d<T: Real> {
    x: Vec<f64>,
    y: Vec<f64>,
    n: usize,
    edge: usize,
    kind: PlanKind,
    inner: Inner2<T>,
}

impl<T: Real> NudftPlan2d<T> {
    pub fn new(x: &[f64], y: &[f64], n: usize, edge: usize) -> Result<Self> {
        Self::with_options(x, y, n, edge, PlanOptions::default())
    }

    pub fn with_options(x: &[f64], y: &[f64], n: usize, edge: usize, opt: PlanOptions) -> Result<Self> {
        check_n(n)?;
        check_window(n, edge)?;
        if x.len() != y.len() {
            return Err(Error::ShapeMismatch { expected: x.len(), got: y.len() });
        }
        if x.iter().chain(y).any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("non-finite frequency".into()));
        }
        let m = x.len();
        let ratio = match (grid_ratio(x), grid_ratio(y)) {
            (Some(a), Some(b)) if a * b * n * n <= 1 << 24 => Some([a, b]),
            _ => None,
        };
        let choice = match opt.choice {
            PlanChoice::Auto if m * n * n <= DIRECT_THRESHOLD => PlanChoice::Direct,
            PlanChoice::Auto if ratio.is_some() => PlanChoice::Uniform,
            PlanChoice::Auto => PlanChoice::Nonuniform,
            c => c,
        };
        let (kind, inner) = match choice {
            PlanChoice::Direct => (PlanKind::Direct, Inner2::Direct),
            PlanChoice::Uniform => {
                let r = ratio.ok_or_else(|| Error::InvalidParameter("frequencies are not on a uniform grid".into()))?;
                let p = [r[0] * n, r[1] * n];
                let b0 = integer_bins(x, r[0], p[0]);
                let b1 = integer_bins(y, r[1], p[1]);
                let bins = b0.iter().zip(&b1).map(|(i, j)| i * p[1] + j).collect();
                (PlanKind::Uniform { ratio: r }, Inner2::Uniform { p, bins, fft: [FftPair::new(p[0]), FftPair::new(p[1])] })
            }
            _ => {
                let w = opt.width.unwrap_or_else(|| width_for_accuracy(opt.accuracy));
                let l = 2 * n;
                (
                    PlanKind::Nonuniform { oversampled: l, width: w },
                    Inner2::Nonuniform { grid: [Gridding::new(x, n, l, w), Gridding::new(y, n, l, w)], fft: FftPair::new(l) },
                )
            }
        };
        Ok(Self { x: x.to_vec(), y: y.to_vec(), n, edge, kind, inner })
    }

    pub fn kind(&self) -> PlanKind {
        self.kind
    }
    pub fn m(&self) -> usize {
        self.x.len()
    }
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, gamma: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let mut out = vec![Complex::zero(); self.m()];
        self.apply_into(gamma, &mut out)?;
        Ok(out)
    }

    pub fn apply_adjoint(&self, zeta: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let mut out = vec![Complex::zero(); self.n * self.n];
        self.apply_adjoint_into(zeta, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, gamma: &[Complex<T>], out: &mut [Complex<T>]) -> Result<()> {
        let (n, e) = (self.n, self.edge);
        if gamma.len() != n * n {
            return Err(Error::ShapeMismatch { expected: n * n, got: gamma.len() });
        }
        if out.len() != self.m() {
            return Err(Error::ShapeMismatch { expected: self.m(), got: out.len() });
        }
        let scale = T::one() / T::of(n as f64);
        match &self.inner {
            Inner2::Direct => {
                for m in 0..self.m() {
                    let mut s: Complex<T> = Complex::zero();
                    for k1 in e..n - e {
                        for k2 in e..n - e {
                            let ph = -2.0 * PI * ((self.x[m] * k1 as f64 + self.y[m] * k2 as f64) / n as f64).rem_euclid(1.0);
                            s += gamma[k1 * n + k2] * Complex::new(T::of(ph.cos()), T::of(ph.sin()));
                        }
                    }
                    out[m] = s * scale;
                }
            }
            Inner2::Uniform { p, bins, fft } => {
                let mut buf = vec![Complex::zero(); p[0] * p[1]];
                for k1 in e..n - e {
                    buf[k1 * p[1] + e..k1 * p[1] + n - e].copy_from_slice(&gamma[k1 * n + e..k1 * n + n - e]);
                }
                fft_2d(&mut buf, p[0], p[1], &fft[0].fwd, &fft[1].fwd);
                for (o, &b) in out.iter_mut().zip(bins) {
                    *o = buf[b] * scale;
                }
            }
            Inner2::Nonuniform { grid, fft } => {
                let l = grid[0].l;
                let c = (n / 2) as i64;
                let mut u = vec![Complex::zero(); l * l];
                for k1 in e..n - e {
                    let r = (k1 as i64 - c).rem_euclid(l as i64) as usize;
                    for k2 in e..n - e {
                        let s = (k2 as i64 - c).rem_euclid(l as i64) as usize;
                        u[r * l + s] = gamma[k1 * n + k2] * (grid[0].deconv[k1] * grid[1].deconv[k2]);
                    }
                }
                fft_2d(&mut u, l, l, &fft.fwd, &fft.fwd);
                let (g0, g1) = (&grid[0], &grid[1]);
                for (m, o) in out.iter_mut().enumerate() {
                    let mut s: Complex<T> = Complex::zero();
                    let w0 = &g0.weights[m * g0.w..(m + 1) * g0.w];
                    let w1 = &g1.weights[m * g1.w..(m + 1) * g1.w];
                    for (i, &a) in w0.iter().enumerate() {
                        let row = g0.idx(m, i) * l;
                        let mut t: Complex<T> = Complex::zero();
                        for (j, &b) in w1.iter().enumerate() {
                            t += u[row + g1.idx(m, j)] * b;
                        }
                        s += t * a;
                    }
                    *o = s * (g0.phase[m] * g1.phase[m]) * scale;
                }
            }
        }
        Ok(())
    }

    pub fn apply_adjoint_into(&self, zeta: &[Complex<T>], out: &mut [Complex<T>]) -> Result<()> {
        let (n, e) = (self.n, self.edge);
        if zeta.len() != self.m() {
            return Err(Error::ShapeMismatch { expected: self.m(), got: zeta.len() });
        }
        if out.len() != n * n {
            return Err(Error::ShapeMismatch { expected: n * n, got: out.len() });
        }
        let scale = T::one() / T::of(n as f64);
        out.iter_mut().for_each(|o| *o = Complex::zero());
        match &self.inner {
            Inner2::Direct => {
                for k1 in e..n - e {
                    for k2 in e..n - e {
                        let mut s: Complex<T> = Complex::zero();
                        for m in 0..self.m() {
                            let ph = 2.0 * PI * ((self.x[m] * k1 as f64 + self.y[m] * k2 as f64) / n as f64).rem_euclid(1.0);
                            s += zeta[m] * Complex::new(T::of(ph.cos()), T::of(ph.sin()));
                        }
                        out[k1 * n + k2] = s * scale;
                    }
                }
            }
            Inner2::Uniform { p, bins, fft } => {
                let mut buf = vec![Complex::zero(); p[0] * p[1]];
                for (z, &b) in zeta.iter().zip(bins) {
                    buf[b] += z;
                }
                fft_2d(&mut buf, p[0], p[1], &fft[0].inv, &fft[1].inv);
                for k1 in e..n - e {
                    for k2 in e..n - e {
                        out[k1 * n + k2] = buf[k1 * p[1] + k2] * scale;
                    }
                }
            }
            Inner2::Nonuniform { grid, fft } => {
                let l = grid[0].l;
                let c = (n / 2) as i64;
                let (g0, g1) = (&grid[0], &grid[1]);
                let mut u = vec![Complex::zero(); l * l];
                for (m, z) in zeta.iter().enumerate() {
                    let v = z * (g0.phase[m] * g1.phase[m]).conj();
                    let w0 = &g0.weights[m * g0.w..(m + 1) * g0.w];
                    let w1 = &g1.weights[m * g1.w..(m + 1) * g1.w];
                    for (i, &a) in w0.iter().enumerate() {
                        let row = g0.idx(m, i) * l;
                        let va = v * a;
                        for (j, &b) in w1.iter().enumerate() {
                            u[row + g1.idx(m, j)] += va * b;
                        }
                    }
                }
                fft_2d(&mut u, l, l, &fft.inv, &fft.inv);
                for k1 in e..n - e {
                    let r = (k1 as i64 - c).rem_euclid(l as i64) as usize;
                    for k2 in e..n - e {
                        let s = (k2 as i64 - c).rem_euclid(l as i64) as usize;
                        out[k1 * n + k2] = u[r * l + s] * (g0.deconv[k1] * g1.deconv[k2]) * scale;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i0_reference_values() {
        assert_eq!(bessel_i0(0.0), 1.0);
        assert!((bessel_i0(1.0) - 1.2660658777520082).abs() < 1e-15);
        assert!((bessel_i0(10.0) - 2815.716628466254).abs() < 1e-9);
    }

    #[test]
    fn kernel_transform_matches_quadrature() {
        let kb = KaiserBessel::new(9, 2.0);
        for nu in [0.0, 0.1, 0.25] {
            let steps = 200_000;
            let h = 9.0 / steps as f64;
            let q: f64 = (0..=steps)
                .map(|i| {
                    let t = -4.5 + i as f64 * h;
                    let wt = if i == 0 || i == steps { 0.5 } else { 1.0 };
                    wt * kb.eval(t) * (2.0 * PI * nu * t).cos()
                })
                .sum::<f64>()
                * h;
            assert!((q - kb.fourier(nu)).abs() < 1e-8 * kb.fourier(0.0), "nu={nu}");
        }
    }
}

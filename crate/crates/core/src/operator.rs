//! The generalized sampling operator `G: wavelet coefficients → weighted samples`
//! and its adjoint, in three variants:
//!
//! * `OneD`: `β_m = √μ_m ⟨Σ_n α_n ψ_n, e_{ω_m}⟩` on `[0,1]`;
//! * `TwoDGeneral`: arbitrary 2D points, tensor wavelets on `[0,1]²`;
//! * `TwoDUniform`: a tensor grid of points, applied as a row sweep followed by
//!   a column sweep of the 1D scaling-level map.
//!
//! All variants go through the same per-axis building block: scaling
//! coefficients `γ` at scale `R` are mapped to
//! `Σ_{k edge} γ_k φ̂_{R,k}(ω_m) + φ̂(ω_m/N) (Fγ)_m`, with `F` the windowed NUDFT.

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nudft::{NudftPlan, NudftPlan2d, PlanOptions};
use crate::sampling::SamplingScheme;
use crate::scalar::{cast_c, Real};
use crate::scaling_fourier::{build_table_cached, cache_dir, DEFAULT_DEPTH};
use crate::wavelet::{Layout, WaveletSystem};

/// Dense assembly refuses matrices with more entries than this.
pub const DENSE_LIMIT: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    OneD,
    TwoDGeneral,
    TwoDUniform,
}

#[derive(Clone, Debug)]
pub struct OperatorOptions {
    /// Forced variant; by default 1D schemes give `OneD`, exact tensor grids
    /// `TwoDUniform` and everything else `TwoDGeneral`.
    pub variant: Option<Variant>,
    pub depth: usize,
    pub nudft: PlanOptions,
    /// Scaling table cache; defaults to `GENSAMP_CACHE_DIR`.
    pub cache: Option<PathBuf>,
    /// `Wavelet` (default) acts on wavelet coefficients, `Scaling` on scale-`R`
    /// scaling coefficients (no transform).
    pub layout: Layout,
}

impl Default for OperatorOptions {
    fn default() -> Self {
        Self { variant: None, depth: DEFAULT_DEPTH, nudft: PlanOptions::default(), cache: cache_dir(), layout: Layout::Wavelet }
    }
}

/// Per-axis data: transforms of every scale-`R` scaling function at the axis
/// frequencies, with the interior ones applied through a NUDFT plan.
struct Axis<T: Real> {
    n: usize,
    e: usize,
    freqs: Vec<f64>,
    plan: NudftPlan<T>,
    phi: Vec<Complex<T>>,
    /// `edge[j][m]` for `j < e` is column `j`, for `j ≥ e` column `N-1-(j-e)`;
    /// already scaled by `N^{-1/2}`.
    edge: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Axis<T> {
    fn new(freqs: &[f64], order: usize, n: usize, opt: &OperatorOptions) -> Result<Self> {
        let table = build_table_cached(freqs, order, n, opt.depth, opt.cache.as_deref())?;
        let e = table.left.len();
        let s = 1.0 / (n as f64).sqrt();
        let scale = |row: &Vec<Complex<f64>>| row.iter().map(|z| cast_c(z * s)).collect::<Vec<_>>();
        let edge = table.left.iter().map(scale).chain(table.right.iter().map(scale)).collect();
        Ok(Self {
            n,
            e,
            freqs: freqs.to_vec(),
            plan: NudftPlan::with_options(freqs, n, e, opt.nudft)?,
            phi: table.interior.iter().map(|&z| cast_c(z)).collect(),
            edge,
        })
    }

    fn m(&self) -> usize {
        self.freqs.len()
    }

    /// `(column, row of transforms)` for every edge function.
    fn edges(&self) -> impl Iterator<Item = (usize, &[Complex<T>])> {
        let (n, e) = (self.n, self.e);
        self.edge.iter().enumerate().map(move |(j, r)| (if j < e { j } else { n - 1 - (j - e) }, r.as_slice()))
    }

    /// `⟨φ_{R,k}, e_{ω_m}⟩`.
    fn entry(&self, k: usize, m: usize) -> Complex<T> {
        if k < self.e {
            self.edge[k][m]
        } else if k >= self.n - self.e {
            self.edge[self.e + (self.n - 1 - k)][m]
        } else {
            let ph = -2.0 * PI * (self.freqs[m] * k as f64 / self.n as f64).rem_euclid(1.0);
            self.phi[m] * cast_c::<T>(Complex::from_polar(1.0 / (self.n as f64).sqrt(), ph))
        }
    }

    /// Scaling coefficients (length `N`) to unweighted samples (length `M`).
    fn apply(&self, g: &[Complex<T>], out: &mut [Complex<T>]) -> Result<()> {
        self.plan.apply_into(g, out)?;
        for (o, p) in out.iter_mut().zip(&self.phi) {
            *o *= p;
        }
        for (k, row) in self.edges() {
            let c = g[k];
            if !c.is_zero() {
                for (o, r) in out.iter_mut().zip(row) {
                    *o += r * c;
                }
            }
        }
        Ok(())
    }

    fn adjoint(&self, z: &[Complex<T>], out: &mut [Complex<T>]) -> Result<()> {
        let tmp: Vec<Complex<T>> = z.iter().zip(&self.phi).map(|(a, p)| a * p.conj()).collect();
        self.plan.apply_adjoint_into(&tmp, out)?;
        for (k, row) in self.edges() {
            out[k] = z.iter().zip(row).map(|(a, r)| a * r.conj()).sum();
        }
        Ok(())
    }
}

/// Splits an exact row-major tensor grid into its two axes.
pub fn tensor_axes(scheme: &SamplingScheme) -> Option<(Vec<f64>, Vec<f64>)> {
    if scheme.dim != 2 || scheme.is_empty() {
        return None;
    }
    let (x, y) = (&scheme.coords[0], &scheme.coords[1]);
    let m2 = x.iter().take_while(|&&v| v == x[0]).count();
    if x.len() % m2 != 0 {
        return None;
    }
    let m1 = x.len() / m2;
    let ax1: Vec<f64> = (0..m1).map(|i| x[i * m2]).collect();
    let ax2: Vec<f64> = y[..m2].to_vec();
    for i in 0..m1 {
        for j in 0..m2 {
            if x[i * m2 + j] != ax1[i] || y[i * m2 + j] != ax2[j] {
                return None;
            }
        }
    }
    Some((ax1, ax2))
}

enum Body<T: Real> {
    OneD(Axis<T>),
    General { x: Axis<T>, y: Axis<T>, plan: NudftPlan2d<T> },
    Uniform { x: Axis<T>, y: Axis<T> },
}

/// Matrix-free `G` for one wavelet system and one sampling scheme.
pub struct GsOperator<T: Real> {
    system: WaveletSystem<T>,
    scheme: SamplingScheme,
    variant: Variant,
    layout: Layout,
    sqrt_w: Vec<T>,
    body: Body<T>,
}

impl<T: Real> GsOperator<T> {
    pub fn new(system: WaveletSystem<T>, scheme: SamplingScheme) -> Result<Self> {
        Self::with_options(system, scheme, &OperatorOptions::default())
    }

    pub fn with_options(system: WaveletSystem<T>, scheme: SamplingScheme, opt: &OperatorOptions) -> Result<Self> {
        let n = system.n();
        let order = system.order();
        if scheme.weights.len() != scheme.len() {
            return Err(Error::ShapeMismatch { expected: scheme.len(), got: scheme.weights.len() });
        }
        if let Some(w) = scheme.weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(format!("invalid weight {w}")));
        }
        let tensor = tensor_axes(&scheme);
        let variant = match (opt.variant, scheme.dim) {
            (None, 1) => Variant::OneD,
            (None, 2) if tensor.is_some() => Variant::TwoDUniform,
            (None, 2) => Variant::TwoDGeneral,
            (Some(Variant::OneD), 1) => Variant::OneD,
            (Some(v @ Variant::TwoDGeneral), 2) => v,
            (Some(Variant::TwoDUniform), 2) if tensor.is_some() => Variant::TwoDUniform,
            (Some(Variant::TwoDUniform), 2) => {
                return Err(Error::Variant("uniform 2D variant needs an exact tensor grid".into()))
            }
            (v, d) => return Err(Error::Variant(format!("variant {v:?} does not fit a {d}D scheme"))),
        };
        let body = match variant {
            Variant::OneD => Body::OneD(Axis::new(&scheme.coords[0], order, n, opt)?),
            Variant::TwoDGeneral => {
                let (cx, cy) = (&scheme.coords[0], &scheme.coords[1]);
                let x = Axis::new(cx, order, n, opt)?;
                let y = Axis::new(cy, order, n, opt)?;
                let plan = NudftPlan2d::with_options(cx, cy, n, x.e, opt.nudft)?;
                Body::General { x, y, plan }
            }
            Variant::TwoDUniform => {
                let (a1, a2) = tensor.expect("checked above");
                Body::Uniform { x: Axis::new(&a1, order, n, opt)?, y: Axis::new(&a2, order, n, opt)? }
            }
        };
        let sqrt_w = scheme.weights.iter().map(|w| T::of(w.sqrt())).collect();
        Ok(Self { system, scheme, variant, layout: opt.layout, sqrt_w, body })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }
    pub fn system(&self) -> &WaveletSystem<T> {
        &self.system
    }
    pub fn scheme(&self) -> &SamplingScheme {
        &self.scheme
    }
    pub fn layout(&self) -> Layout {
        self.layout
    }
    /// Number of samples `M`.
    pub fn rows(&self) -> usize {
        self.scheme.len()
    }
    /// Number of coefficients: `N` or `N²`.
    pub fn cols(&self) -> usize {
        let n = self.system.n();
        if self.variant == Variant::OneD {
            n
        } else {
            n * n
        }
    }

    fn to_scaling(&self, alpha: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let mut x = alpha.to_vec();
        if self.layout == Layout::Wavelet {
            if self.variant == Variant::OneD {
                let mut s = vec![Complex::zero(); x.len()];
                self.system.inverse_in_place(&mut x, &mut s)?;
            } else {
                self.system.inverse_2d_in_place(&mut x, self.system.n())?;
            }
        }
        Ok(x)
    }

    fn from_scaling(&self, mut x: Vec<Complex<T>>) -> Result<Vec<Complex<T>>> {
        if self.layout == Layout::Wavelet {
            if self.variant == Variant::OneD {
                let mut s = vec![Complex::zero(); x.len()];
                self.system.forward_in_place(&mut x, &mut s)?;
            } else {
                self.system.forward_2d_in_place(&mut x, self.system.n())?;
            }
        }
        Ok(x)
    }

    /// `β = G α`.
    pub fn forward(&self, alpha: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if alpha.len() != self.cols() {
            return Err(Error::ShapeMismatch { expected: self.cols(), got: alpha.len() });
        }
        let g = self.to_scaling(alpha)?;
        let n = self.system.n();
        let mut out = vec![Complex::zero(); self.rows()];
        match &self.body {
            Body::OneD(ax) => ax.apply(&g, &mut out)?,
            Body::General { x, y, plan } => {
                plan.apply_into(&g, &mut out)?;
                for ((o, px), py) in out.iter_mut().zip(&x.phi).zip(&y.phi) {
                    *o *= px * py;
                }
                let mut tmp = vec![Complex::zero(); self.rows()];
                for (k1, rx) in x.edges() {
                    y.apply(&g[k1 * n..(k1 + 1) * n], &mut tmp)?;
                    for ((o, t), r) in out.iter_mut().zip(&tmp).zip(rx) {
                        *o += t * r;
                    }
                }
                let mut col = vec![Complex::zero(); n];
                for (k2, ry) in y.edges() {
                    for (k1, c) in col.iter_mut().enumerate() {
                        *c = g[k1 * n + k2];
                    }
                    x.plan.apply_into(&col, &mut tmp)?;
                    for (((o, t), r), p) in out.iter_mut().zip(&tmp).zip(ry).zip(&x.phi) {
                        *o += t * r * p;
                    }
                }
            }
            Body::Uniform { x, y } => {
                let (m1, m2) = (x.m(), y.m());
                // rows: N × M₂
                let mut inter = vec![Complex::zero(); n * m2];
                inter
                    .par_chunks_mut(m2)
                    .zip(g.par_chunks(n))
                    .try_for_each(|(dst, src)| y.apply(src, dst))?;
                // columns: M₁ × M₂, computed column-wise into a transposed buffer
                let mut cols = vec![Complex::zero(); m2 * m1];
                cols.par_chunks_mut(m1).enumerate().try_for_each(|(j, dst)| {
                    let src: Vec<Complex<T>> = (0..n).map(|k| inter[k * m2 + j]).collect();
                    x.apply(&src, dst)
                })?;
                for i in 0..m1 {
                    for j in 0..m2 {
                        out[i * m2 + j] = cols[j * m1 + i];
                    }
                }
            }
        }
        for (o, w) in out.iter_mut().zip(&self.sqrt_w) {
            *o = *o * *w;
        }
        Ok(out)
    }

    /// `α = G* ζ`.
    pub fn adjoint(&self, zeta: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if zeta.len() != self.rows() {
            return Err(Error::ShapeMismatch { expected: self.rows(), got: zeta.len() });
        }
        let z: Vec<Complex<T>> = zeta.iter().zip(&self.sqrt_w).map(|(a, w)| a * *w).collect();
        let n = self.system.n();
        let mut g = vec![Complex::zero(); self.cols()];
        match &self.body {
            Body::OneD(ax) => ax.adjoint(&z, &mut g)?,
            Body::General { x, y, plan } => {
                let t: Vec<Complex<T>> =
                    z.iter().zip(&x.phi).zip(&y.phi).map(|((a, px), py)| a * (px * py).conj()).collect();
                plan.apply_adjoint_into(&t, &mut g)?;
                let mut row = vec![Complex::zero(); n];
                for (k1, rx) in x.edges() {
                    let t: Vec<Complex<T>> = z.iter().zip(rx).map(|(a, r)| a * r.conj()).collect();
                    y.adjoint(&t, &mut row)?;
                    g[k1 * n..(k1 + 1) * n].copy_from_slice(&row);
                }
                let e = x.e;
                for (k2, ry) in y.edges() {
                    let t: Vec<Complex<T>> =
                        z.iter().zip(ry).zip(&x.phi).map(|((a, r), p)| a * (r * p).conj()).collect();
                    x.plan.apply_adjoint_into(&t, &mut row)?;
                    for k1 in e..n - e {
                        g[k1 * n + k2] = row[k1];
                    }
                }
            }
            Body::Uniform { x, y } => {
                let (m1, m2) = (x.m(), y.m());
                // columns: M₂ × N (transposed)
                let mut inter = vec![Complex::zero(); m2 * n];
                inter.par_chunks_mut(n).enumerate().try_for_each(|(j, dst)| {
                    let src: Vec<Complex<T>> = (0..m1).map(|i| z[i * m2 + j]).collect();
                    x.adjoint(&src, dst)
                })?;
                g.par_chunks_mut(n).enumerate().try_for_each(|(k1, dst)| {
                    let src: Vec<Complex<T>> = (0..m2).map(|j| inter[j * n + k1]).collect();
                    y.adjoint(&src, dst)
                })?;
            }
        }
        self.from_scaling(g)
    }

    /// Explicit matrix of `G` (row-major `M × cols`) for small instances.
    pub fn assemble_dense(&self) -> Result<DenseMatrix<T>> {
        let (rows, cols) = (self.rows(), self.cols());
        if rows.saturating_mul(cols) > DENSE_LIMIT {
            return Err(Error::SizeGuard { rows, cols });
        }
        let n = self.system.n();
        // S: transforms of scale-R scaling functions
        let mut s = vec![Complex::zero(); rows * cols];
        match &self.body {
            Body::OneD(ax) => {
                for m in 0..rows {
                    for k in 0..n {
                        s[m * cols + k] = ax.entry(k, m) * self.sqrt_w[m];
                    }
                }
            }
            Body::General { x, y, .. } => {
                for m in 0..rows {
                    for k1 in 0..n {
                        let a = x.entry(k1, m) * self.sqrt_w[m];
                        for k2 in 0..n {
                            s[m * cols + k1 * n + k2] = a * y.entry(k2, m);
                        }
                    }
                }
            }
            Body::Uniform { x, y } => {
                let m2 = y.m();
                for m in 0..rows {
                    let (i, j) = (m / m2, m % m2);
                    for k1 in 0..n {
                        let a = x.entry(k1, i) * self.sqrt_w[m];
                        for k2 in 0..n {
                            s[m * cols + k1 * n + k2] = a * y.entry(k2, j);
                        }
                    }
                }
            }
        }
        if self.layout == Layout::Scaling {
            return Ok(DenseMatrix { rows, cols, data: s });
        }
        // W: column c is the scaling expansion of basis function c
        let mut w = vec![Complex::zero(); cols * cols];
        for c in 0..cols {
            let mut unit = vec![Complex::zero(); cols];
            unit[c] = Complex::new(T::one(), T::zero());
            let col = self.to_scaling(&unit)?;
            for (k, v) in col.into_iter().enumerate() {
                w[k * cols + c] = v;
            }
        }
        let data: Vec<Complex<T>> = (0..rows)
            .into_par_iter()
            .flat_map_iter(|m| {
                let srow = &s[m * cols..(m + 1) * cols];
                let mut out = vec![Complex::zero(); cols];
                for (k, sv) in srow.iter().enumerate() {
                    if sv.is_zero() {
                        continue;
                    }
                    for (o, wv) in out.iter_mut().zip(&w[k * cols..(k + 1) * cols]) {
                        *o += sv * wv;
                    }
                }
                out
            })
            .collect();
        Ok(DenseMatrix { rows, cols, data })
    }
}

/// Row-major complex matrix.
#[derive(Clone, Debug)]
pub struct DenseMatrix<T: Real> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.cols + c]
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.data.chunks_exact(self.cols).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn adjoint_matvec(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::zero(); self.cols];
        for (row, v) in self.data.chunks_exact(self.cols).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * v;
            }
        }
        out
    }
}

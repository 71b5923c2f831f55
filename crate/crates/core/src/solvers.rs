//! Least squares (LSQR), ℓ¹-penalized recovery (FISTA), extremal singular
//! values (power iteration, Lanczos) and stable sampling rate search.

use std::time::Instant;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{DenseMatrix, GsOperator};
use crate::sampling::SamplingScheme;
use crate::scalar::{norm, Real};
use crate::wavelet::WaveletSystem;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Anything with a forward map and its adjoint.
pub trait LinearOperator<T: Real>: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>>;
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Result<Vec<Complex<T>>>;
}

impl<T: Real> LinearOperator<T> for GsOperator<T> {
    fn rows(&self) -> usize {
        GsOperator::rows(self)
    }
    fn cols(&self) -> usize {
        GsOperator::cols(self)
    }
    fn apply(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.forward(x)
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.adjoint(y)
    }
}

impl<T: Real> LinearOperator<T> for DenseMatrix<T> {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn apply(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if x.len() != self.cols {
            return Err(Error::ShapeMismatch { expected: self.cols, got: x.len() });
        }
        Ok(self.matvec(x))
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if y.len() != self.rows {
            return Err(Error::ShapeMismatch { expected: self.rows, got: y.len() });
        }
        Ok(self.adjoint_matvec(y))
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport<T: Real> {
    pub solution: Vec<Complex<T>>,
    pub iterations: usize,
    /// `‖Gx − b‖/‖b‖`, recomputed from the returned solution.
    pub relative_residual: f64,
    pub converged: bool,
    pub seconds: f64,
    /// Per-iteration residual estimates (LSQR) or objective values (FISTA).
    pub history: Vec<f64>,
}

fn nrm<T: Real>(v: &[Complex<T>]) -> f64 {
    norm(v).to_f64()
}

fn scale<T: Real>(v: &mut [Complex<T>], s: f64) {
    let s = T::of(s);
    v.iter_mut().for_each(|z| *z = *z * s);
}

fn residual<T: Real>(op: &dyn LinearOperator<T>, x: &[Complex<T>], b: &[Complex<T>]) -> Result<f64> {
    let r: Vec<Complex<T>> = op.apply(x)?.iter().zip(b).map(|(a, c)| a - c).collect();
    Ok(nrm(&r) / nrm(b).max(f64::MIN_POSITIVE))
}

fn check_rhs<T: Real>(op: &dyn LinearOperator<T>, b: &[Complex<T>]) -> Result<()> {
    if b.len() != op.rows() {
        Err(Error::ShapeMismatch { expected: op.rows(), got: b.len() })
    } else {
        Ok(())
    }
}

/// LSQR for `min ‖Gx − b‖₂`. Stops when `‖G*(Gx − b)‖ ≤ tol·‖G*b‖`, when the
/// residual itself drops below `tol·‖b‖`, or after `max_iter` iterations.
pub fn lsqr<T: Real>(op: &dyn LinearOperator<T>, b: &[Complex<T>], tol: f64, max_iter: usize) -> Result<SolveReport<T>> {
    check_rhs(op, b)?;
    let t0 = Instant::now();
    let n = op.cols();
    let mut x = vec![Complex::<T>::zero(); n];
    let beta1 = nrm(b);
    let done = |x: Vec<Complex<T>>, it: usize, conv: bool, hist: Vec<f64>| -> Result<SolveReport<T>> {
        let relative_residual = if beta1 == 0.0 { 0.0 } else { residual(op, &x, b)? };
        Ok(SolveReport { solution: x, iterations: it, relative_residual, converged: conv, seconds: t0.elapsed().as_secs_f64(), history: hist })
    };
    if beta1 == 0.0 {
        return done(x, 0, true, vec![0.0]);
    }
    let mut u = b.to_vec();
    scale(&mut u, 1.0 / beta1);
    let mut v = op.apply_adjoint(&u)?;
    let mut alpha = nrm(&v);
    let mut hist = vec![beta1];
    if alpha == 0.0 {
        return done(x, 0, true, hist);
    }
    scale(&mut v, 1.0 / alpha);
    let normal0 = alpha * beta1;
    let mut w = v.clone();
    let (mut phibar, mut rhobar) = (beta1, alpha);
    for it in 1..=max_iter {
        let av = op.apply(&v)?;
        for (ui, a) in u.iter_mut().zip(&av) {
            *ui = a - *ui * T::of(alpha);
        }
        let beta = nrm(&u);
        if beta > 0.0 {
            scale(&mut u, 1.0 / beta);
            let au = op.apply_adjoint(&u)?;
            for (vi, a) in v.iter_mut().zip(&au) {
                *vi = a - *vi * T::of(beta);
            }
            alpha = nrm(&v);
            if alpha > 0.0 {
                scale(&mut v, 1.0 / alpha);
            }
        } else {
            alpha = 0.0;
        }
        let rho = rhobar.hypot(beta);
        let (c, s) = (rhobar / rho, beta / rho);
        let theta = s * alpha;
        rhobar = -c * alpha;
        let phi = c * phibar;
        phibar *= s;
        let (f1, f2) = (T::of(phi / rho), T::of(theta / rho));
        for ((xi, wi), vi) in x.iter_mut().zip(w.iter_mut()).zip(&v) {
            *xi += *wi * f1;
            *wi = vi - *wi * f2;
        }
        hist.push(phibar);
        let normal = phibar * alpha * c.abs();
        if normal <= tol * normal0 || phibar <= tol * beta1 || alpha == 0.0 || beta == 0.0 {
            return done(x, it, true, hist);
        }
    }
    log::warn!("lsqr: no convergence in {max_iter} iterations");
    done(x, max_iter, false, hist)
}

/// Complex soft thresholding.
fn shrink<T: Real>(z: Complex<T>, t: T) -> Complex<T> {
    let a = z.norm();
    if a <= t {
        Complex::zero()
    } else {
        z * ((a - t) / a)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FistaOptions {
    pub lambda: f64,
    pub max_iter: usize,
    /// Relative step size `‖x_{k+1} − x_k‖/‖x_{k+1}‖` at which to stop.
    pub tol: f64,
    /// Upper bound for `σ_max²`; estimated by power iteration when absent.
    pub lipschitz: Option<f64>,
}

impl FistaOptions {
    pub fn new(lambda: f64) -> Self {
        Self { lambda, max_iter: 500, tol: 1e-8, lipschitz: None }
    }
}

/// Proximal gradient with momentum for `min ½‖Gα − b‖² + λ‖α‖₁`. A step that
/// would increase the objective is discarded and momentum restarted, so the
/// recorded objective never increases.
pub fn fista_l1<T: Real>(op: &dyn LinearOperator<T>, b: &[Complex<T>], opt: FistaOptions) -> Result<SolveReport<T>> {
    check_rhs(op, b)?;
    if !(opt.lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("λ must be positive, got {}", opt.lambda)));
    }
    let t0 = Instant::now();
    let lip = match opt.lipschitz {
        Some(l) => l,
        None => 1.01 * power_iteration(op, 200, 1e-6, 7)?.0.powi(2),
    };
    if !(lip > 0.0) {
        return Err(Error::Singular("operator is zero".into()));
    }
    let step = T::of(1.0 / lip);
    let thresh = T::of(opt.lambda / lip);
    let lam = opt.lambda;
    let objective = |x: &[Complex<T>]| -> Result<f64> {
        let r: Vec<Complex<T>> = op.apply(x)?.iter().zip(b).map(|(a, c)| a - c).collect();
        let l1: f64 = x.iter().map(|z| z.norm().to_f64()).sum();
        Ok(0.5 * nrm(&r).powi(2) + lam * l1)
    };
    let n = op.cols();
    let mut x = vec![Complex::<T>::zero(); n];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut fx = objective(&x)?;
    let mut hist = vec![fx];
    let mut converged = false;
    let mut it = 0;
    let mut restarted = false;
    while it < opt.max_iter {
        it += 1;
        let r: Vec<Complex<T>> = op.apply(&y)?.iter().zip(b).map(|(a, c)| a - c).collect();
        let g = op.apply_adjoint(&r)?;
        let xn: Vec<Complex<T>> = y.iter().zip(&g).map(|(yi, gi)| shrink(*yi - *gi * step, thresh)).collect();
        let fxn = objective(&xn)?;
        if fxn > fx && !restarted {
            // restart from the last accepted iterate without momentum
            y.clone_from(&x);
            t = 1.0;
            restarted = true;
            continue;
        }
        restarted = false;
        let dx: Vec<Complex<T>> = xn.iter().zip(&x).map(|(a, c)| a - c).collect();
        let (ndx, nx) = (nrm(&dx), nrm(&xn));
        let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let mom = T::of((t - 1.0) / tn);
        y = xn.iter().zip(&dx).map(|(a, d)| a + *d * mom).collect();
        x = xn;
        t = tn;
        fx = fx.min(fxn);
        hist.push(fx);
        if ndx <= opt.tol * nx.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    let bn = nrm(b);
    let relative_residual = if bn == 0.0 { 0.0 } else { residual(op, &x, b)? };
    Ok(SolveReport { solution: x, iterations: it, relative_residual, converged, seconds: t0.elapsed().as_secs_f64(), history: hist })
}

/// Smallest `λ` on a geometric grid whose FISTA solution has `‖Gα − b‖ ≥ δ`,
/// i.e. the discrepancy principle for noise level `δ`.
pub fn fista_discrepancy<T: Real>(
    op: &dyn LinearOperator<T>,
    b: &[Complex<T>],
    delta: f64,
    max_iter: usize,
) -> Result<(f64, SolveReport<T>)> {
    let lmax = op.apply_adjoint(b)?.iter().map(|z| z.norm().to_f64()).fold(0.0, f64::max);
    if lmax == 0.0 {
        return Err(Error::InvalidParameter("zero right-hand side".into()));
    }
    let lip = 1.01 * power_iteration(op, 200, 1e-6, 7)?.0.powi(2);
    let bn = nrm(b);
    let mut lam = lmax * 1e-6;
    let mut best = None;
    while lam < lmax {
        let rep = fista_l1(op, b, FistaOptions { lambda: lam, max_iter, tol: 1e-8, lipschitz: Some(lip) })?;
        let res = rep.relative_residual * bn;
        best = Some((lam, rep));
        if res >= delta {
            break;
        }
        lam *= 2.0;
    }
    best.ok_or_else(|| Error::SearchExhausted("no λ tried".into()))
}

fn random_unit<T: Real>(n: usize, seed: u64) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex<T>> =
        (0..n).map(|_| Complex::new(T::of(rng.random_range(-1.0..1.0)), T::of(rng.random_range(-1.0..1.0)))).collect();
    let s = nrm(&v);
    scale(&mut v, 1.0 / s);
    v
}

/// `σ_max` by power iteration on `G*G`; returns `(σ_max, iterations)`.
pub fn power_iteration<T: Real>(op: &dyn LinearOperator<T>, max_iter: usize, tol: f64, seed: u64) -> Result<(f64, usize)> {
    let mut v = random_unit::<T>(op.cols(), seed);
    let mut lam = 0.0;
    for it in 1..=max_iter {
        let mut w = op.apply_adjoint(&op.apply(&v)?)?;
        let l = nrm(&w);
        if l == 0.0 {
            return Ok((0.0, it));
        }
        scale(&mut w, 1.0 / l);
        v = w;
        if (l - lam).abs() <= tol * l {
            return Ok((l.sqrt(), it));
        }
        lam = l;
    }
    Ok((lam.sqrt(), max_iter))
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityEstimate {
    pub n: usize,
    pub m: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `D_{N,M} ≈ 1/σ_min`.
    pub condition: f64,
    pub iterations: usize,
}

/// Extremal singular values from Lanczos on `G*G` with full
/// reorthogonalization, run until both extreme Ritz pairs have residual below
/// `1e-10·σ_max²`, the Krylov space is exhausted, or `max_steps` is reached.
pub fn estimate_extremal_singular_values<T: Real>(op: &dyn LinearOperator<T>, max_steps: usize) -> Result<StabilityEstimate> {
    let n = op.cols();
    let kmax = max_steps.clamp(1, n);
    let mut basis: Vec<Vec<Complex<T>>> = vec![random_unit::<T>(n, 13)];
    let (mut alphas, mut betas) = (Vec::<f64>::new(), Vec::<f64>::new());
    let mut extremes = (0.0, 0.0);
    let dot = |a: &[Complex<T>], b: &[Complex<T>]| -> Complex<f64> {
        let z: Complex<T> = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
        Complex::new(z.re.to_f64(), z.im.to_f64())
    };
    for k in 1..=kmax {
        let q = &basis[k - 1];
        let mut w = op.apply_adjoint(&op.apply(q)?)?;
        alphas.push(dot(&w, q).re);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                let c = Complex::new(T::of(c.re), T::of(c.im));
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= vi * c;
                }
            }
        }
        let beta = nrm(&w);
        let tri = nalgebra::DMatrix::<f64>::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let eig = nalgebra::SymmetricEigen::new(tri);
        let (imin, imax) = (eig.eigenvalues.imin(), eig.eigenvalues.imax());
        let (lmin, lmax) = (eig.eigenvalues[imin], eig.eigenvalues[imax]);
        extremes = (lmin, lmax);
        let bound = |i: usize| beta * eig.eigenvectors[(k - 1, i)].abs();
        let exhausted = beta <= 1e-13 * lmax.abs().max(f64::MIN_POSITIVE);
        let converged = bound(imin) <= 1e-10 * lmax && bound(imax) <= 1e-10 * lmax;
        if exhausted || converged || k == kmax {
            if k == kmax && !(exhausted || converged) {
                log::warn!("lanczos: extreme Ritz values not converged after {k} steps");
            }
            return finish(n, op.rows(), extremes, k);
        }
        betas.push(beta);
        scale(&mut w, 1.0 / beta);
        basis.push(w);
    }
    finish(n, op.rows(), extremes, kmax)
}

fn finish(n: usize, m: usize, (lmin, lmax): (f64, f64), iterations: usize) -> Result<StabilityEstimate> {
    if !(lmax > 0.0) {
        return Err(Error::Singular("operator is zero".into()));
    }
    let smax = lmax.sqrt();
    let smin = lmin.max(0.0).sqrt();
    if smin <= 1e-7 * smax {
        return Err(Error::Singular(format!("σ_min {smin:.3e} negligible against σ_max {smax:.3e}")));
    }
    Ok(StabilityEstimate { n, m, sigma_min: smin, sigma_max: smax, condition: 1.0 / smin, iterations })
}

#[derive(Clone, Debug, Serialize)]
pub struct SsrRow {
    pub n: usize,
    /// Smallest scheme parameter (`M` or `K`) meeting the bound.
    pub param: usize,
    pub m: usize,
    pub sigma_min: f64,
    pub condition: f64,
}

/// For every `N`, the smallest integer parameter `p ∈ [lo(N), hi(N)]` whose
/// scheme `family(p)` yields `1/σ_min ≤ θ`, by bisection (monotone in `p`).
pub fn stable_sampling_rate_scan(
    order: usize,
    ns: &[usize],
    theta: f64,
    family: &dyn Fn(usize) -> Result<SamplingScheme>,
    bounds: &dyn Fn(usize) -> (usize, usize),
) -> Result<Vec<SsrRow>> {
    if theta < 1.0 {
        return Err(Error::SearchExhausted(format!("θ = {theta} is below 1 and cannot be attained")));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        let system = WaveletSystem::<f64>::new(order, n.trailing_zeros())?;
        let eval = |p: usize| -> Result<(StabilityEstimate, usize)> {
            let scheme = family(p)?;
            let m = scheme.len();
            let op = GsOperator::new(system.clone(), scheme)?;
            Ok((estimate_extremal_singular_values(&op, 400)?, m))
        };
        let ok = |p: usize| -> Result<Option<(StabilityEstimate, usize)>> {
            match eval(p) {
                Ok((s, m)) if s.condition <= theta => Ok(Some((s, m))),
                Ok(_) | Err(Error::Singular(_)) => Ok(None),
                Err(e) => Err(e),
            }
        };
        let (mut lo, mut hi) = bounds(n);
        let mut best = ok(hi)?.ok_or_else(|| {
            Error::SearchExhausted(format!("N = {n}: parameter {hi} still exceeds θ = {theta}"))
        })?;
        let mut best_p = hi;
        if let Some(r) = ok(lo)? {
            best = r;
            best_p = lo;
        } else {
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                match ok(mid)? {
                    Some(r) => {
                        best = r;
                        best_p = mid;
                        hi = mid;
                    }
                    None => lo = mid,
                }
            }
        }
        log::info!("ssr: N = {n}, parameter {best_p}, 1/σ_min = {:.4}", best.0.condition);
        rows.push(SsrRow { n, param: best_p, m: best.1, sigma_min: best.0.sigma_min, condition: best.0.condition });
    }
    Ok(rows)
}

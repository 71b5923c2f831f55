//! Fourier transforms of the interior and edge scaling functions.
//!
//! Interior: `φ̂(ξ) = Π_{j≥1} m₀(2^{-j}ξ)` with `m₀(ξ) = 2^{-1/2} Σ h_n e^{-2πinξ}`.
//!
//! Edge: with `EdgeU = H/√2` and `EdgeV = h⁰/√2` the left-edge vector
//! `v₁(ξ) = (φ̂⁰_0(ξ), …, φ̂⁰_{a-1}(ξ))` obeys `v₁(ξ) = EdgeU v₁(ξ/2) + EdgeV v₂(ξ/2)`
//! where `v₂(η)_t = φ̂(η) e^{-2πi(a+t)η}`, `t = 0..2a-1`. Unrolling `depth` times and
//! replacing `v₁(ξ/2^depth)` by `v₁(0)` gives the basic approximation. Both the
//! interior product and the edge recursion here start instead from a short
//! Taylor series at 0 (exact derivatives from the moments and the two-scale
//! relations), so the truncation error drops from `O(2^{-depth}|ξ|)` to roundoff.
//!
//! The right edge runs the same recursion with the reflected filters; a table
//! entry for the right edge is `φ̂¹_k(ω/N)·e^{-2πiω}`, the factor accounting for
//! the shift of `φ¹_k(N· - N)` to the right end of `[0,1]`.

use std::f64::consts::{PI, SQRT_2};
use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::wavelet::{cdv, load_filters, EdgeFilters, FilterBank};

type C = Complex<f64>;

pub const DEFAULT_DEPTH: usize = 52;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn check_depth(depth: usize) -> Result<()> {
    if depth == 0 || depth > 1000 {
        Err(Error::InvalidParameter(format!("iteration depth {depth} outside 1..=1000")))
    } else {
        Ok(())
    }
}

/// Lowpass symbol of a filter indexed from `n0`.
fn m0(h: &[f64], n0: i64, xi: f64) -> C {
    let mut s = C::new(0.0, 0.0);
    for (i, &hn) in h.iter().enumerate() {
        let n = (n0 + i as i64) as f64;
        s += C::from_polar(hn, -2.0 * PI * n * xi);
    }
    s / SQRT_2
}

fn n0_of(h: &[f64]) -> i64 {
    1 - (h.len() / 2) as i64
}

/// Terms kept in the Taylor expansion that replaces the product tail.
const TAIL_TERMS: usize = 6;

fn horner(coef: &[C], x: f64) -> C {
    coef.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// Interior transform evaluator. The product is cut after `depth` factors and
/// the remainder `φ̂(ξ/2^depth)` is taken from the Taylor series of `φ̂` at 0,
/// whose coefficients are `(-2πi)^n μ_n / n!`.
struct PhiEval {
    h: Vec<f64>,
    taylor: Vec<C>,
}

impl PhiEval {
    fn new(h: &[f64]) -> Self {
        let mu = cdv::moments_upto(h, TAIL_TERMS);
        let mut fact = 1.0;
        let taylor = mu
            .iter()
            .enumerate()
            .map(|(n, &m)| {
                if n > 0 {
                    fact *= n as f64;
                }
                C::new(0.0, -2.0 * PI).powu(n as u32) * (m / fact)
            })
            .collect();
        Self { h: h.to_vec(), taylor }
    }

    /// `tail[i] ≈ φ̂(ξ/2^i)` for `i = 0..=depth`.
    fn tail(&self, xi: f64, depth: usize) -> Vec<C> {
        let n0 = n0_of(&self.h);
        let mut tail = vec![C::new(0.0, 0.0); depth + 1];
        tail[depth] = horner(&self.taylor, xi / 2f64.powi(depth as i32));
        for i in (0..depth).rev() {
            tail[i] = tail[i + 1] * m0(&self.h, n0, xi / 2f64.powi(i as i32 + 1));
        }
        tail
    }
}

/// Interior transform of a lowpass filter `h_n`, `n = 1-a ..= a`, from
/// `Π_{j=1}^{depth} m₀(2^{-j}ξ)` and the Taylor tail.
pub fn phi_hat_with(h: &[f64], xi: f64, depth: usize) -> Result<C> {
    check_depth(depth)?;
    Ok(PhiEval::new(h).tail(xi, depth)[0])
}

/// Interior scaling function transform for bundled order `a`.
pub fn internal_phi_hat(xi: f64, order: usize, depth: usize) -> Result<C> {
    let bank = load_filters(order)?;
    phi_hat_with(&bank.lowpass, xi, depth)
}

/// Edge refinement matrices `(EdgeU, EdgeV)` of one side.
pub fn edge_matrices(a: usize, e: &EdgeFilters<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let w = 2 * a - 1;
    let u = DMatrix::from_row_slice(a, a, &e.scaling_edge) / SQRT_2;
    let v = DMatrix::from_row_slice(a, w, &e.scaling_interior) / SQRT_2;
    (u, v)
}

fn side_filters(bank: &FilterBank<f64>, side: Side) -> (Vec<f64>, &EdgeFilters<f64>) {
    match side {
        Side::Left => (bank.lowpass.clone(), &bank.left),
        Side::Right => (bank.lowpass.iter().rev().copied().collect(), &bank.right),
    }
}

/// `v₁(0)` from `(I - EdgeU) v₁(0) = EdgeV·1`.
pub fn edge_dc_solve_with(a: usize, e: &EdgeFilters<f64>) -> Result<Vec<f64>> {
    let (u, v) = edge_matrices(a, e);
    let lhs = DMatrix::identity(a, a) - &u;
    let rhs = &v * DVector::from_element(2 * a - 1, 1.0);
    let svd = lhs.clone().svd(false, false);
    let cond = svd.singular_values.max() / svd.singular_values.min();
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::Singular(format!("edge fixed-point system, condition {cond:e}")));
    }
    let x = lhs.lu().solve(&rhs).ok_or_else(|| Error::Singular("edge fixed-point system".into()))?;
    Ok(x.iter().copied().collect())
}

pub fn edge_dc_solve(order: usize, side: Side) -> Result<Vec<f64>> {
    let bank = load_filters(order)?;
    if bank.edge_count() == 0 {
        return Ok(vec![]);
    }
    let (_, e) = side_filters(&bank, side);
    edge_dc_solve_with(order, e)
}

/// Precomputed per-side data for repeated edge evaluations.
struct EdgeEval {
    a: usize,
    phi: PhiEval,
    u: Vec<f64>,
    v: Vec<f64>,
    /// `taylor[n][k] = (d/dξ)^n φ̂⁰_k(0) / n!`.
    taylor: Vec<Vec<C>>,
}

impl EdgeEval {
    fn new(bank: &FilterBank<f64>, side: Side) -> Result<Self> {
        let a = bank.order;
        let w = 2 * a - 1;
        let (h, e) = side_filters(bank, side);
        let (u, v) = edge_matrices(a, e);
        let phi = PhiEval::new(&h);
        let dc = edge_dc_solve_with(a, e)?;
        // Differentiating v₁(ξ) = U v₁(ξ/2) + V v₂(ξ/2) n times at 0:
        // (I - 2^{-n} U) c_n = 2^{-n} V d_n, with c_n, d_n the Taylor coefficients of v₁, v₂.
        let mut taylor = vec![dc.iter().map(|&x| C::new(x, 0.0)).collect::<Vec<C>>()];
        for n in 1..TAIL_TERMS {
            let sc = 2f64.powi(-(n as i32));
            let d: Vec<C> = (0..w)
                .map(|t| {
                    let z = C::new(0.0, -2.0 * PI * (a + t) as f64);
                    // product of the series of φ̂ and e^{zξ}
                    let mut fact = 1.0;
                    (0..=n)
                        .map(|r| {
                            if r > 0 {
                                fact *= r as f64;
                            }
                            phi.taylor[n - r] * z.powu(r as u32) / fact
                        })
                        .sum()
                })
                .collect();
            let lhs = DMatrix::identity(a, a) - &u * sc;
            let lu = lhs.lu();
            let rhs_re = DVector::from_fn(a, |k, _| (0..w).map(|t| v[(k, t)] * d[t].re).sum::<f64>() * sc);
            let rhs_im = DVector::from_fn(a, |k, _| (0..w).map(|t| v[(k, t)] * d[t].im).sum::<f64>() * sc);
            let re = lu.solve(&rhs_re).ok_or_else(|| Error::Singular("edge Taylor system".into()))?;
            let im = lu.solve(&rhs_im).ok_or_else(|| Error::Singular("edge Taylor system".into()))?;
            taylor.push((0..a).map(|k| C::new(re[k], im[k])).collect());
        }
        let rm = |m: &DMatrix<f64>| {
            let mut out = Vec::with_capacity(m.len());
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    out.push(m[(r, c)]);
                }
            }
            out
        };
        Ok(Self { a, phi, u: rm(&u), v: rm(&v), taylor })
    }

    /// `(φ̂(ξ), v₁(ξ))` for this side's filter.
    fn eval(&self, xi: f64, depth: usize) -> (C, Vec<C>) {
        let a = self.a;
        let w = 2 * a - 1;
        let tail = self.phi.tail(xi, depth);
        let small = xi / 2f64.powi(depth as i32);
        let mut r: Vec<C> = (0..a)
            .map(|k| self.taylor.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * small + c[k]))
            .collect();
        let mut next = vec![C::new(0.0, 0.0); a];
        let mut v2 = vec![C::new(0.0, 0.0); w];
        for l in (0..depth).rev() {
            let eta = xi / 2f64.powi(l as i32 + 1);
            let ph = tail[l + 1];
            for (t, slot) in v2.iter_mut().enumerate() {
                *slot = ph * C::from_polar(1.0, -2.0 * PI * (a + t) as f64 * eta);
            }
            for k in 0..a {
                let mut s = C::new(0.0, 0.0);
                for j in 0..a {
                    s += r[j] * self.u[k * a + j];
                }
                for t in 0..=(2 * k).min(w - 1) {
                    s += v2[t] * self.v[k * w + t];
                }
                next[k] = s;
            }
            std::mem::swap(&mut r, &mut next);
        }
        (tail[0], r)
    }
}

/// `v₁(ξ)` for the given side. For the right side this is the transform of the
/// reflected-frame edge function `φ♭⁰_k`, so `φ̂¹_k(ξ) = conj(result_k)`.
pub fn edge_phi_hat(xi: f64, order: usize, side: Side, depth: usize) -> Result<Vec<C>> {
    check_depth(depth)?;
    let bank = load_filters(order)?;
    if bank.edge_count() == 0 {
        return Ok(vec![]);
    }
    Ok(EdgeEval::new(&bank, side)?.eval(xi, depth).1)
}

/// Transforms of the three kinds of scaling functions at `ω_m/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFourierTable {
    pub order: usize,
    pub n: usize,
    pub depth: usize,
    pub freqs: Vec<f64>,
    /// `φ̂(ω_m/N)`.
    pub interior: Vec<C>,
    /// `left[k][m] = φ̂⁰_k(ω_m/N)`.
    pub left: Vec<Vec<C>>,
    /// `right[k][m] = φ̂¹_k(ω_m/N) e^{-2πiω_m}`.
    pub right: Vec<Vec<C>>,
}

pub fn build_table(freqs: &[f64], order: usize, n: usize, depth: usize) -> Result<ScalingFourierTable> {
    check_depth(depth)?;
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if let Some(bad) = freqs.iter().find(|w| !w.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite frequency {bad}")));
    }
    let bank = load_filters(order)?;
    let e = bank.edge_count();
    let nf = n as f64;
    let (interior, left, right) = if e == 0 {
        let vals: Vec<C> = freqs
            .par_iter()
            .map(|&w| phi_hat_with(&bank.lowpass, w / nf, depth).expect("depth checked"))
            .collect();
        (vals, vec![], vec![])
    } else {
        let le = EdgeEval::new(&bank, Side::Left)?;
        let re = EdgeEval::new(&bank, Side::Right)?;
        let rows: Vec<(C, Vec<C>, Vec<C>)> = freqs
            .par_iter()
            .map(|&w| {
                let xi = w / nf;
                let (ph, l) = le.eval(xi, depth);
                let (_, r) = re.eval(xi, depth);
                let shift = C::from_polar(1.0, -2.0 * PI * w.rem_euclid(1.0));
                (ph, l, r.into_iter().map(|z| z.conj() * shift).collect())
            })
            .collect();
        let mut left = vec![Vec::with_capacity(freqs.len()); e];
        let mut right = vec![Vec::with_capacity(freqs.len()); e];
        let mut interior = Vec::with_capacity(freqs.len());
        for (ph, l, r) in rows {
            interior.push(ph);
            for k in 0..e {
                left[k].push(l[k]);
                right[k].push(r[k]);
            }
        }
        (interior, left, right)
    };
    Ok(ScalingFourierTable { order, n, depth, freqs: freqs.to_vec(), interior, left, right })
}

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    order: usize,
    n: usize,
    depth: usize,
    frequency_hash: String,
    entries: usize,
}

fn cache_key(freqs: &[f64], order: usize, n: usize, depth: usize) -> String {
    let mut hasher = Sha256::new();
    hasher.update((order as u64).to_le_bytes());
    hasher.update((n as u64).to_le_bytes());
    hasher.update((depth as u64).to_le_bytes());
    for w in freqs {
        hasher.update(w.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

/// Cache directory from `GENSAMP_CACHE_DIR`, if set.
pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("GENSAMP_CACHE_DIR").map(PathBuf::from)
}

/// [`build_table`] backed by an on-disk cache in `dir`: a JSON header plus a
/// little-endian `f64` payload (`re, im` pairs: interior, then left, then right rows).
pub fn build_table_cached(
    freqs: &[f64],
    order: usize,
    n: usize,
    depth: usize,
    dir: Option<&std::path::Path>,
) -> Result<ScalingFourierTable> {
    let Some(dir) = dir else {
        return build_table(freqs, order, n, depth);
    };
    let key = cache_key(freqs, order, n, depth);
    let head_path = dir.join(format!("table-{key}.json"));
    let data_path = dir.join(format!("table-{key}.bin"));
    if let (Ok(head), Ok(bytes)) = (std::fs::read(&head_path), std::fs::read(&data_path)) {
        if let Ok(h) = serde_json::from_slice::<CacheHeader>(&head) {
            let e = if order == 1 { 0 } else { order };
            let m = freqs.len();
            if h.frequency_hash == key && h.entries == m && bytes.len() == 16 * m * (1 + 2 * e) {
                let vals: Vec<C> = bytes
                    .chunks_exact(16)
                    .map(|c| {
                        let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                        let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                        C::new(re, im)
                    })
                    .collect();
                let mut rows = vals.chunks_exact(m.max(1)).map(|r| r.to_vec());
                let interior = if m == 0 { vec![] } else { rows.next().unwrap_or_default() };
                let left: Vec<Vec<C>> = (0..e).map(|_| rows.next().unwrap_or_default()).collect();
                let right: Vec<Vec<C>> = (0..e).map(|_| rows.next().unwrap_or_default()).collect();
                log::debug!("scaling table cache hit {key}");
                return Ok(ScalingFourierTable { order, n, depth, freqs: freqs.to_vec(), interior, left, right });
            }
        }
    }
    let t = build_table(freqs, order, n, depth)?;
    std::fs::create_dir_all(dir)?;
    let mut bytes = Vec::with_capacity(16 * freqs.len() * (1 + 2 * t.left.len()));
    for z in t.interior.iter().chain(t.left.iter().flatten()).chain(t.right.iter().flatten()) {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    let header = CacheHeader { order, n, depth, frequency_hash: key, entries: freqs.len() };
    std::fs::write(&data_path, bytes)?;
    std::fs::write(&head_path, serde_json::to_vec_pretty(&header)?)?;
    Ok(t)
}

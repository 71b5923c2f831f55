//! Edge filters for boundary-corrected Daubechies systems on the half line `[0, ∞)`.
//!
//! For an order-`a` filter the half line carries `a` edge scaling functions
//! `φ⁰_k` (k < a) spanning the polynomials of degree `< a` near the boundary,
//! followed by the interior translates `φ(· - n)`, `n ≥ a`. The two-scale
//! relation reads
//!
//! ```text
//! φ⁰_k(x/2)/√2 = Σ_l H[k][l] φ⁰_l(x) + Σ_t h0[k][t] φ(x - a - t)
//! ψ⁰_k(x/2)/√2 = Σ_l G[k][l] φ⁰_l(x) + Σ_t g0[k][t] φ(x - a - t)
//! ```
//!
//! with `t = 0..2a-1`. Everything here runs once per order in `f64`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Edge filters at one boundary, all row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeFilters<T> {
    /// `a × a`.
    pub scaling_edge: Vec<T>,
    /// `a × (2a-1)`.
    pub scaling_interior: Vec<T>,
    /// `a × a`.
    pub wavelet_edge: Vec<T>,
    /// `a × (2a-1)`.
    pub wavelet_interior: Vec<T>,
}

impl<T> EdgeFilters<T> {
    pub fn empty() -> Self {
        Self { scaling_edge: vec![], scaling_interior: vec![], wavelet_edge: vec![], wavelet_interior: vec![] }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Integer moments `∫ x^j φ(x) dx`, `j < a`.
pub fn moments(h: &[f64]) -> Vec<f64> {
    moments_upto(h, h.len() / 2)
}

/// Moments `∫ x^j φ(x) dx` for `j < count`.
pub fn moments_upto(h: &[f64], count: usize) -> Vec<f64> {
    let a = h.len() / 2;
    let n0 = 1 - a as i64;
    let mut mu = vec![1.0];
    for j in 1..count {
        let mut s = 0.0;
        for (idx, &hv) in h.iter().enumerate() {
            let n = (n0 + idx as i64) as f64;
            let inner: f64 = (0..j).map(|t| binom(j, t) * n.powi((j - t) as i32) * mu[t]).sum();
            s += hv * inner;
        }
        let scale = 2f64.powf(-(j as f64) - 0.5) / (1.0 - 2f64.powi(-(j as i32)));
        mu.push(scale * s);
    }
    mu
}

/// Left-edge filters for lowpass `h` (coefficients of `h_n`, `n = 1-a ..= a`).
pub fn left_edge(h: &[f64]) -> Result<EdgeFilters<f64>> {
    construct(h).map(|(f, _)| f)
}

/// `E[k][i] = ⟨x^i, φ⁰_k⟩` on the half line, row-major `a × a`.
pub fn edge_polynomial_coefficients(h: &[f64]) -> Result<Vec<f64>> {
    construct(h).map(|(_, e)| e)
}

fn construct(h: &[f64]) -> Result<(EdgeFilters<f64>, Vec<f64>)> {
    let a = h.len() / 2;
    if a < 2 || h.len() != 2 * a {
        return Err(Error::InvalidParameter(format!("edge construction needs a >= 2, got filter length {}", h.len())));
    }
    let n0 = 1 - a as i64;
    let hv = |n: i64| -> f64 {
        if n >= n0 && n <= a as i64 { h[(n - n0) as usize] } else { 0.0 }
    };
    let mu = moments(h);
    let c0 = |n: i64, i: usize| -> f64 {
        (0..=i).map(|t| binom(i, t) * (n as f64).powi((i - t) as i32) * mu[t]).sum()
    };

    // B[m - a][i] = Σ_{n<a} c0(n, i) h_{m-2n}, m = a..=3a-2
    let w = 2 * a - 1;
    let b = DMatrix::from_fn(w, a, |r, i| {
        let m = (a + r) as i64;
        (-2 * a as i64..a as i64).map(|n| c0(n, i) * hv(m - 2 * n)).sum()
    });
    let btb = b.transpose() * &b;
    let s = DMatrix::from_fn(a, a, |i, j| btb[(i, j)] / (1.0 - 2f64.powi(-((i + j + 1) as i32))));

    // x^i ↦ coefficients of the polynomial n ↦ ⟨x^i, φ(· - n)⟩
    let mut mp = DMatrix::<f64>::zeros(a, a);
    for i in 0..a {
        for t in 0..=i {
            mp[(i, i - t)] += binom(i, t) * mu[t];
        }
    }
    // Staggered basis f_k(n) = Π_{j=k+1}^{a-1} (n - j) so that φ⁰_k has support [0, a + k].
    let mut t = DMatrix::<f64>::zeros(a, a);
    let mpt_lu = mp.transpose().lu();
    for k in 0..a {
        let mut coef = vec![1.0];
        for j in (k + 1)..a {
            let mut next = vec![0.0; coef.len() + 1];
            for (p, &c) in coef.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= j as f64 * c;
            }
            coef = next;
        }
        coef.resize(a, 0.0);
        let row = mpt_lu
            .solve(&DVector::from_vec(coef))
            .ok_or_else(|| Error::Singular("moment map".into()))?;
        t.set_row(k, &row.transpose());
    }

    let gram = &t * &s * t.transpose();
    let chol = gram.cholesky().ok_or_else(|| Error::Singular("edge Gram matrix not positive definite".into()))?;
    let l = chol.l();
    let einv_t = l
        .solve_lower_triangular(&t)
        .ok_or_else(|| Error::Singular("Cholesky factor".into()))?;
    let e = einv_t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("edge basis change".into()))?
        .transpose();
    let lam = DMatrix::from_fn(a, a, |i, j| if i == j { 2f64.powf(-(i as f64) - 0.5) } else { 0.0 });
    let hm = &einv_t * lam * e.transpose();
    let mut h0 = &einv_t * b.transpose();
    // row k is supported on columns 0..=2k; clear roundoff outside the band
    for k in 0..a {
        for c in (2 * k + 1)..w {
            if h0[(k, c)].abs() > 1e-9 {
                return Err(Error::Singular(format!("edge row {k} is not banded ({:e})", h0[(k, c)])));
            }
            h0[(k, c)] = 0.0;
        }
    }

    let (gm, g0) = edge_wavelets(h, &hm, &h0)?;
    let filters = EdgeFilters {
        scaling_edge: row_major(&hm),
        scaling_interior: row_major(&h0),
        wavelet_edge: row_major(&gm),
        wavelet_interior: row_major(&g0),
    };
    Ok((filters, row_major(&e)))
}

/// Right-edge filters, counted from the boundary inward. Built as the left edge of
/// the reflected filter `h_{1-n}`; a function `φ¹_k(x) = φ♭⁰_k(-x)` then lives on
/// `[-(a+k), 0]`.
pub fn right_edge(h: &[f64]) -> Result<EdgeFilters<f64>> {
    let flipped: Vec<f64> = h.iter().rev().copied().collect();
    left_edge(&flipped)
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            v.push(m[(r, c)]);
        }
    }
    v
}

/// Edge wavelets: the orthogonal complement of the coarse edge and interior
/// functions inside a growing window of fine coefficients. Each time the
/// complement grows by one, the new direction is the next edge wavelet.
fn edge_wavelets(h: &[f64], hm: &DMatrix<f64>, h0: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let a = h.len() / 2;
    let n0 = 1 - a as i64;
    let g: Vec<f64> = (0..2 * a)
        .map(|i| {
            let n = n0 + i as i64;
            let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sign * h[(1 - n - n0) as usize]
        })
        .collect();

    let mut basis: Vec<Vec<f64>> = Vec::new();
    for lw in a..8 * a {
        let wlen = lw + 1;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for k in 0..a {
            let mut r = vec![0.0; wlen];
            for l in 0..a {
                r[l] = hm[(k, l)];
            }
            for c in 0..h0.ncols() {
                if a + c < wlen {
                    r[a + c] = h0[(k, c)];
                }
            }
            rows.push(r);
        }
        for n in a..wlen {
            let start = 2 * n + 1 - a;
            if start >= wlen {
                break;
            }
            for f in [h, g.as_slice()] {
                let mut r = vec![0.0; wlen];
                for (i, &v) in f.iter().enumerate() {
                    if start + i < wlen {
                        r[start + i] = v;
                    }
                }
                rows.push(r);
            }
        }
        let null = null_space(&rows, wlen);
        if null.len() <= basis.len() {
            continue;
        }
        // remove components along wavelets already found
        let mut cand: Vec<Vec<f64>> = null
            .into_iter()
            .map(|mut v| {
                for b in &basis {
                    let d: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= d * bi;
                    }
                }
                v
            })
            .collect();
        cand.sort_by(|x, y| norm(y).partial_cmp(&norm(x)).unwrap());
        let mut v = cand.swap_remove(0);
        let nv = norm(&v);
        if nv < 1e-8 {
            return Err(Error::Singular("edge wavelet complement collapsed".into()));
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let big = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if big < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        for b in basis.iter_mut() {
            b.resize(wlen, 0.0);
        }
        basis.push(v);
        if basis.len() == a {
            break;
        }
    }
    if basis.len() != a {
        return Err(Error::Singular("edge wavelets not found".into()));
    }
    let w = 2 * a - 1;
    let mut gm = DMatrix::zeros(a, a);
    let mut g0 = DMatrix::zeros(a, w);
    for (k, b) in basis.iter().enumerate() {
        for (c, &x) in b.iter().enumerate() {
            if c < a {
                gm[(k, c)] = x;
            } else if c - a < w {
                g0[(k, c - a)] = x;
            } else if x.abs() > 1e-9 {
                return Err(Error::Singular(format!("edge wavelet {k} exceeds its window")));
            }
        }
    }
    Ok((gm, g0))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Orthonormal basis of `{v ∈ R^n : r·v = 0 for every r in rows}`.
fn null_space(rows: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let m = rows.len().max(n);
    let mut a = DMatrix::<f64>::zeros(m, n);
    for (i, r) in rows.iter().enumerate() {
        for (j, &x) in r.iter().enumerate() {
            a[(i, j)] = x;
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let tol = 1e-10 * svd.singular_values.max().max(1.0);
    (0..n)
        .filter(|&i| svd.singular_values[i] <= tol)
        .map(|i| vt.row(i).iter().copied().collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DB2: [f64; 4] = [0.48296291314453414337, 0.83651630373780790558, 0.22414386804201338103, -0.12940952255126038117];

    #[test]
    fn db2_first_edge_coefficient() {
        let e = left_edge(&DB2).unwrap();
        assert!((e.scaling_interior[0] - 0.3983129977).abs() < 1e-9);
        assert_eq!(e.scaling_interior[1], 0.0);
        assert_eq!(e.scaling_interior[2], 0.0);
    }

    #[test]
    fn moments_of_haar() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(moments(&[s, s]), vec![1.0]);
    }
}

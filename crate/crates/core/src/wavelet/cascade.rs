//! Point values of the interior and edge scaling functions on dyadic grids,
//! and evaluation of reconstructions `f̃ = Σ c_{R,k} √N b_k(N·)`.

use nalgebra::{DMatrix, DVector};

use super::{CoefficientVector, Elem, FilterBank, Layout, WaveletSystem};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Samples of a function on `lo + i·2^{-s}`, `i = 0..values.len()`.
#[derive(Clone, Debug)]
pub struct DyadicTable {
    pub lo: i64,
    pub scale: u32,
    pub values: Vec<f64>,
}

impl DyadicTable {
    /// Value at `lo + i·2^{-s}`, zero outside the table.
    fn at(&self, p: i64) -> f64 {
        if p < 0 {
            0.0
        } else {
            self.values.get(p as usize).copied().unwrap_or(0.0)
        }
    }

    /// Value at `x = q·2^{-s}` (absolute position).
    pub fn at_abs(&self, q: i64) -> f64 {
        self.at(q - (self.lo << self.scale))
    }
}

/// Interior `φ` on `[1-a, a]` at step `2^{-s}`.
pub fn interior(h: &[f64], s: u32) -> Result<DyadicTable> {
    let a = h.len() / 2;
    let lo = 1 - a as i64;
    let len0 = 2 * a; // integers 1-a ..= a
    let ints: Vec<f64> = if a == 1 {
        vec![1.0, 0.0]
    } else {
        // φ(m) = √2 Σ_n h_n φ(2m - n)
        let mut m = DMatrix::<f64>::zeros(len0, len0);
        for i in 0..len0 {
            let mi = lo + i as i64;
            for j in 0..len0 {
                let nj = lo + j as i64;
                let idx = 2 * mi - nj - lo;
                if idx >= 0 && (idx as usize) < h.len() {
                    m[(i, j)] = std::f64::consts::SQRT_2 * h[idx as usize];
                }
            }
        }
        let mut sys = m - DMatrix::identity(len0, len0);
        let mut rhs = DVector::zeros(len0);
        for j in 0..len0 {
            sys[(len0 - 1, j)] = 1.0;
        }
        rhs[len0 - 1] = 1.0;
        sys.lu().solve(&rhs).ok_or_else(|| Error::Singular("integer values of φ".into()))?.iter().copied().collect()
    };
    let mut t = DyadicTable { lo, scale: 0, values: ints };
    for _ in 0..s {
        t = refine(&t, |q| {
            // φ(x) = √2 Σ h_n φ(2x - n); q indexes x at the new scale, 2x - n at the old
            let mut v = 0.0;
            for (i, &hn) in h.iter().enumerate() {
                let n = lo + i as i64;
                v += hn * t.at_abs(q - (n << t.scale));
            }
            std::f64::consts::SQRT_2 * v
        });
    }
    Ok(t)
}

fn refine(t: &DyadicTable, f: impl Fn(i64) -> f64) -> DyadicTable {
    let s = t.scale + 1;
    let len = (t.values.len() - 1) * 2 + 1;
    let start = t.lo << s;
    DyadicTable { lo: t.lo, scale: s, values: (0..len).map(|i| f(start + i as i64)).collect() }
}

/// Edge functions `φ⁰_k` on `[0, 2a-1]` at step `2^{-s}` from the half-line
/// two-scale relation, given the interior table of the same filter at the
/// same scale.
pub fn edge(h: &[f64], h_edge: &[f64], h_int: &[f64], s: u32, phi: &DyadicTable) -> Result<Vec<DyadicTable>> {
    let a = h.len() / 2;
    let w = 2 * a - 1;
    let r2 = std::f64::consts::SQRT_2;
    let hm = DMatrix::from_row_slice(a, a, h_edge);
    let h0 = DMatrix::from_row_slice(a, w, h_int);
    // ∫φ⁰_k solves v = (H/√2) v + (h0/√2) 1
    let ones = DVector::from_element(w, 1.0);
    let moments = (DMatrix::identity(a, a) - &hm / r2)
        .lu()
        .solve(&(&h0 * &ones / r2))
        .ok_or_else(|| Error::Singular("edge integrals".into()))?;
    // φ⁰(0) is the eigenvector of √2 H for eigenvalue 1, scaled so Σ ∫φ⁰_k φ⁰_k(0) = 1
    let mut m = &hm * r2 - DMatrix::identity(a, a);
    for j in 0..a {
        m[(a - 1, j)] = moments[j];
    }
    let mut rhs = DVector::zeros(a);
    rhs[a - 1] = 1.0;
    let at0 = m.lu().solve(&rhs).ok_or_else(|| Error::Singular("edge values at 0".into()))?;

    let phi_at = |q: i64, scale: u32| -> f64 {
        // φ at q·2^{-scale}, from the fine table
        phi.at_abs(q << (phi.scale - scale))
    };
    // integer values, descending; φ⁰(m) = √2 [H φ⁰(2m) + Σ_t h0_t φ(2m - a - t)]
    let top = w;
    let mut vals = vec![vec![0.0; top + 1]; a];
    for k in 0..a {
        vals[k][0] = at0[k];
    }
    for mi in (1..top).rev() {
        for k in 0..a {
            let mut v = 0.0;
            let two = 2 * mi;
            if two <= top {
                for l in 0..a {
                    v += hm[(k, l)] * vals[l][two];
                }
            }
            for t in 0..w {
                v += h0[(k, t)] * phi_at(two as i64 - (a + t) as i64, 0);
            }
            vals[k][mi] = r2 * v;
        }
    }
    let mut tables: Vec<DyadicTable> = vals.into_iter().map(|v| DyadicTable { lo: 0, scale: 0, values: v }).collect();
    for _ in 0..s {
        let prev = tables.clone();
        let sc = prev[0].scale;
        tables = (0..a)
            .map(|k| {
                refine(&prev[k], |q| {
                    let mut v = 0.0;
                    for l in 0..a {
                        v += hm[(k, l)] * prev[l].at_abs(q);
                    }
                    for t in 0..w {
                        v += h0[(k, t)] * phi_at(q - (((a + t) as i64) << sc), sc);
                    }
                    r2 * v
                })
            })
            .collect();
    }
    Ok(tables)
}

/// All point-value tables of a filter bank at step `2^{-s}`.
pub struct Tables {
    pub phi: DyadicTable,
    pub left: Vec<DyadicTable>,
    /// Reflected-frame tables: `φ¹_k(x) = right[k](-x)`.
    pub right: Vec<DyadicTable>,
}

pub fn tables(bank: &FilterBank<f64>, s: u32) -> Result<Tables> {
    let h = &bank.lowpass;
    let phi = interior(h, s)?;
    if bank.edge_count() == 0 {
        return Ok(Tables { phi, left: vec![], right: vec![] });
    }
    let flipped: Vec<f64> = h.iter().rev().copied().collect();
    let phi_flip = interior(&flipped, s)?;
    let left = edge(h, &bank.left.scaling_edge, &bank.left.scaling_interior, s, &phi)?;
    let right = edge(&flipped, &bank.right.scaling_edge, &bank.right.scaling_interior, s, &phi_flip)?;
    Ok(Tables { phi, left, right })
}

impl<T: Real> WaveletSystem<T> {
    /// Samples of `f̃ = Σ_k c_{R,k} √N b_k(N·)` at `p·2^{-J_eval}`, `p = 0..2^{J_eval}`.
    /// Wavelet-layout input is first synthesized to scale `R`.
    pub fn evaluate_on_dyadic_grid<S: Elem<T>>(&self, alpha: &CoefficientVector<S>, j_eval: u32) -> Result<Vec<S>> {
        let n = alpha.values.len();
        if n != self.n() {
            return Err(Error::ShapeMismatch { expected: self.n(), got: n });
        }
        let r = self.fine_scale();
        if j_eval < r {
            return Err(Error::InvalidScale(format!("evaluation scale {j_eval} below fine scale {r}")));
        }
        if j_eval > 26 {
            return Err(Error::InvalidScale(format!("evaluation scale {j_eval} too large")));
        }
        let c = match alpha.layout {
            Layout::Scaling => alpha.values.clone(),
            Layout::Wavelet => self.iwt_1d(alpha)?.values,
        };
        let s = j_eval - r;
        let bank = super::load_filters(self.order())?;
        let tabs = tables(&bank, s)?;
        let step = 1i64 << s;
        let total = (n as i64) * step;
        let sqrt_n = T::of((n as f64).sqrt());
        let mut out = vec![S::zero(); total as usize];
        let mut add = |coef: S, table: &DyadicTable, shift: i64, mirrored: bool| {
            // table position q maps to output index shift + q (or shift - q)
            let start = table.lo << table.scale;
            for (i, &v) in table.values.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let q = start + i as i64;
                let p = if mirrored { shift - q } else { shift + q };
                if (0..total).contains(&p) {
                    out[p as usize] += coef * (sqrt_n * T::of(v));
                }
            }
        };
        let e = self.edge_count();
        for k in 0..e {
            add(c[k], &tabs.left[k], 0, false);
            add(c[n - 1 - k], &tabs.right[k], total, true);
        }
        for k in e..n - e {
            add(c[k], &tabs.phi, k as i64 * step, false);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db2_integer_values() {
        // φ(1) = (1+√3)/2, φ(2) = (1-√3)/2 for the support [0, 3]; here shifted to [-1, 2]
        let b = super::super::load_filters(2).unwrap();
        let t = interior(&b.lowpass, 0).unwrap();
        let r3 = 3f64.sqrt();
        assert!((t.at_abs(0) - (1.0 + r3) / 2.0).abs() < 1e-13);
        assert!((t.at_abs(1) - (1.0 - r3) / 2.0).abs() < 1e-13);
        assert!(t.at_abs(-1).abs() < 1e-13 && t.at_abs(2).abs() < 1e-13);
    }
}

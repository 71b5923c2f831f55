//! Boundary-corrected Daubechies wavelet systems on `[0,1]` and their discrete
//! transforms.
//!
//! Layouts: a scaling-layout vector holds `c_{R,0..N}`; a wavelet-layout vector
//! holds `c_{J,·}` followed by `d_{J,·}, …, d_{R-1,·}`. In two dimensions the
//! wavelet layout is the level-wise tensor (Mallat) ordering: at every level the
//! top-left `2^{r}×2^{r}` block is split row-wise then column-wise.

pub mod assets;
pub mod cascade;
pub mod cdv;

use std::ops::{AddAssign, Mul};
use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use num_traits::Zero;

pub use cdv::EdgeFilters;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Values a transform can act on: real or complex over `T`.
pub trait Elem<T>: Copy + Zero + AddAssign + Mul<T, Output = Self> + Send + Sync {}
impl<T: Real> Elem<T> for T {}
impl<T: Real> Elem<T> for Complex<T> {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Scaling,
    Wavelet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector<S> {
    pub values: Vec<S>,
    pub layout: Layout,
}

/// Square `n×n` grid stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientGrid<S> {
    pub n: usize,
    pub values: Vec<S>,
    pub layout: Layout,
}

impl<S: Copy> CoefficientGrid<S> {
    pub fn get(&self, i: usize, j: usize) -> S {
        self.values[i * self.n + j]
    }
}

/// Filters of one order: internal lowpass/highpass and the two edge banks.
#[derive(Clone, Debug)]
pub struct FilterBank<T> {
    pub order: usize,
    /// `h_n`, `n = 1-a ..= a`.
    pub lowpass: Vec<T>,
    /// `g_n = (-1)^n h_{1-n}`, same index range.
    pub highpass: Vec<T>,
    pub left: EdgeFilters<T>,
    /// Indexed from the right boundary inward.
    pub right: EdgeFilters<T>,
}

impl<T: Real> FilterBank<T> {
    /// Number of edge functions at each boundary (0 for Haar).
    pub fn edge_count(&self) -> usize {
        if self.order == 1 { 0 } else { self.order }
    }

    fn cast<U: Real>(&self) -> FilterBank<U> {
        let c = |v: &[T]| v.iter().map(|&x| U::of(x.to_f64())).collect::<Vec<U>>();
        let ce = |e: &EdgeFilters<T>| EdgeFilters {
            scaling_edge: c(&e.scaling_edge),
            scaling_interior: c(&e.scaling_interior),
            wavelet_edge: c(&e.wavelet_edge),
            wavelet_interior: c(&e.wavelet_interior),
        };
        FilterBank {
            order: self.order,
            lowpass: c(&self.lowpass),
            highpass: c(&self.highpass),
            left: ce(&self.left),
            right: ce(&self.right),
        }
    }
}

fn highpass_of(h: &[f64]) -> Vec<f64> {
    let a = h.len() / 2;
    let n0 = 1 - a as i64;
    (0..2 * a)
        .map(|i| {
            let n = n0 + i as i64;
            let s = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            s * h[(1 - n - n0) as usize]
        })
        .collect()
}

static BANKS: [OnceLock<std::result::Result<Arc<FilterBank<f64>>, String>>; 4] =
    [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];

/// Load, checksum-verify and validate the bundled filters of order `a`.
pub fn load_filters(a: usize) -> Result<Arc<FilterBank<f64>>> {
    if !(1..=4).contains(&a) {
        return Err(Error::OrderNotBundled(a));
    }
    BANKS[a - 1]
        .get_or_init(|| {
            let parsed = assets::parse(assets::bundled(a).map_err(|e| e.to_string())?, a)
                .map_err(|e| e.to_string())?;
            let bank = bank_from_table(parsed);
            validate(&bank).map_err(|e| e.to_string())?;
            Ok(Arc::new(bank))
        })
        .clone()
        .map_err(|reason| Error::FilterValidation { order: a, reason })
}

pub fn bank_from_table(t: assets::FilterTable) -> FilterBank<f64> {
    FilterBank { order: t.order, highpass: highpass_of(&t.h), lowpass: t.h, left: t.left, right: t.right }
}

/// Orthogonality of the one-level analysis matrix at the shortest admissible length.
pub fn validate(bank: &FilterBank<f64>) -> Result<()> {
    let a = bank.order;
    let sum: f64 = bank.lowpass.iter().sum();
    if (sum - std::f64::consts::SQRT_2).abs() > 1e-13 {
        return Err(Error::FilterValidation { order: a, reason: format!("Σh = {sum}") });
    }
    let n = 4 * a.next_power_of_two().max(1);
    let n = n.max(2 * (2 * a).next_power_of_two());
    let mut worst = 0f64;
    let mut col = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut back = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|x| *x = 0.0);
        col[j] = 1.0;
        analysis_step(bank, &col, &mut out);
        let nrm: f64 = out.iter().map(|x| x * x).sum::<f64>();
        worst = worst.max((nrm - 1.0).abs());
        synthesis_step(bank, &out, &mut back);
        for (i, &b) in back.iter().enumerate() {
            worst = worst.max((b - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    if worst > 1e-12 {
        return Err(Error::FilterValidation { order: a, reason: format!("one-level transform not orthogonal ({worst:e})") });
    }
    Ok(())
}

/// One level of analysis: `x` (length `n`) ↦ `[c | d]` with `n/2` entries each.
pub fn analysis_step<T: Real, S: Elem<T>>(bank: &FilterBank<T>, x: &[S], out: &mut [S]) {
    let n = x.len();
    let half = n / 2;
    let a = bank.order;
    let e = bank.edge_count();
    let w = 2 * a - 1;
    let (c, d) = out.split_at_mut(half);
    let (h, g) = (&bank.lowpass, &bank.highpass);
    for k in e..half - e {
        let base = 2 * k + 1 - a;
        let mut sc = S::zero();
        let mut sd = S::zero();
        for i in 0..2 * a {
            let v = x[base + i];
            sc += v * h[i];
            sd += v * g[i];
        }
        c[k] = sc;
        d[k] = sd;
    }
    for k in 0..e {
        let (l, r) = (&bank.left, &bank.right);
        let mut cl = S::zero();
        let mut dl = S::zero();
        let mut cr = S::zero();
        let mut dr = S::zero();
        for j in 0..a {
            cl += x[j] * l.scaling_edge[k * a + j];
            dl += x[j] * l.wavelet_edge[k * a + j];
            cr += x[n - 1 - j] * r.scaling_edge[k * a + j];
            dr += x[n - 1 - j] * r.wavelet_edge[k * a + j];
        }
        for t in 0..w {
            cl += x[a + t] * l.scaling_interior[k * w + t];
            dl += x[a + t] * l.wavelet_interior[k * w + t];
            cr += x[n - 1 - a - t] * r.scaling_interior[k * w + t];
            dr += x[n - 1 - a - t] * r.wavelet_interior[k * w + t];
        }
        c[k] = cl;
        d[k] = dl;
        c[half - 1 - k] = cr;
        d[half - 1 - k] = dr;
    }
}

/// Transpose of [`analysis_step`].
pub fn synthesis_step<T: Real, S: Elem<T>>(bank: &FilterBank<T>, y: &[S], x: &mut [S]) {
    let n = y.len();
    let half = n / 2;
    let a = bank.order;
    let e = bank.edge_count();
    let w = 2 * a - 1;
    let (c, d) = y.split_at(half);
    let (h, g) = (&bank.lowpass, &bank.highpass);
    x.iter_mut().for_each(|v| *v = S::zero());
    for k in e..half - e {
        let base = 2 * k + 1 - a;
        let (ck, dk) = (c[k], d[k]);
        for i in 0..2 * a {
            x[base + i] += ck * h[i] + dk * g[i];
        }
    }
    for k in 0..e {
        let (l, r) = (&bank.left, &bank.right);
        let (cl, dl, cr, dr) = (c[k], d[k], c[half - 1 - k], d[half - 1 - k]);
        for j in 0..a {
            x[j] += cl * l.scaling_edge[k * a + j] + dl * l.wavelet_edge[k * a + j];
            x[n - 1 - j] += cr * r.scaling_edge[k * a + j] + dr * r.wavelet_edge[k * a + j];
        }
        for t in 0..w {
            x[a + t] += cl * l.scaling_interior[k * w + t] + dl * l.wavelet_interior[k * w + t];
            x[n - 1 - a - t] += cr * r.scaling_interior[k * w + t] + dr * r.wavelet_interior[k * w + t];
        }
    }
}

/// Smallest admissible coarse scale for order `a`.
pub fn min_coarse_scale(a: usize) -> u32 {
    if a == 1 { 0 } else { (2 * a).next_power_of_two().trailing_zeros() }
}

/// Default coarse scale `ceil(log2(2a))`.
pub fn default_coarse_scale(a: usize) -> u32 {
    (2 * a).next_power_of_two().trailing_zeros()
}

fn log2_exact(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        Err(Error::NotPowerOfTwo(n))
    } else {
        Ok(n.trailing_zeros())
    }
}

/// A wavelet order with coarse scale `J` and fine scale `R` (`N = 2^R`).
#[derive(Clone, Debug)]
pub struct WaveletSystem<T> {
    bank: Arc<FilterBank<T>>,
    coarse: u32,
    fine: u32,
}

impl<T: Real> WaveletSystem<T> {
    /// Order `a` at fine scale `R` with the default coarse scale.
    pub fn new(order: usize, fine: u32) -> Result<Self> {
        Self::with_scales(order, default_coarse_scale(order), fine)
    }

    pub fn with_scales(order: usize, coarse: u32, fine: u32) -> Result<Self> {
        let bank64 = load_filters(order)?;
        if coarse < min_coarse_scale(order) {
            return Err(Error::InvalidScale(format!(
                "coarse scale {coarse} below minimum {} for order {order}",
                min_coarse_scale(order)
            )));
        }
        if fine <= coarse {
            return Err(Error::InvalidScale(format!("fine scale {fine} must exceed coarse scale {coarse}")));
        }
        if fine > 30 {
            return Err(Error::InvalidScale(format!("fine scale {fine} too large")));
        }
        Ok(Self { bank: Arc::new(bank64.cast()), coarse, fine })
    }

    pub fn order(&self) -> usize {
        self.bank.order
    }
    pub fn coarse_scale(&self) -> u32 {
        self.coarse
    }
    pub fn fine_scale(&self) -> u32 {
        self.fine
    }
    /// `N = 2^R`.
    pub fn n(&self) -> usize {
        1 << self.fine
    }
    pub fn filters(&self) -> &FilterBank<T> {
        &self.bank
    }
    /// Edge functions per boundary.
    pub fn edge_count(&self) -> usize {
        self.bank.edge_count()
    }

    fn levels_for(&self, len: usize) -> Result<u32> {
        let r = log2_exact(len)?;
        if r <= self.coarse {
            return Err(Error::InvalidScale(format!("length 2^{r} does not exceed coarse scale 2^{}", self.coarse)));
        }
        Ok(r)
    }

    /// In-place forward transform of a power-of-two slice; `scratch` must be as long.
    pub fn forward_in_place<S: Elem<T>>(&self, x: &mut [S], scratch: &mut [S]) -> Result<()> {
        let r = self.levels_for(x.len())?;
        for level in ((self.coarse + 1)..=r).rev() {
            let s = 1usize << level;
            analysis_step(&self.bank, &x[..s], &mut scratch[..s]);
            x[..s].copy_from_slice(&scratch[..s]);
        }
        Ok(())
    }

    pub fn inverse_in_place<S: Elem<T>>(&self, x: &mut [S], scratch: &mut [S]) -> Result<()> {
        let r = self.levels_for(x.len())?;
        for level in (self.coarse + 1)..=r {
            let s = 1usize << level;
            synthesis_step(&self.bank, &x[..s], &mut scratch[..s]);
            x[..s].copy_from_slice(&scratch[..s]);
        }
        Ok(())
    }

    pub fn fwt_1d<S: Elem<T>>(&self, x: &CoefficientVector<S>) -> Result<CoefficientVector<S>> {
        if x.layout != Layout::Scaling {
            return Err(Error::Layout("forward transform expects scaling layout".into()));
        }
        let mut v = x.values.clone();
        let mut scratch = vec![S::zero(); v.len()];
        self.forward_in_place(&mut v, &mut scratch)?;
        Ok(CoefficientVector { values: v, layout: Layout::Wavelet })
    }

    pub fn iwt_1d<S: Elem<T>>(&self, x: &CoefficientVector<S>) -> Result<CoefficientVector<S>> {
        if x.layout != Layout::Wavelet {
            return Err(Error::Layout("inverse transform expects wavelet layout".into()));
        }
        let mut v = x.values.clone();
        let mut scratch = vec![S::zero(); v.len()];
        self.inverse_in_place(&mut v, &mut scratch)?;
        Ok(CoefficientVector { values: v, layout: Layout::Scaling })
    }

    fn check_grid<S>(&self, g: &CoefficientGrid<S>) -> Result<u32> {
        if g.values.len() != g.n * g.n {
            return Err(Error::ShapeMismatch { expected: g.n * g.n, got: g.values.len() });
        }
        self.levels_for(g.n)
    }

    /// In-place 2D forward transform of a row-major `n×n` grid.
    pub fn forward_2d_in_place<S: Elem<T>>(&self, x: &mut [S], n: usize) -> Result<()> {
        if x.len() != n * n {
            return Err(Error::ShapeMismatch { expected: n * n, got: x.len() });
        }
        let r = self.levels_for(n)?;
        let mut buf = vec![S::zero(); n];
        let mut out = vec![S::zero(); n];
        for level in ((self.coarse + 1)..=r).rev() {
            let s = 1usize << level;
            for i in 0..s {
                let row = &mut x[i * n..i * n + s];
                analysis_step(&self.bank, row, &mut out[..s]);
                row.copy_from_slice(&out[..s]);
            }
            for j in 0..s {
                for i in 0..s {
                    buf[i] = x[i * n + j];
                }
                analysis_step(&self.bank, &buf[..s], &mut out[..s]);
                for i in 0..s {
                    x[i * n + j] = out[i];
                }
            }
        }
        Ok(())
    }

    pub fn inverse_2d_in_place<S: Elem<T>>(&self, x: &mut [S], n: usize) -> Result<()> {
        if x.len() != n * n {
            return Err(Error::ShapeMismatch { expected: n * n, got: x.len() });
        }
        let r = self.levels_for(n)?;
        let mut buf = vec![S::zero(); n];
        let mut out = vec![S::zero(); n];
        for level in (self.coarse + 1)..=r {
            let s = 1usize << level;
            for j in 0..s {
                for i in 0..s {
                    buf[i] = x[i * n + j];
                }
                synthesis_step(&self.bank, &buf[..s], &mut out[..s]);
                for i in 0..s {
                    x[i * n + j] = out[i];
                }
            }
            for i in 0..s {
                let row = &mut x[i * n..i * n + s];
                synthesis_step(&self.bank, row, &mut out[..s]);
                row.copy_from_slice(&out[..s]);
            }
        }
        Ok(())
    }

    pub fn fwt_2d<S: Elem<T>>(&self, x: &CoefficientGrid<S>) -> Result<CoefficientGrid<S>> {
        self.check_grid(x)?;
        if x.layout != Layout::Scaling {
            return Err(Error::Layout("forward transform expects scaling layout".into()));
        }
        let mut v = x.values.clone();
        self.forward_2d_in_place(&mut v, x.n)?;
        Ok(CoefficientGrid { n: x.n, values: v, layout: Layout::Wavelet })
    }

    pub fn iwt_2d<S: Elem<T>>(&self, x: &CoefficientGrid<S>) -> Result<CoefficientGrid<S>> {
        self.check_grid(x)?;
        if x.layout != Layout::Wavelet {
            return Err(Error::Layout("inverse transform expects wavelet layout".into()));
        }
        let mut v = x.values.clone();
        self.inverse_2d_in_place(&mut v, x.n)?;
        Ok(CoefficientGrid { n: x.n, values: v, layout: Layout::Scaling })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unsupported_order() {
        assert!(matches!(load_filters(5), Err(Error::OrderNotBundled(5))));
        assert!(matches!(WaveletSystem::<f64>::new(0, 4), Err(Error::OrderNotBundled(0))));
    }

    #[test]
    fn default_coarse_scales() {
        assert_eq!([1, 2, 3, 4].map(default_coarse_scale), [1, 2, 3, 3]);
    }

    #[test]
    fn refuses_shallow_transform() {
        let sys = WaveletSystem::<f64>::new(2, 4).unwrap();
        let x = CoefficientVector { values: vec![0.0; 4], layout: Layout::Scaling };
        assert!(matches!(sys.fwt_1d(&x), Err(Error::InvalidScale(_))));
        let x = CoefficientVector { values: vec![0.0; 12], layout: Layout::Scaling };
        assert!(matches!(sys.fwt_1d(&x), Err(Error::NotPowerOfTwo(12))));
    }
}

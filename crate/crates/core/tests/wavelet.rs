use gensamp::wavelet::{self, cdv, CoefficientGrid, CoefficientVector, Layout, WaveletSystem};
use gensamp::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn scaling(v: Vec<f64>) -> CoefficientVector<f64> {
    CoefficientVector { values: v, layout: Layout::Scaling }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn nrm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn haar_filter_is_analytic() {
    let b = wavelet::load_filters(1).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert_eq!(b.lowpass, vec![s, s]);
    assert!(b.left.scaling_edge.is_empty() && b.right.wavelet_interior.is_empty());
}

#[test]
fn internal_filters_satisfy_sum_rules() {
    for a in 1..=4 {
        let b = wavelet::load_filters(a).unwrap();
        let s: f64 = b.lowpass.iter().sum();
        let alt: f64 = b.lowpass.iter().enumerate().map(|(i, h)| if i % 2 == 0 { *h } else { -*h }).sum();
        let e: f64 = b.lowpass.iter().map(|h| h * h).sum();
        assert!((s - 2f64.sqrt()).abs() < 1e-15, "order {a}");
        assert!(alt.abs() < 1e-15);
        assert!((e - 1.0).abs() < 1e-15);
    }
}

#[test]
fn bundled_tables_match_fresh_construction() {
    for a in 2..=4 {
        let b = wavelet::load_filters(a).unwrap();
        let l = cdv::left_edge(&b.lowpass).unwrap();
        let r = cdv::right_edge(&b.lowpass).unwrap();
        for (x, y) in [(&l, &b.left), (&r, &b.right)] {
            for (u, v) in [
                (&x.scaling_edge, &y.scaling_edge),
                (&x.scaling_interior, &y.scaling_interior),
                (&x.wavelet_edge, &y.wavelet_edge),
                (&x.wavelet_interior, &y.wavelet_interior),
            ] {
                assert!(dist(u, v) < 1e-13, "order {a}");
            }
        }
    }
}

#[test]
fn tampered_table_is_rejected() {
    let text = wavelet::assets::bundled(2).unwrap().replacen("4.8296291314453416e-1", "4.8296291314453417e-1", 1);
    assert!(wavelet::assets::parse(&text, 2).is_err());
}

#[test]
fn edge_scaling_rows_are_banded() {
    for a in 2..=4 {
        let b = wavelet::load_filters(a).unwrap();
        let w = 2 * a - 1;
        for k in 0..a {
            for t in (2 * k + 1)..w {
                assert_eq!(b.left.scaling_interior[k * w + t], 0.0);
                assert_eq!(b.right.scaling_interior[k * w + t], 0.0);
            }
        }
    }
}

#[test]
fn order4_one_level_round_trip() {
    let sys = WaveletSystem::<f64>::with_scales(4, 5, 6).unwrap();
    let x = random(64, 1);
    let y = sys.fwt_1d(&scaling(x.clone())).unwrap();
    let z = sys.iwt_1d(&y).unwrap();
    assert!(dist(&z.values, &x) < 1e-12 * nrm(&x));
}

#[test]
fn haar_annihilates_constants() {
    let sys = WaveletSystem::<f64>::new(1, 5).unwrap();
    let y = sys.fwt_1d(&scaling(vec![1.0; 32])).unwrap();
    let coarse = 1 << sys.coarse_scale();
    assert!(y.values[coarse..].iter().all(|d| d.abs() < 1e-14));
}

#[test]
fn isometry_order3() {
    let sys = WaveletSystem::<f64>::new(3, 5).unwrap();
    let x = random(32, 7);
    let y = sys.fwt_1d(&scaling(x.clone())).unwrap();
    assert!((nrm(&y.values) - nrm(&x)).abs() < 1e-12 * nrm(&x));
}

#[test]
fn unit_coarse_coefficient_round_trip() {
    let sys = WaveletSystem::<f64>::new(2, 6).unwrap();
    let mut e = vec![0.0; 64];
    e[0] = 1.0;
    let x = sys.iwt_1d(&CoefficientVector { values: e.clone(), layout: Layout::Wavelet }).unwrap();
    let back = sys.fwt_1d(&x).unwrap();
    assert!(dist(&back.values, &e) < 1e-13);
    let zero = sys.iwt_1d(&CoefficientVector { values: vec![0.0; 64], layout: Layout::Wavelet }).unwrap();
    assert!(zero.values.iter().all(|v| *v == 0.0));
}

#[test]
fn complex_coefficients_transform_componentwise() {
    let sys = WaveletSystem::<f64>::new(2, 6).unwrap();
    let re = random(64, 3);
    let im = random(64, 4);
    let z: Vec<Complex<f64>> = re.iter().zip(&im).map(|(a, b)| Complex::new(*a, *b)).collect();
    let yz = sys.fwt_1d(&CoefficientVector { values: z, layout: Layout::Scaling }).unwrap();
    let yr = sys.fwt_1d(&scaling(re)).unwrap();
    let yi = sys.fwt_1d(&scaling(im)).unwrap();
    for i in 0..64 {
        assert!((yz.values[i] - Complex::new(yr.values[i], yi.values[i])).norm() < 1e-14);
    }
}

#[test]
fn single_precision_round_trip() {
    let sys = WaveletSystem::<f32>::new(3, 7).unwrap();
    let x: Vec<f32> = random(128, 9).into_iter().map(|v| v as f32).collect();
    let y = sys.fwt_1d(&CoefficientVector { values: x.clone(), layout: Layout::Scaling }).unwrap();
    let z = sys.iwt_1d(&y).unwrap();
    let err: f32 = x.iter().zip(&z.values).map(|(a, b)| (a - b).powi(2)).sum::<f32>().sqrt();
    assert!(err < 1e-5);
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Exact scale-R coefficients of `(1-x)^d` (`reflect`) or `x^d` near the left edge
/// and in the interior, from the moments of the reflected or plain filter.
fn monomial_coefficients(h: &[f64], n: usize, d: usize) -> (Vec<f64>, Vec<f64>) {
    let a = h.len() / 2;
    let mu = cdv::moments(h);
    let e = cdv::edge_polynomial_coefficients(h).unwrap();
    let scale = (n as f64).powf(-(d as f64) - 0.5);
    let interior: Vec<f64> = (0..n)
        .map(|k| (0..=d).map(|t| binom(d, t) * (k as f64).powi((d - t) as i32) * mu[t]).sum::<f64>() * scale)
        .collect();
    let edge: Vec<f64> = (0..a).map(|k| e[k * a + d] * scale).collect();
    (edge, interior)
}

/// Scale-R coefficients of `x^d` over the whole interval, edges included.
fn polynomial_coefficients(a: usize, n: usize, d: usize) -> Vec<f64> {
    let b = wavelet::load_filters(a).unwrap();
    let flipped: Vec<f64> = b.lowpass.iter().rev().copied().collect();
    let (le, li) = monomial_coefficients(&b.lowpass, n, d);
    let mut x = li;
    x[..a].copy_from_slice(&le);
    // near the right edge, x^d = Σ_t C(d,t) (-1)^t (1-x)^t
    for k in 0..a {
        x[n - 1 - k] = (0..=d)
            .map(|t| {
                let (re, _) = monomial_coefficients(&flipped, n, t);
                binom(d, t) * if t % 2 == 0 { 1.0 } else { -1.0 } * re[k]
            })
            .sum();
    }
    x
}

#[test]
fn wavelets_annihilate_polynomials_up_to_the_edges() {
    for a in 2..=4 {
        for r in [5, 7] {
            let n = 1 << r;
            let sys = WaveletSystem::<f64>::new(a, r).unwrap();
            let coarse = 1 << sys.coarse_scale();
            for d in 0..a {
                let x = polynomial_coefficients(a, n, d);
                let y = sys.fwt_1d(&scaling(x)).unwrap();
                for (k, v) in y.values[coarse..].iter().enumerate() {
                    assert!(v.abs() < 1e-10, "a={a} r={r} d={d} k={k}: {v}");
                }
            }
        }
    }
}

#[test]
fn two_dimensional_single_level_is_separable() {
    let sys = WaveletSystem::<f64>::with_scales(2, 3, 4).unwrap();
    let u = random(16, 11);
    let v = random(16, 12);
    let grid: Vec<f64> = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
    let y = sys.fwt_2d(&CoefficientGrid { n: 16, values: grid, layout: Layout::Scaling }).unwrap();
    let fu = sys.fwt_1d(&scaling(u)).unwrap().values;
    let fv = sys.fwt_1d(&scaling(v)).unwrap().values;
    for i in 0..16 {
        for j in 0..16 {
            assert!((y.get(i, j) - fu[i] * fv[j]).abs() < 1e-12);
        }
    }
}

#[test]
fn two_dimensional_round_trip_and_haar_constant() {
    let sys = WaveletSystem::<f64>::new(3, 5).unwrap();
    let x = random(32 * 32, 5);
    let g = CoefficientGrid { n: 32, values: x.clone(), layout: Layout::Scaling };
    let back = sys.iwt_2d(&sys.fwt_2d(&g).unwrap()).unwrap();
    assert!(dist(&back.values, &x) < 1e-12 * nrm(&x));

    let haar = WaveletSystem::<f64>::with_scales(1, 0, 4).unwrap();
    let c = CoefficientGrid { n: 16, values: vec![1.0; 256], layout: Layout::Scaling };
    let y = haar.fwt_2d(&c).unwrap();
    assert!((y.values[0] - 16.0).abs() < 1e-12);
    assert!(y.values[1..].iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn non_square_grid_rejected() {
    let sys = WaveletSystem::<f64>::new(2, 4).unwrap();
    let g = CoefficientGrid { n: 16, values: vec![0.0; 16 * 8], layout: Layout::Scaling };
    assert!(sys.fwt_2d(&g).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_and_isometry(a in 1usize..=4, extra in 1u32..5, seed in any::<u64>()) {
        let j = wavelet::default_coarse_scale(a);
        let r = j + extra;
        let sys = WaveletSystem::<f64>::new(a, r).unwrap();
        let x = random(1 << r, seed);
        let y = sys.fwt_1d(&scaling(x.clone())).unwrap();
        prop_assert!((nrm(&y.values) - nrm(&x)).abs() <= 1e-12 * nrm(&x));
        let z = sys.iwt_1d(&y).unwrap();
        prop_assert!(dist(&z.values, &x) <= 1e-12 * nrm(&x));
    }

    #[test]
    fn two_dimensional_is_rowwise_then_columnwise(a in 1usize..=4, seed in any::<u64>()) {
        let j = wavelet::default_coarse_scale(a);
        let sys = WaveletSystem::<f64>::with_scales(a, j, j + 1).unwrap();
        let n = 1usize << (j + 1);
        let x = random(n * n, seed);
        let y = sys.fwt_2d(&CoefficientGrid { n, values: x.clone(), layout: Layout::Scaling }).unwrap();
        let mut rows = vec![0.0; n * n];
        for i in 0..n {
            let r = sys.fwt_1d(&scaling(x[i * n..(i + 1) * n].to_vec())).unwrap().values;
            rows[i * n..(i + 1) * n].copy_from_slice(&r);
        }
        for jj in 0..n {
            let col: Vec<f64> = (0..n).map(|i| rows[i * n + jj]).collect();
            let c = sys.fwt_1d(&scaling(col)).unwrap().values;
            for i in 0..n {
                prop_assert!((c[i] - y.get(i, jj)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn evaluation_reproduces_constants() {
    for a in 2..=4 {
        let r = 5;
        let sys = WaveletSystem::<f64>::new(a, r).unwrap();
        let x = polynomial_coefficients(a, 1 << r, 0);
        let alpha = sys.fwt_1d(&scaling(x)).unwrap();
        let vals = sys.evaluate_on_dyadic_grid(&alpha, r + 4).unwrap();
        assert_eq!(vals.len(), 1 << (r + 4));
        for (p, v) in vals.iter().enumerate() {
            assert!((v - 1.0).abs() < 1e-8, "a={a} p={p}: {v}");
        }
    }
}

#[test]
fn evaluation_reproduces_linear_function() {
    let (a, r) = (3, 5);
    let sys = WaveletSystem::<f64>::new(a, r).unwrap();
    let x = polynomial_coefficients(a, 1 << r, 1);
    let vals = sys.evaluate_on_dyadic_grid(&scaling(x), r + 3).unwrap();
    let m = vals.len() as f64;
    for (p, v) in vals.iter().enumerate() {
        assert!((v - p as f64 / m).abs() < 1e-8, "p={p}: {v}");
    }
}

#[test]
fn evaluation_of_zero_and_haar_indicator() {
    let sys = WaveletSystem::<f64>::new(2, 4).unwrap();
    let z = sys.evaluate_on_dyadic_grid(&scaling(vec![0.0; 16]), 6).unwrap();
    assert!(z.iter().all(|v| *v == 0.0));

    let haar = WaveletSystem::<f64>::new(1, 3).unwrap();
    let mut c = vec![0.0; 8];
    c[5] = 1.0;
    let v = haar.evaluate_on_dyadic_grid(&scaling(c), 5).unwrap();
    for (p, x) in v.iter().enumerate() {
        let expect = if p / 4 == 5 { 8f64.sqrt() } else { 0.0 };
        assert!((x - expect).abs() < 1e-14, "p={p}");
    }
    assert!(haar.evaluate_on_dyadic_grid(&scaling(vec![0.0; 8]), 2).is_err());
}

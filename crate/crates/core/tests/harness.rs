use std::f64::consts::PI;

use gensamp::harness::*;
use gensamp::sampling::{make_equispaced_1d, make_jittered_1d, make_uniform_2d};
use gensamp::wavelet::{CoefficientVector, Layout, WaveletSystem};
use gensamp::C64;
use proptest::prelude::*;

fn x_exp_integral(mu: C64) -> C64 {
    // ∫₀¹ x e^{μx} dx
    mu.exp() / mu - (mu.exp() - 1.0) / (mu * mu)
}

fn xcos3pi_closed(w: f64) -> C64 {
    let a = C64::new(0.0, 3.0 * PI - 2.0 * PI * w);
    let b = C64::new(0.0, -3.0 * PI - 2.0 * PI * w);
    (x_exp_integral(a) + x_exp_integral(b)) * 0.5
}

#[test]
fn constant_matches_closed_form() {
    for &w in &[0.0, 0.3, -1.7, 5.5, 64.0, -63.25, 1e-6] {
        let got = TestFunction::Constant.fourier(&[w], 1).unwrap();
        let want = if w == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            C64::from_polar((PI * w).sin() / (PI * w), -PI * w)
        };
        assert!((got - want).norm() <= 1e-11, "w={w}: {got} vs {want}");
    }
}

#[test]
fn x_cos_quadrature_matches_integration_by_parts() {
    for &w in &[0.0, 0.25, -0.8, 3.3, -17.9, 64.0, 200.5] {
        let got = TestFunction::XCos3Pi.fourier(&[w], 1).unwrap();
        let want = xcos3pi_closed(w);
        assert!((got - want).norm() <= 1e-10, "w={w}: {}", (got - want).norm());
    }
}

#[test]
fn depth_doubling_is_stable() {
    for f in [TestFunction::XCos3Pi, TestFunction::Oscillating] {
        for &w in &[0.0, 1.1, -9.6, 63.0, 250.3] {
            let a = f.fourier(&[w], 1).unwrap();
            let b = f.fourier(&[w], 2).unwrap();
            assert!((a - b).norm() <= 1e-11, "{f:?} w={w}");
        }
    }
    for &(w1, w2) in &[(0.0, 0.0), (3.5, -7.25), (-40.0, 22.0)] {
        let a = TestFunction::Phantom.fourier(&[w1, w2], 1).unwrap();
        let b = TestFunction::Phantom.fourier(&[w1, w2], 2).unwrap();
        assert!((a - b).norm() <= 1e-11, "phantom ({w1},{w2})");
    }
}

#[test]
fn separable_2d_matches_product_of_1d_quadrature() {
    // sin(5πx)cos(3πy): compare the closed form against generic quadrature per axis
    for &(w1, w2) in &[(0.0, 0.0), (2.5, -1.5), (-30.25, 12.0)] {
        let got = TestFunction::SinCos.fourier(&[w1, w2], 1).unwrap();
        let gx = oscillatory_integral(|x| (5.0 * PI * x).sin(), 0.0, 1.0, w1, 2);
        let gy = oscillatory_integral(|y| (3.0 * PI * y).cos(), 0.0, 1.0, w2, 2);
        assert!((got - gx * gy).norm() <= 1e-11);
        let got = TestFunction::DampedSinCos.fourier(&[w1, w2], 1).unwrap();
        let gx = oscillatory_integral(|x| (3.0 * x).cos() * (-x).exp(), 0.0, 1.0, w1, 2);
        let gy = oscillatory_integral(|y| (5.0 * y).sin() * (-y).exp(), 0.0, 1.0, w2, 2);
        assert!((got - gx * gy).norm() <= 1e-11);
    }
}

#[test]
fn phantom_zero_frequency_is_total_mass() {
    let rects: f64 = phantom::RECTS.iter().map(|r| (r.1 - r.0) * (r.3 - r.2) * r.4).sum();
    let d = phantom::DISK;
    let mass = rects + PI * d.2 * d.2 * d.3;
    let got = TestFunction::Phantom.fourier(&[0.0, 0.0], 1).unwrap();
    assert!((got.re - mass).abs() < 1e-12 && got.im.abs() < 1e-12);
}

#[test]
fn phantom_matches_brute_force_riemann_sum() {
    // midpoint sum on a fine grid, error O(h) at the discontinuities
    let n = 2000;
    let h = 1.0 / n as f64;
    let w = [2.0, -3.0];
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            s += C64::from_polar(TestFunction::Phantom.eval(&[x, y]), -2.0 * PI * (w[0] * x + w[1] * y));
        }
    }
    s *= h * h;
    let got = TestFunction::Phantom.fourier(&w, 1).unwrap();
    assert!((got - s).norm() < 2e-3, "{got} vs {s}");
}

#[test]
fn conjugate_symmetry_on_symmetric_schemes() {
    let s = make_equispaced_1d(0.5, 101).unwrap();
    let v = synthesize_samples(TestFunction::Oscillating, &s, 1).unwrap();
    for (m, om) in s.coords[0].iter().enumerate() {
        if let Some(k) = s.coords[0].iter().position(|&o| o == -om) {
            assert!((v.values[m] - v.values[k].conj()).norm() <= 1e-11);
        }
    }
    let s = make_uniform_2d(1.0, 1.0, 16).unwrap();
    for f in [TestFunction::SinCos, TestFunction::Phantom] {
        let v = synthesize_samples(f, &s, 1).unwrap();
        for m in 0..s.len() {
            let (a, b) = (s.coords[0][m], s.coords[1][m]);
            if let Some(k) = (0..s.len()).find(|&k| s.coords[0][k] == -a && s.coords[1][k] == -b) {
                assert!((v.values[m] - v.values[k].conj()).norm() <= 1e-11);
            }
        }
    }
}

#[test]
fn synthesis_is_deterministic_and_checks_dimension() {
    let s = make_jittered_1d(0.7, 0.1, 40, 3).unwrap();
    let a = synthesize_samples(TestFunction::XCos3Pi, &s, 1).unwrap();
    let b = synthesize_samples(TestFunction::XCos3Pi, &s, 1).unwrap();
    assert_eq!(a, b);
    assert!(synthesize_samples(TestFunction::SinCos, &s, 1).is_err());
}

#[test]
fn noise_levels() {
    let s = make_equispaced_1d(1.0, 128).unwrap();
    let v = synthesize_samples(TestFunction::XCos3Pi, &s, 1).unwrap();
    let same = add_noise(&v, 0.0, 7).unwrap();
    assert_eq!(same.values, v.values);
    let noisy = add_noise(&v, 30.0, 7).unwrap();
    let nv: f64 = v.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ne: f64 = noisy.values.iter().zip(&v.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    assert!((ne / nv - 10f64.powf(-1.5)).abs() <= 1e-12);
    assert_eq!(noisy, add_noise(&v, 30.0, 7).unwrap());
    assert_ne!(noisy.values, add_noise(&v, 30.0, 8).unwrap().values);
    assert!(add_noise(&v, -1.0, 7).is_err());
}

#[test]
fn l2_error_basics() {
    let p = 256;
    let f = TestFunction::XCos3Pi;
    let exact: Vec<C64> = (0..p).map(|i| C64::new(f.eval(&[i as f64 / p as f64]), 0.0)).collect();
    assert_eq!(l2_error(&exact, f).unwrap(), 0.0);
    let shifted: Vec<C64> = exact.iter().map(|z| z + 0.37).collect();
    assert!((l2_error(&shifted, f).unwrap() - 0.37).abs() < 1e-12);
    assert!(l2_error(&exact[..99], TestFunction::SinCos).is_err());
    assert!((l2_distance(&exact, &shifted, 1).unwrap() - 0.37).abs() < 1e-12);
}

#[test]
fn l2_error_grid_refinement() {
    // a smooth perturbation of f: its error must be stable under P -> 2P
    let f = TestFunction::XCos3Pi;
    let err = |p: usize| {
        let r: Vec<C64> = (0..p)
            .map(|i| {
                let x = i as f64 / p as f64;
                C64::new(f.eval(&[x]) + 0.01 * (2.0 * PI * x).sin() + 0.02 * x, 0.0)
            })
            .collect();
        l2_error(&r, f).unwrap()
    };
    for p in [128, 256, 512] {
        let (a, b) = (err(p), err(2 * p));
        assert!((a - b).abs() / b <= 0.01, "P={p}: {a} vs {b}");
    }
}

#[test]
fn evaluation_reproduces_projection_of_polynomials() {
    // linear functions are reproduced exactly by DB2+ (two vanishing moments)
    let sys = WaveletSystem::<f64>::new(2, 5).unwrap();
    let n = sys.n();
    // scaling coefficients of x: sample quadrature via fine evaluation of unit vectors
    let p = 1024;
    let mut alpha = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let b = sys.evaluate_on_dyadic_grid(&CoefficientVector { values: e, layout: Layout::Scaling }, 16).unwrap();
        let h = 1.0 / b.len() as f64;
        // trapezoid, value at x = 1 extrapolated linearly
        let l = b.len();
        let end = 2.0 * b[l - 1] - b[l - 2];
        let inner: f64 = b.iter().enumerate().skip(1).map(|(i, v)| v * i as f64 * h).sum();
        alpha[k] = C64::new((inner + 0.5 * end) * h, 0.0);
    }
    let g = evaluate_1d(&sys, &alpha, Layout::Scaling, p).unwrap();
    for (i, z) in g.iter().enumerate() {
        assert!((z.re - i as f64 / p as f64).abs() < 1e-4, "i={i} {}", z.re - i as f64 / p as f64);
    }
    // 2D tensor of the same expansion gives xy
    let mut a2 = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a2[i * n + j] = alpha[i] * alpha[j];
        }
    }
    let g2 = evaluate_2d(&sys, &a2, Layout::Scaling, 64).unwrap();
    for i in 0..64 {
        for j in 0..64 {
            let want = i as f64 * j as f64 / 4096.0;
            assert!((g2[i * 64 + j].re - want).abs() < 1e-4);
        }
    }
    // wavelet layout gives the same field after fwt
    let mut w = a2.clone();
    sys.forward_2d_in_place(&mut w, n).unwrap();
    let g3 = evaluate_2d(&sys, &w, Layout::Wavelet, 64).unwrap();
    assert!(g2.iter().zip(&g3).all(|(a, b)| (a - b).norm() < 1e-12));
    assert!(evaluate_1d(&sys, &alpha, Layout::Scaling, 16).is_err());
}

#[test]
fn ids_round_trip() {
    for f in ALL_FUNCTIONS {
        assert_eq!(TestFunction::from_id(f.id()).unwrap(), f);
        assert!(!f.smoothness().is_empty());
    }
    assert!(TestFunction::from_id("nope").is_err());
    assert_eq!(TestFunction::SinCos.eval(&[1.2, 0.5]), 0.0);
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let (x, w) = gauss_legendre(16);
    for deg in 0..32 {
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
        let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
        assert!((s - want).abs() < 1e-13, "deg {deg}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn noiseless_real_functions_are_conjugate_symmetric(w in -300.0f64..300.0) {
        for f in [TestFunction::XCos3Pi, TestFunction::Oscillating] {
            let a = f.fourier(&[w], 1).unwrap();
            let b = f.fourier(&[-w], 1).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-11);
        }
    }

    #[test]
    fn closed_form_oracle_agrees(w in -300.0f64..300.0) {
        prop_assume!((w.abs() - 1.5).abs() > 1e-3);
        let got = TestFunction::XCos3Pi.fourier(&[w], 1).unwrap();
        prop_assert!((got - xcos3pi_closed(w)).norm() <= 1e-10);
    }
}

use gensamp::nudft::*;
use gensamp::sampling::{make_equispaced_1d, make_log_1d};
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

type C = Complex<f64>;

fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C> {
    (0..n).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

// Naive sum, written out independently of the library.
fn oracle(freqs: &[f64], n: usize, e: usize, g: &[C]) -> Vec<C> {
    freqs
        .iter()
        .map(|&w| {
            (e..n - e).map(|k| g[k] * C::from_polar(1.0, -2.0 * PI * w * k as f64 / n as f64)).sum::<C>()
                / (n as f64).sqrt()
        })
        .collect()
}

fn oracle_2d(x: &[f64], y: &[f64], n: usize, e: usize, g: &[C]) -> Vec<C> {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            let mut s = C::new(0.0, 0.0);
            for k1 in e..n - e {
                for k2 in e..n - e {
                    s += g[k1 * n + k2] * C::from_polar(1.0, -2.0 * PI * (a * k1 as f64 + b * k2 as f64) / n as f64);
                }
            }
            s / n as f64
        })
        .collect()
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn nrm(a: &[C]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn rel(a: &[C], b: &[C]) -> f64 {
    let d: Vec<C> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    nrm(&d) / nrm(b).max(1e-300)
}

#[test]
fn unit_vector_gives_plain_exponential() {
    let freqs = [0.0, 0.5, -3.25, 17.0];
    let n = 32;
    let plan = NudftPlan::<f64>::new(&freqs, n, 2).unwrap();
    let mut g = vec![C::new(0.0, 0.0); n];
    g[2] = C::new(1.0, 0.0);
    let y = plan.apply(&g).unwrap();
    for (v, &w) in y.iter().zip(&freqs) {
        let want = C::from_polar(1.0 / (n as f64).sqrt(), -2.0 * PI * w * 2.0 / n as f64);
        assert!((v - want).norm() < 1e-14);
    }
}

#[test]
fn log_scheme_selects_nonuniform_and_matches_direct() {
    let s = make_log_1d(64.0, 0.97, 10_000).unwrap();
    let freqs = s.axis(0).to_vec();
    let n = 32;
    let plan = NudftPlan::<f64>::new(&freqs, n, 2).unwrap();
    assert!(matches!(plan.kind(), PlanKind::Nonuniform { .. }));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = rand_vec(&mut rng, n);
    assert!(rel(&plan.apply(&g).unwrap(), &oracle(&freqs, n, 2, &g)) < 1e-9);
}

#[test]
fn small_problem_selects_direct() {
    let freqs: Vec<f64> = (0..48).map(|i| i as f64 * 0.37 - 9.0).collect();
    let plan = NudftPlan::<f64>::new(&freqs, 32, 2).unwrap();
    assert_eq!(plan.kind(), PlanKind::Direct);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = rand_vec(&mut rng, 32);
    assert!(rel(&plan.apply(&g).unwrap(), &oracle(&freqs, 32, 2, &g)) < 1e-12);
}

#[test]
fn equispaced_unit_spacing_selects_uniform() {
    let s = make_equispaced_1d(1.0, 128).unwrap();
    let freqs = s.axis(0).to_vec();
    let plan = NudftPlan::<f64>::new(&freqs, 128, 3).unwrap();
    assert_eq!(plan.kind(), PlanKind::Uniform { ratio: [1, 1] });
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = rand_vec(&mut rng, 128);
    assert!(rel(&plan.apply(&g).unwrap(), &oracle(&freqs, 128, 3, &g)) < 1e-12);
}

#[test]
fn fractional_grid_uses_refined_fft() {
    let freqs: Vec<f64> = (-80..80).map(|i| i as f64 * 0.25).collect();
    let plan = NudftPlan::<f64>::new(&freqs, 64, 1).unwrap();
    assert_eq!(plan.kind(), PlanKind::Uniform { ratio: [4, 1] });
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = rand_vec(&mut rng, 64);
    assert!(rel(&plan.apply(&g).unwrap(), &oracle(&freqs, 64, 1, &g)) < 1e-12);
}

#[test]
fn adjoint_is_zero_outside_window() {
    let freqs: Vec<f64> = (0..300).map(|i| (i as f64 * 0.731).sin() * 90.0).collect();
    let plan = NudftPlan::<f64>::new(&freqs, 64, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let z = rand_vec(&mut rng, freqs.len());
    let out = plan.apply_adjoint(&z).unwrap();
    for k in (0..4).chain(60..64) {
        assert_eq!(out[k], C::new(0.0, 0.0));
    }
    assert!(out[4].norm() > 0.0);
}

#[test]
fn adjoint_identity_all_kinds() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 64;
    let nonuni: Vec<f64> = (0..500).map(|_| rng.random_range(-200.0..200.0)).collect();
    let uni: Vec<f64> = (-100..100).map(|i| i as f64 * 0.5).collect();
    for (freqs, choice) in [
        (&nonuni, PlanChoice::Nonuniform),
        (&nonuni, PlanChoice::Direct),
        (&uni, PlanChoice::Uniform),
    ] {
        let plan = NudftPlan::<f64>::with_options(freqs, n, 2, PlanOptions { choice, ..Default::default() }).unwrap();
        for _ in 0..10 {
            let x = rand_vec(&mut rng, n);
            let y = rand_vec(&mut rng, freqs.len());
            let lhs = dot(&plan.apply(&x).unwrap(), &y);
            let rhs = dot(&x, &plan.apply_adjoint(&y).unwrap());
            assert!((lhs - rhs).norm() <= 1e-9 * nrm(&x) * nrm(&y), "{choice:?}");
        }
    }
}

#[test]
fn adjoint_matches_direct_adjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let freqs: Vec<f64> = (0..400).map(|_| rng.random_range(-70.0..70.0)).collect();
    let fast = NudftPlan::<f64>::new(&freqs, 64, 3).unwrap();
    let slow = NudftPlan::<f64>::with_options(&freqs, 64, 3, PlanOptions { choice: PlanChoice::Direct, ..Default::default() }).unwrap();
    let z = rand_vec(&mut rng, freqs.len());
    assert!(rel(&fast.apply_adjoint(&z).unwrap(), &slow.apply_adjoint(&z).unwrap()) < 1e-9);
}

#[test]
fn coarser_accuracy_uses_narrower_kernel() {
    let freqs: Vec<f64> = (0..400).map(|i| i as f64 * 0.713 - 140.0).collect();
    let p = NudftPlan::<f64>::with_options(&freqs, 64, 0, PlanOptions { accuracy: 1e-6, ..Default::default() }).unwrap();
    let PlanKind::Nonuniform { width, .. } = p.kind() else { panic!() };
    assert!(width < width_for_accuracy(1e-9));
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let g = rand_vec(&mut rng, 64);
    assert!(rel(&p.apply(&g).unwrap(), &oracle(&freqs, 64, 0, &g)) < 1e-6);
}

#[test]
fn f32_plan_is_close() {
    let freqs: Vec<f64> = (0..300).map(|i| i as f64 * 0.41 - 60.0).collect();
    let p = NudftPlan::<f32>::new(&freqs, 64, 2).unwrap();
    let g: Vec<Complex<f32>> = (0..64).map(|k| Complex::new((k as f32 * 0.3).sin(), 0.5)).collect();
    let g64: Vec<C> = g.iter().map(|z| C::new(z.re as f64, z.im as f64)).collect();
    let y: Vec<C> = p.apply(&g).unwrap().iter().map(|z| C::new(z.re as f64, z.im as f64)).collect();
    assert!(rel(&y, &oracle(&freqs, 64, 2, &g64)) < 1e-5);
}

#[test]
fn rejects_bad_input() {
    assert!(NudftPlan::<f64>::new(&[0.0], 24, 0).is_err());
    assert!(NudftPlan::<f64>::new(&[f64::NAN], 16, 0).is_err());
    assert!(NudftPlan::<f64>::new(&[0.0], 16, 9).is_err());
    let p = NudftPlan::<f64>::new(&[0.0, 1.0], 16, 0).unwrap();
    assert!(p.apply(&[C::new(0.0, 0.0); 8]).is_err());
    assert!(p.apply_adjoint(&[C::new(0.0, 0.0); 3]).is_err());
    let o = PlanOptions { choice: PlanChoice::Uniform, ..Default::default() };
    assert!(NudftPlan::<f64>::with_options(&[0.1234567], 16, 0, o).is_err());
}

#[test]
fn plan_2d_unit_and_rank_one() {
    let n = 16;
    let e = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x: Vec<f64> = (0..200).map(|_| rng.random_range(-30.0..30.0)).collect();
    let y: Vec<f64> = (0..200).map(|_| rng.random_range(-30.0..30.0)).collect();
    let p = NudftPlan2d::<f64>::new(&x, &y, n, e).unwrap();
    assert!(matches!(p.kind(), PlanKind::Nonuniform { .. }));
    let mut g = vec![C::new(0.0, 0.0); n * n];
    g[e * n + e] = C::new(1.0, 0.0);
    let out = p.apply(&g).unwrap();
    for m in 0..x.len() {
        let want = C::from_polar(1.0 / n as f64, -2.0 * PI * (x[m] + y[m]) * e as f64 / n as f64);
        assert!((out[m] - want).norm() < 1e-10);
    }
    // rank one factors into two 1D transforms
    let u = rand_vec(&mut rng, n);
    let v = rand_vec(&mut rng, n);
    let g: Vec<C> = (0..n * n).map(|i| u[i / n] * v[i % n]).collect();
    let pu = oracle(&x, n, e, &u);
    let pv = oracle(&y, n, e, &v);
    let want: Vec<C> = pu.iter().zip(&pv).map(|(a, b)| a * b).collect();
    assert!(rel(&p.apply(&g).unwrap(), &want) < 1e-9);
}

#[test]
fn plan_2d_paths_agree_with_oracle() {
    let n = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let g = rand_vec(&mut rng, n * n);
    // uniform tensor grid
    let (mut x, mut y) = (vec![], vec![]);
    for i in -12..12 {
        for j in -12..12 {
            x.push(i as f64);
            y.push(j as f64 * 0.5);
        }
    }
    let p = NudftPlan2d::<f64>::new(&x, &y, n, 1).unwrap();
    assert_eq!(p.kind(), PlanKind::Uniform { ratio: [1, 2] });
    assert!(rel(&p.apply(&g).unwrap(), &oracle_2d(&x, &y, n, 1, &g)) < 1e-12);
    let xr: Vec<f64> = (0..300).map(|_| rng.random_range(-20.0..20.0)).collect();
    let yr: Vec<f64> = (0..300).map(|_| rng.random_range(-20.0..20.0)).collect();
    let p = NudftPlan2d::<f64>::new(&xr, &yr, n, 3).unwrap();
    assert!(rel(&p.apply(&g).unwrap(), &oracle_2d(&xr, &yr, n, 3, &g)) < 1e-9);
    let d = NudftPlan2d::<f64>::with_options(&xr, &yr, n, 3, PlanOptions { choice: PlanChoice::Direct, ..Default::default() }).unwrap();
    let z = rand_vec(&mut rng, 300);
    assert!(rel(&p.apply_adjoint(&z).unwrap(), &d.apply_adjoint(&z).unwrap()) < 1e-9);
}

#[test]
fn plan_2d_adjoint_identity() {
    let n = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let xr: Vec<f64> = (0..250).map(|_| rng.random_range(-40.0..40.0)).collect();
    let yr: Vec<f64> = (0..250).map(|_| rng.random_range(-40.0..40.0)).collect();
    let xu: Vec<f64> = (0..250).map(|i| (i % 25) as f64 - 12.0).collect();
    let yu: Vec<f64> = (0..250).map(|i| (i / 25) as f64 - 5.0).collect();
    for (x, y, choice) in [(&xr, &yr, PlanChoice::Nonuniform), (&xu, &yu, PlanChoice::Uniform), (&xr, &yr, PlanChoice::Direct)] {
        let p = NudftPlan2d::<f64>::with_options(x, y, n, 2, PlanOptions { choice, ..Default::default() }).unwrap();
        for _ in 0..5 {
            let a = rand_vec(&mut rng, n * n);
            let b = rand_vec(&mut rng, x.len());
            let lhs = dot(&p.apply(&a).unwrap(), &b);
            let rhs = dot(&a, &p.apply_adjoint(&b).unwrap());
            assert!((lhs - rhs).norm() <= 1e-9 * nrm(&a) * nrm(&b));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn linearity(seed in 0u64..1000, s in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let freqs: Vec<f64> = (0..200).map(|_| rng.random_range(-50.0..50.0)).collect();
        let p = NudftPlan::<f64>::new(&freqs, 32, 2).unwrap();
        let a = rand_vec(&mut rng, 32);
        let b = rand_vec(&mut rng, 32);
        let ab: Vec<C> = a.iter().zip(&b).map(|(x, y)| x * s + y).collect();
        let lhs = p.apply(&ab).unwrap();
        let (fa, fb) = (p.apply(&a).unwrap(), p.apply(&b).unwrap());
        let rhs: Vec<C> = fa.iter().zip(&fb).map(|(x, y)| x * s + y).collect();
        prop_assert!(rel(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn fast_matches_direct(seed in 0u64..1000, e in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let freqs: Vec<f64> = (0..150).map(|_| rng.random_range(-100.0..100.0)).collect();
        let p = NudftPlan::<f64>::with_options(&freqs, 64, e, PlanOptions { choice: PlanChoice::Nonuniform, ..Default::default() }).unwrap();
        let g = rand_vec(&mut rng, 64);
        prop_assert!(rel(&p.apply(&g).unwrap(), &oracle(&freqs, 64, e, &g)) < 1e-9);
    }
}

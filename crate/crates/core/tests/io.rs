use gensamp::harness::{add_noise, synthesize_samples, TestFunction};
use gensamp::io::*;
use gensamp::sampling::{make_jittered_1d, make_log_1d, make_radial_2d_with, make_uniform_2d};
use gensamp::wavelet::Layout;
use gensamp::C64;
use proptest::prelude::*;

#[test]
fn samples_round_trip_1d_and_2d() {
    let dir = tempfile::tempdir().unwrap();
    let s = make_jittered_1d(0.77, 0.1, 168, 1).unwrap();
    let set = add_noise(&synthesize_samples(TestFunction::Oscillating, &s, 1).unwrap(), 30.0, 9).unwrap();
    let p = dir.path().join("jit.csv");
    write_samples(&p, &set).unwrap();
    assert!(sidecar_path(&p).exists());
    assert_eq!(read_samples(&p).unwrap(), set);

    let s = make_radial_2d_with(8.0, 12, 0.5, 128).unwrap();
    let set = synthesize_samples(TestFunction::Phantom, &s, 1).unwrap();
    let p = dir.path().join("rad.csv");
    write_samples(&p, &set).unwrap();
    let back = read_samples(&p).unwrap();
    assert_eq!(back, set);
    let head = std::fs::read_to_string(&p).unwrap();
    assert!(head.starts_with("omega_1,omega_2,re,im\n"));
}

#[test]
fn schemes_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for s in [make_log_1d(64.0, 0.97, 100_000).unwrap(), make_uniform_2d(0.5, 1.0, 6).unwrap()] {
        let p = dir.path().join("s.csv");
        write_scheme(&p, &s).unwrap();
        assert_eq!(read_scheme(&p).unwrap(), s);
    }
}

#[test]
fn tampered_sample_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let s = make_jittered_1d(0.7, 0.1, 20, 1).unwrap();
    let set = synthesize_samples(TestFunction::XCos3Pi, &s, 1).unwrap();
    let p = dir.path().join("a.csv");
    write_samples(&p, &set).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines[3] = lines[3].replacen(|c: char| c.is_ascii_digit(), "9", 1);
    std::fs::write(&p, lines.join("\n")).unwrap();
    assert!(read_samples(&p).is_err());
    std::fs::write(&p, "w,re,im\n1,2,3\n").unwrap();
    assert!(read_samples(&p).is_err());
}

#[test]
fn coefficients_round_trip_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let h = CoefficientHeader::new(2, 3, 3, 4, Layout::Wavelet);
    let v: Vec<C64> = (0..h.len()).map(|i| C64::new((i as f64).sqrt() * 1e-3, -(i as f64) / 7.0)).collect();
    let p = dir.path().join("c.bin");
    write_coefficients(&p, &h, &v).unwrap();
    assert_eq!(std::fs::metadata(&p).unwrap().len(), 16 * 256);
    let bytes = std::fs::read(&p).unwrap();
    assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), v[1].re);
    let (h2, v2) = read_coefficients(&p).unwrap();
    assert_eq!((h2, v2), (h.clone(), v.clone()));
    assert!(write_coefficients(&p, &h, &v[..10]).is_err());
}

#[test]
fn pgm_round_trip_within_quantisation() {
    let dir = tempfile::tempdir().unwrap();
    let (w, h) = (37, 21);
    let v: Vec<f64> = (0..w * h).map(|i| ((i as f64) * 0.13).sin() * 2.5 - 0.3).collect();
    let p = dir.path().join("r.pgm");
    write_pgm(&p, &v, w, h).unwrap();
    let r = read_pgm(&p).unwrap();
    assert_eq!((r.width, r.height), (w, h));
    let step = (r.max - r.min) / 65535.0;
    assert!(r.values.iter().zip(&v).all(|(a, b)| (a - b).abs() <= 0.5 * step + 1e-15));
    assert!(write_pgm(&p, &[f64::NAN], 1, 1).is_err());
}

#[test]
fn raster_1d_and_summary_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let v: Vec<C64> = (0..64).map(|i| C64::new(i as f64 / 3.0, -1e-17 * i as f64)).collect();
    let p = dir.path().join("r.csv");
    write_raster_1d(&p, &v).unwrap();
    assert_eq!(read_raster_1d(&p).unwrap(), v);
    let rows = vec![
        SummaryRow { method: "gs".into(), order: 4, n: 64, m_or_k: 128, snr: 0.0, l2_error: 3.4e-3, seconds: 0.01 },
        SummaryRow { method: "tfs".into(), order: 0, n: 64, m_or_k: 128, snr: 30.0, l2_error: 0.125, seconds: 0.001 },
    ];
    let p = dir.path().join("summary.csv");
    write_summary(&p, &rows).unwrap();
    assert!(std::fs::read_to_string(&p).unwrap().starts_with("method,order,N,M_or_K,snr,l2_error,seconds"));
    assert_eq!(read_summary(&p).unwrap(), rows);
    write_summary(&p, &[]).unwrap();
    assert!(read_summary(&p).unwrap().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn coefficient_values_survive(re in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 16)) {
        let dir = tempfile::tempdir().unwrap();
        let h = CoefficientHeader::new(1, 2, 2, 3, Layout::Scaling);
        let v: Vec<C64> = re.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
        let p = dir.path().join("c.bin");
        write_coefficients(&p, &h, &v).unwrap();
        prop_assert_eq!(read_coefficients(&p).unwrap().1, v);
    }
}

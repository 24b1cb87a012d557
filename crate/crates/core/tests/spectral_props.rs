use num_complex::Complex64;
use proptest::prelude::*;
use tmode_core::spectral::units::{convert_bandwidth, wavelength_fwhm};
use tmode_core::spectral::{apply_chirp, hg_mode, inner_product, make_grid, ChirpPhase, HermiteGaussParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hermite_gauss_modes_are_orthonormal(a in 0usize..=6, b in 0usize..=6, width in 1e-3f64..2e-2) {
        let grid = make_grid(1.2, 12.0 * 7f64.sqrt() * width, 512).unwrap();
        let ma = hg_mode(&HermiteGaussParams::new(a, 1.2, width).unwrap(), &grid).unwrap();
        let mb = hg_mode(&HermiteGaussParams::new(b, 1.2, width).unwrap(), &grid).unwrap();
        let ip = inner_product(&ma, &mb).unwrap();
        let want = if a == b { 1.0 } else { 0.0 };
        prop_assert!((ip - Complex64::new(want, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn chirp_keeps_the_intensity(order in 0usize..=4, chirp in -2e6f64..2e6) {
        let grid = make_grid(2.45, 0.1, 301).unwrap();
        let m = hg_mode(&HermiteGaussParams::new(order, 2.45, 0.005).unwrap(), &grid).unwrap();
        let c = apply_chirp(&m, &ChirpPhase::new(chirp, 2.45));
        for (x, y) in m.amplitudes().iter().zip(c.amplitudes()) {
            prop_assert!((x.norm_sqr() - y.norm_sqr()).abs() < 1e-12 * (1.0 + x.norm_sqr()));
        }
    }

    #[test]
    fn bandwidth_conversion_round_trips(center in 400f64..2000.0, fwhm in 0.05f64..20.0) {
        let c = convert_bandwidth(center, fwhm).unwrap();
        let back = wavelength_fwhm(center, c.fwhm_frequency).unwrap();
        prop_assert!((back / fwhm - 1.0).abs() < 1e-9);
    }
}

#[test]
fn chirp_zero_is_identity() {
    let grid = make_grid(1.0, 0.1, 64).unwrap();
    let m = hg_mode(&HermiteGaussParams::new(3, 1.0, 0.01).unwrap(), &grid).unwrap();
    assert_eq!(apply_chirp(&m, &ChirpPhase::new(0.0, 1.0)), m);
}

#[test]
fn converter_bandwidths_in_frequency() {
    // 4.9 nm at 1540 nm is ~620 GHz
    let c = convert_bandwidth(1540.0, 4.9).unwrap();
    assert!((c.fwhm_frequency - 620.0).abs() < 1.0, "{}", c.fwhm_frequency);
}

use num_complex::Complex64;
use proptest::prelude::*;
use tmode_core::pdc::ModalDensityMatrix;
use tmode_core::qpg::{
    apply_mode_filter, build_mapping, project_probability, separability_report, suppression_ratio, FilterSpec,
    SelectivityModel,
};
use tmode_core::spectral::units::{angular_frequency, convert_bandwidth, wavelength_fwhm};
use tmode_core::spectral::{hg_mode, inner_product, make_grid, ComplexSpectrum, FrequencyGrid, HermiteGaussParams};

const INPUT_NM: f64 = 1540.0;
const OUTPUT_NM: f64 = 558.0;

/// Amplitude width (rad/fs) of a band with intensity FWHM `ghz` at `nm`.
fn width_from_ghz(nm: f64, ghz: f64) -> f64 {
    convert_bandwidth(nm, wavelength_fwhm(nm, ghz).unwrap()).unwrap().amplitude_width()
}

struct Converter {
    input: FrequencyGrid,
    output: FrequencyGrid,
    pump: ComplexSpectrum,
    pm: ComplexSpectrum,
    pump_width: f64,
    pm_width: f64,
}

fn converter(order: usize, n: usize) -> Converter {
    let w_in = angular_frequency(INPUT_NM).unwrap();
    let w_out = angular_frequency(OUTPUT_NM).unwrap();
    let pump_width = width_from_ghz(INPUT_NM, 620.0);
    let pm_width = width_from_ghz(OUTPUT_NM, 59.0);
    let reach = 6.0 * ((order + 1) as f64).sqrt() * pump_width;
    let input = make_grid(w_in, 2.0 * reach, n).unwrap();
    let output = make_grid(w_out, 2.0 * reach, n).unwrap();
    let pg = make_grid(w_out - w_in, 4.0 * reach, 2 * n).unwrap();
    let pump = hg_mode(&HermiteGaussParams::new(order, w_out - w_in, pump_width).unwrap(), &pg).unwrap();
    let pmg = make_grid(w_out, 8.0 * reach, 4 * n).unwrap();
    let pm = hg_mode(&HermiteGaussParams::new(0, w_out, pm_width).unwrap(), &pmg).unwrap();
    Converter { input, output, pump, pm, pump_width, pm_width }
}

#[test]
fn narrow_phasematching_makes_the_converter_single_mode() {
    let c = converter(0, 256);
    let xi = build_mapping(&c.pump, &c.pm, 0.0, &c.input, &c.output).unwrap();
    let r = separability_report(&xi, 10).unwrap();
    assert!(r.separability > 0.99, "{}", r.separability);
    // Gaussian kernel exp(-(y-x)²/2a² - y²/2b²) has purity P = 1/√(1 + b²/a²)
    // and geometric weights (1-μ)μ^k with P = (1-μ)/(1+μ), so γ₁ = 2P/(1+P)
    let ratio = (c.pm_width / c.pump_width).powi(2);
    let purity = 1.0 / (1.0 + ratio).sqrt();
    let expected = 2.0 * purity / (1.0 + purity);
    assert!((r.separability - expected).abs() < 1e-3, "{} vs {expected}", r.separability);
}

#[test]
fn hg1_pump_selects_hg1_input() {
    let c = converter(1, 256);
    let xi = build_mapping(&c.pump, &c.pm, 0.0, &c.input, &c.output).unwrap();
    let r = separability_report(&xi, 10).unwrap();
    let hg1 = hg_mode(&HermiteGaussParams::new(1, c.input.center(), c.pump_width).unwrap(), &c.input).unwrap();
    let ov = inner_product(&hg1, &r.dominant_input_mode).unwrap().norm_sqr();
    assert!(ov > 0.98, "{ov}");
}

#[test]
fn skewed_phasematching_is_less_separable() {
    let c = converter(0, 160);
    let base =
        separability_report(&build_mapping(&c.pump, &c.pm, 0.0, &c.input, &c.output).unwrap(), 5).unwrap().separability;
    for s in [0.05, 0.2, 0.5, 1.0, 2.0] {
        let xi = build_mapping(&c.pump, &c.pm, s, &c.input, &c.output).unwrap();
        let sep = separability_report(&xi, 5).unwrap().separability;
        assert!(sep <= base + 1e-9, "skew {s}: {sep} > {base}");
    }
}

fn unit(d: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::ZERO; d];
    v[k] = Complex64::ONE;
    v
}

fn g2(w: &[f64]) -> f64 {
    let t: f64 = w.iter().sum();
    1.0 + w.iter().map(|x| (x / t).powi(2)).sum::<f64>()
}

#[test]
fn filter_example_from_renormalization() {
    let rho = ModalDensityMatrix::diagonal(&[0.8, 0.2]).unwrap();
    let out = apply_mode_filter(&rho, &FilterSpec::basis_element(2, 0, 0.22).unwrap()).unwrap();
    let oracle = [0.8 * 0.78, 0.2];
    let t: f64 = oracle.iter().sum();
    assert!((out.transmitted[0] - oracle[0] / t).abs() < 1e-12);
    assert!((out.transmitted_g2 - g2(&oracle)).abs() < 1e-12);
    assert!((out.transmitted[0] - 0.757).abs() < 1e-3 && (out.transmitted_g2 - 1.632).abs() < 1e-3);
}

#[test]
fn imperfect_selectivity_reduces_suppression_of_a_mixed_state() {
    let eps = tmode_core::qpg::crosstalk_for_ratio(111.0, 7).unwrap();
    let sel = SelectivityModel::with_crosstalk(eps).unwrap();
    let coherent = ModalDensityMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let pdc = ModalDensityMatrix::diagonal(&[0.964, 0.03, 0.006, 0.0, 0.0, 0.0, 0.0]).unwrap();
    assert!((pdc.purity() - 0.93).abs() < 0.01);
    let r_coh = suppression_ratio(&coherent, &unit(7, 0), &unit(7, 1), &sel).unwrap();
    let r_pdc = suppression_ratio(&pdc, &unit(7, 0), &unit(7, 1), &sel).unwrap();
    assert!((r_coh.ratio - 111.0).abs() < 1e-9);
    assert!(r_pdc.ratio < r_coh.ratio);
}

#[test]
fn strong_filter_can_overshoot_balance() {
    // (1-η)·w_big² < w_small²: the dominant mode ends up the weaker one
    let rho = ModalDensityMatrix::diagonal(&[0.55, 0.45]).unwrap();
    let out = apply_mode_filter(&rho, &FilterSpec::basis_element(2, 0, 0.6).unwrap()).unwrap();
    assert!(out.transmitted_state.purity() > rho.purity());
}

fn random_state(seed: &[f64]) -> ModalDensityMatrix {
    let d = 3;
    let g = tmode_core::linalg::CMatrix::from_fn(d, d, |i, j| {
        Complex64::new(seed[2 * (i * d + j)], seed[2 * (i * d + j) + 1])
    });
    ModalDensityMatrix::from_psd(&g * g.adjoint(), None, 0.0).unwrap()
}

proptest! {
    #[test]
    fn direction_law(w0 in 0.01f64..1.0, w1 in 0.01f64..1.0, eta in 0.01f64..0.99) {
        prop_assume!((w0 - w1).abs() > 1e-3);
        // beyond this the filtered dominant mode drops below the other one
        let (big, small) = (w0.max(w1), w0.min(w1));
        prop_assume!((1.0 - eta) * big * big > small * small * (1.0 + 1e-9));
        let t = w0 + w1;
        let rho = ModalDensityMatrix::diagonal(&[w0 / t, w1 / t]).unwrap();
        let before = rho.purity();
        let f0 = apply_mode_filter(&rho, &FilterSpec::basis_element(2, 0, eta).unwrap()).unwrap();
        let f1 = apply_mode_filter(&rho, &FilterSpec::basis_element(2, 1, eta).unwrap()).unwrap();
        let p0 = f0.transmitted_state.purity();
        let p1 = f1.transmitted_state.purity();
        if w0 > w1 {
            prop_assert!(p0 < before && p1 > before);
        } else {
            prop_assert!(p0 > before && p1 < before);
        }
    }

    #[test]
    fn filter_bookkeeping(seed in prop::collection::vec(-1.0f64..1.0, 18), eta in 0.0f64..1.0,
                          mode in prop::collection::vec(-1.0f64..1.0, 6)) {
        let rho = random_state(&seed);
        let v: Vec<Complex64> = (0..3).map(|k| Complex64::new(mode[2 * k], mode[2 * k + 1])).collect();
        let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let v: Vec<Complex64> = v.iter().map(|c| c / n).collect();
        let out = apply_mode_filter(&rho, &FilterSpec::new(v, eta).unwrap()).unwrap();
        prop_assert!((out.transmitted_weight + out.upconverted_weight - 1.0).abs() < 1e-12);
        if let Some(g) = out.upconverted_g2 {
            prop_assert_eq!(g, 2.0);
        }
    }

    #[test]
    fn full_crosstalk_is_uniform(seed in prop::collection::vec(-1.0f64..1.0, 18), k in 0usize..3) {
        let rho = random_state(&seed);
        let sel = SelectivityModel::with_crosstalk(1.0).unwrap();
        let p = project_probability(&rho, &unit(3, k), &sel).unwrap();
        prop_assert!((p - 1.0 / 3.0).abs() < 1e-12);
    }
}

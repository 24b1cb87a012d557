#![allow(dead_code)]

use num_complex::Complex64;
use tmode_core::pdc::{build_jsa, JointSpectralAmplitude, PhasematchingModel};
use tmode_core::spectral::units::{angular_frequency, convert_bandwidth};
use tmode_core::spectral::{apply_chirp, hg_mode, make_grid, ChirpPhase, FrequencyGrid, HermiteGaussParams};

pub const PUMP_NM: f64 = 769.0;

/// Pump amplitude width (rad/fs) of a Gaussian pump with the given
/// wavelength FWHM at 769 nm.
pub fn pump_width(fwhm_nm: f64) -> f64 {
    convert_bandwidth(PUMP_NM, fwhm_nm).unwrap().amplitude_width()
}

pub fn signal_center() -> f64 {
    angular_frequency(PUMP_NM).unwrap() / 2.0
}

/// Degenerate signal/idler grid with `n` points wide enough for a pump of
/// amplitude width `sigma_p` and phasematching width `sigma_pm`.
pub fn output_grid(sigma_p: f64, sigma_pm: f64, order: usize, n: usize) -> FrequencyGrid {
    let reach = 6.0 * ((order + 1) as f64).sqrt() * (sigma_p / 2f64.sqrt()).max(sigma_pm);
    make_grid(signal_center(), 2.0 * reach, n).unwrap()
}

pub struct Source {
    pub order: usize,
    pub sigma_p: f64,
    pub sigma_pm: f64,
    pub angle: f64,
    pub chirp: f64,
    pub n: usize,
}

impl Source {
    pub fn matched(sigma_p: f64, n: usize) -> Self {
        Self { order: 0, sigma_p, sigma_pm: sigma_p / 2f64.sqrt(), angle: 45.0, chirp: 0.0, n }
    }

    pub fn jsa(&self) -> JointSpectralAmplitude {
        let g = output_grid(self.sigma_p, self.sigma_pm, self.order, self.n);
        let pg = FrequencyGrid::sum_grid(&g, &g).unwrap();
        let pump = hg_mode(&HermiteGaussParams::new(self.order, pg.center(), self.sigma_p).unwrap(), &pg).unwrap();
        let pump = apply_chirp(&pump, &ChirpPhase::new(self.chirp, pg.center()));
        let pm = PhasematchingModel::gaussian(self.angle, self.sigma_pm).unwrap();
        build_jsa(&pump, &pm, &g, &g).unwrap()
    }
}

/// Purity `Σ s⁴ / (Σ s²)²` from the singular values of a matrix, computed
/// without going through the Schmidt routine.
pub fn svd_purity(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    let s = m.singular_values();
    let p2: f64 = s.iter().map(|x| x * x).sum();
    s.iter().map(|x| x.powi(4)).sum::<f64>() / (p2 * p2)
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ComplexSpectrum;

/// Quadratic spectral phase `exp[iA(ω-ω₀)²]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpPhase {
    /// A in fs².
    pub coefficient: f64,
    /// ω₀ in rad/fs.
    pub center: f64,
}

impl ChirpPhase {
    pub fn new(coefficient: f64, center: f64) -> Self {
        Self { coefficient, center }
    }

    pub fn phase_at(&self, omega: f64) -> f64 {
        self.coefficient * (omega - self.center).powi(2)
    }
}

/// Multiplies every amplitude by `exp[iA(ω-ω₀)²]`.
pub fn apply_chirp(spectrum: &ComplexSpectrum, chirp: &ChirpPhase) -> ComplexSpectrum {
    if chirp.coefficient == 0.0 {
        return spectrum.clone();
    }
    let grid = *spectrum.grid();
    let shift = grid.center() - chirp.center;
    let amps = spectrum
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let d = grid.offset(j) + shift;
            a * Complex64::from_polar(1.0, chirp.coefficient * d * d)
        })
        .collect();
    ComplexSpectrum { grid, amplitudes: amps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{hg_mode, inner_product, make_grid, HermiteGaussParams};

    fn gaussian() -> ComplexSpectrum {
        let grid = make_grid(2.45, 0.06, 512).unwrap();
        hg_mode(&HermiteGaussParams::new(0, 2.45, 0.005).unwrap(), &grid).unwrap()
    }

    #[test]
    fn zero_chirp_is_identity() {
        let s = gaussian();
        assert_eq!(apply_chirp(&s, &ChirpPhase::new(0.0, 2.45)), s);
    }

    #[test]
    fn chirp_only_changes_phase() {
        let s = gaussian();
        for a in [1e3, 3.8e5, -2e6] {
            let c = apply_chirp(&s, &ChirpPhase::new(a, 2.45));
            for (x, y) in s.amplitudes().iter().zip(c.amplitudes()) {
                assert!((x.norm() - y.norm()).abs() < 1e-14);
            }
            let n = inner_product(&c, &c).unwrap().re;
            assert!((n - s.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_follows_quadratic_law() {
        let s = gaussian();
        let chirp = ChirpPhase::new(2.0e5, 2.44);
        let c = apply_chirp(&s, &chirp);
        let j = 300;
        let w = s.grid().point(j);
        let ratio = c.amplitudes()[j] / s.amplitudes()[j];
        let want = Complex64::from_polar(1.0, chirp.phase_at(w));
        assert!((ratio - want).norm() < 1e-9);
    }
}

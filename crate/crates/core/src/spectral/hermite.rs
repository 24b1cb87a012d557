use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexSpectrum, FrequencyGrid};
use crate::error::{invalid, Error, Result};

/// Highest supported Hermite-Gauss order.
pub const MAX_HG_ORDER: usize = 20;

/// Hermite-Gauss spectral mode `H_n((ω-ω₀)/σ) exp(-(ω-ω₀)²/(2σ²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteGaussParams {
    pub order: usize,
    /// ω₀ in rad/fs.
    pub center: f64,
    /// Amplitude width σ in rad/fs.
    pub width: f64,
}

impl HermiteGaussParams {
    pub fn new(order: usize, center: f64, width: f64) -> Result<Self> {
        let p = Self { order, center, width };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(invalid(format!("Hermite-Gauss width must be positive, got {}", self.width)));
        }
        if !self.center.is_finite() {
            return Err(invalid("Hermite-Gauss center must be finite"));
        }
        if self.order > MAX_HG_ORDER {
            return Err(Error::UnsupportedOrder { order: self.order, max: MAX_HG_ORDER });
        }
        Ok(())
    }

    pub fn with_order(self, order: usize) -> Self {
        Self { order, ..self }
    }
}

/// Normalized Hermite function `h_n(x) = H_n(x) e^{-x²/2} / sqrt(2ⁿ n! √π)`
/// by the three-term recurrence
/// `h_{k+1} = sqrt(2/(k+1)) x h_k - sqrt(k/(k+1)) h_{k-1}`.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Samples the Hermite-Gauss mode on `grid` and normalizes it to unit
/// discrete norm. The result is real with flat phase.
pub fn hg_mode(params: &HermiteGaussParams, grid: &FrequencyGrid) -> Result<ComplexSpectrum> {
    params.validate()?;
    // two widths past the classical turning point leaves < 1e-8 of the norm outside
    let reach = params.width * (((2 * params.order + 1) as f64).sqrt() + 2.0);
    if grid.first() > params.center - reach || grid.last() < params.center + reach {
        log::warn!(
            "grid [{:.6}, {:.6}] does not span ±σ(√(2n+1)+2) around {:.6} for HG{}",
            grid.first(),
            grid.last(),
            params.center,
            params.order
        );
    }
    // offsets taken from the index keep mirrored samples exactly antisymmetric
    let shift = grid.center() - params.center;
    let amps = (0..grid.count())
        .map(|j| {
            let x = (grid.offset(j) + shift) / params.width;
            Complex64::new(hermite_function(params.order, x), 0.0)
        })
        .collect();
    ComplexSpectrum::new(*grid, amps)?.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{inner_product, make_grid};

    fn grid_for(width: f64, reach: f64, count: usize) -> FrequencyGrid {
        make_grid(1.2, 2.0 * reach * width, count).unwrap()
    }

    #[test]
    fn recurrence_matches_closed_forms() {
        let c = std::f64::consts::PI.powf(-0.25);
        for &x in &[-2.3f64, -0.4, 0.0, 0.7, 3.1] {
            let g = (-x * x / 2.0).exp();
            assert!((hermite_function(0, x) - c * g).abs() < 1e-15);
            assert!((hermite_function(1, x) - c * 2f64.sqrt() * x * g).abs() < 1e-15);
            let h2 = (4.0 * x * x - 2.0) / (8f64).sqrt();
            assert!((hermite_function(2, x) - c * h2 * g).abs() < 1e-14);
            let h3 = (8.0 * x.powi(3) - 12.0 * x) / (48f64).sqrt();
            assert!((hermite_function(3, x) - c * h3 * g).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_peaks_at_center() {
        let grid = grid_for(0.01, 6.0, 101);
        let p = HermiteGaussParams::new(0, 1.2, 0.01).unwrap();
        let m = hg_mode(&p, &grid).unwrap();
        let (imax, _) = m.amplitudes().iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
        assert_eq!(imax, 50);
        assert!(m.is_normalized(1e-12));
    }

    #[test]
    fn odd_order_is_antisymmetric() {
        let grid = grid_for(0.02, 6.0, 512);
        let m = hg_mode(&HermiteGaussParams::new(1, 1.2, 0.02).unwrap(), &grid).unwrap();
        let a = m.amplitudes();
        for j in 0..a.len() {
            assert!((a[j] + a[a.len() - 1 - j]).norm() < 1e-10);
        }
    }

    #[test]
    fn parity_is_exact_on_symmetric_grids() {
        let grid = grid_for(0.003, 6.0 * 7f64.sqrt(), 512);
        for n in 0..=6 {
            let m = hg_mode(&HermiteGaussParams::new(n, 1.2, 0.003).unwrap(), &grid).unwrap();
            let a = m.amplitudes();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for j in 0..a.len() {
                assert_eq!(a[j], a[a.len() - 1 - j] * sign);
            }
        }
    }

    #[test]
    fn orthonormal_up_to_order_six() {
        let w = 0.003;
        let grid = grid_for(w, 6.0 * 7f64.sqrt(), 512);
        let modes: Vec<_> =
            (0..=6).map(|n| hg_mode(&HermiteGaussParams::new(n, 1.2, w).unwrap(), &grid).unwrap()).collect();
        for (m, a) in modes.iter().enumerate() {
            for (n, b) in modes.iter().enumerate() {
                let ip = inner_product(a, b).unwrap();
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((ip - want).norm() < 1e-6, "<{m}|{n}> = {ip}");
            }
        }
    }

    #[test]
    fn hg0_hg1_orthogonal_within_1e_8() {
        let grid = grid_for(0.01, 6.0, 512);
        let p = HermiteGaussParams::new(0, 1.2, 0.01).unwrap();
        let a = hg_mode(&p, &grid).unwrap();
        let b = hg_mode(&p.with_order(1), &grid).unwrap();
        assert!(inner_product(&a, &b).unwrap().norm() < 1e-8);
    }

    #[test]
    fn order_above_cap_is_rejected() {
        let grid = grid_for(0.01, 6.0, 64);
        let p = HermiteGaussParams { order: 21, center: 1.2, width: 0.01 };
        assert!(matches!(hg_mode(&p, &grid), Err(Error::UnsupportedOrder { order: 21, .. })));
        assert!(HermiteGaussParams::new(20, 1.2, 0.01).is_ok());
        assert!(HermiteGaussParams::new(2, 1.2, 0.0).is_err());
    }

    #[test]
    fn order_twenty_stays_finite_and_normalized() {
        let grid = grid_for(0.01, 6.0 * 21f64.sqrt(), 1024);
        let m = hg_mode(&HermiteGaussParams::new(20, 1.2, 0.01).unwrap(), &grid).unwrap();
        assert!(m.amplitudes().iter().all(|a| a.re.is_finite()));
        assert!(m.is_normalized(1e-12));
    }
}

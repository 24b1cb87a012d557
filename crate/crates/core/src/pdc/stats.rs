use serde::Serialize;

use super::SchmidtDecomposition;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PurityEstimate {
    /// Σγ_k² over the kept modes.
    pub purity: f64,
    /// Upper bound on the contribution of the truncated residual weight.
    pub residual_bound: f64,
}

/// `P = Σγ_k²`. The discarded weight `r` can add at most `r·γ_min` more,
/// since every dropped γ is no larger than the smallest kept one.
pub fn purity_from_schmidt(dec: &SchmidtDecomposition) -> PurityEstimate {
    let purity = dec.weights.iter().map(|g| g * g).sum();
    let min_kept = dec.weights.iter().copied().fold(f64::INFINITY, f64::min);
    let residual_bound =
        if dec.residual_weight > 0.0 && min_kept.is_finite() { dec.residual_weight * min_kept } else { 0.0 };
    PurityEstimate { purity, residual_bound }
}

/// Heralded-free marginal `g² = 1 + P`.
pub fn g2_from_purity(purity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&purity) {
        return Err(invalid(format!("purity must lie in [0, 1], got {purity}")));
    }
    Ok(1.0 + purity)
}

/// `P = 1/√(1 + 16A²σ_s²σ_i²)` for a Gaussian state whose pump carries a
/// quadratic phase `A` (fs²); σ are the marginal intensity standard
/// deviations (rad/fs).
pub fn chirp_purity_analytic(chirp: f64, sigma_s: f64, sigma_i: f64) -> Result<f64> {
    if !(sigma_s > 0.0 && sigma_i > 0.0) {
        return Err(invalid("marginal widths must be positive"));
    }
    if !chirp.is_finite() {
        return Err(invalid("chirp must be finite"));
    }
    let x = 4.0 * chirp * sigma_s * sigma_i;
    Ok(1.0 / (1.0 + x * x).sqrt())
}

/// `⟨n⟩ = 1/(g^(1,1) − g²)`.
pub fn mean_photon_from_g11(g11: f64, g2: f64) -> Result<f64> {
    if !(g11.is_finite() && g2.is_finite()) {
        return Err(invalid("correlation values must be finite"));
    }
    if g11 <= g2 {
        return Err(invalid(format!("g11 ({g11}) must exceed g2 ({g2})")));
    }
    Ok(1.0 / (g11 - g2))
}

/// g² of a signal with autocorrelation `g2_signal` mixed with an independent
/// Poissonian background.
pub fn background_mixed_g2(g2_signal: f64, signal_rate: f64, background_rate: f64) -> Result<f64> {
    if !(signal_rate >= 0.0 && background_rate >= 0.0) {
        return Err(invalid("rates must be non-negative"));
    }
    let total = signal_rate + background_rate;
    if total == 0.0 {
        return Err(invalid("signal and background rates are both zero"));
    }
    let (s, b) = (signal_rate, background_rate);
    Ok((g2_signal * s * s + 2.0 * s * b + b * b) / (total * total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(weights: &[f64], residual: f64) -> SchmidtDecomposition {
        SchmidtDecomposition {
            weights: weights.to_vec(),
            residual_weight: residual,
            signal_modes: Vec::new(),
            idler_modes: Vec::new(),
        }
    }

    #[test]
    fn purity_examples() {
        assert_eq!(purity_from_schmidt(&dec(&[1.0], 0.0)).purity, 1.0);
        assert_eq!(purity_from_schmidt(&dec(&[0.5, 0.5], 0.0)).purity, 0.5);
        assert!((purity_from_schmidt(&dec(&[0.8, 0.2], 0.0)).purity - 0.68).abs() < 1e-15);
        let p = purity_from_schmidt(&dec(&[0.8, 0.15], 0.05));
        assert!((p.residual_bound - 0.05 * 0.15).abs() < 1e-15);
    }

    #[test]
    fn g2_examples() {
        assert_eq!(g2_from_purity(1.0).unwrap(), 2.0);
        assert_eq!(g2_from_purity(0.5).unwrap(), 1.5);
        assert!((g2_from_purity(0.929).unwrap() - 1.929).abs() < 1e-15);
        assert!(g2_from_purity(1.01).is_err());
        assert!(g2_from_purity(-0.1).is_err());
    }

    #[test]
    fn chirp_purity_examples() {
        assert_eq!(chirp_purity_analytic(0.0, 1e-3, 2e-3).unwrap(), 1.0);
        // 16A²σ_s²σ_i² = 3
        let (s, i) = (1e-3, 2e-3);
        let a = (3.0f64 / 16.0).sqrt() / (s * i);
        assert!((chirp_purity_analytic(a, s, i).unwrap() - 0.5).abs() < 1e-12);
        assert!(chirp_purity_analytic(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn photon_number_examples() {
        let n = mean_photon_from_g11(8.303, 1.929).unwrap();
        assert!((0.15..=0.16).contains(&n), "{n}");
        assert!((mean_photon_from_g11(2.0 + 1.0 / 0.3, 2.0).unwrap() - 0.3).abs() < 1e-12);
        assert!(mean_photon_from_g11(1.5, 2.0).is_err());
    }

    #[test]
    fn background_examples() {
        assert_eq!(background_mixed_g2(1.7, 10.0, 0.0).unwrap(), 1.7);
        assert!((background_mixed_g2(1.0, 3.0, 7.0).unwrap() - 1.0).abs() < 1e-15);
        let g = background_mixed_g2(2.0, 96.0, 4.0).unwrap();
        assert!(g < 2.0 && g > 1.9);
        assert!(background_mixed_g2(2.0, 0.0, 0.0).is_err());
    }
}

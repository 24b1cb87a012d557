use num_complex::Complex64;
use serde::Serialize;

use super::JointSpectralAmplitude;
use crate::error::{invalid, Result};
use crate::linalg::{sorted_svd, CMatrix};
use crate::spectral::{ComplexSpectrum, FrequencyGrid};

/// Default number of Schmidt modes kept.
pub const DEFAULT_MAX_MODES: usize = 20;

/// `f(ω_s, ω_i) = Σ_k √γ_k ψ_k(ω_s) φ_k(ω_i)`, truncated.
///
/// `weights` are normalized against the full spectrum, so
/// `Σ weights + residual_weight = 1`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub weights: Vec<f64>,
    pub residual_weight: f64,
    pub signal_modes: Vec<ComplexSpectrum>,
    pub idler_modes: Vec<ComplexSpectrum>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchmidtSummary {
    pub weights: Vec<f64>,
    pub residual_weight: f64,
    pub purity: f64,
    pub purity_residual_bound: f64,
    pub schmidt_number: f64,
}

impl SchmidtDecomposition {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn summary(&self) -> SchmidtSummary {
        let p = super::purity_from_schmidt(self);
        SchmidtSummary {
            weights: self.weights.clone(),
            residual_weight: self.residual_weight,
            purity: p.purity,
            purity_residual_bound: p.residual_bound,
            schmidt_number: 1.0 / p.purity,
        }
    }

    /// Resynthesizes the (truncated) amplitude matrix.
    pub fn reconstruct(&self) -> CMatrix {
        let ns = self.signal_modes[0].grid().count();
        let ni = self.idler_modes[0].grid().count();
        let mut m = CMatrix::zeros(ns, ni);
        for ((g, psi), phi) in self.weights.iter().zip(&self.signal_modes).zip(&self.idler_modes) {
            let a = g.sqrt();
            for s in 0..ns {
                let left = psi.amplitudes()[s] * a;
                for i in 0..ni {
                    m[(s, i)] += left * phi.amplitudes()[i];
                }
            }
        }
        m
    }
}

/// Weights and unit-norm row/column modes of a sampled two-variable kernel.
pub(crate) fn decompose_kernel(
    m: &CMatrix,
    row_grid: &FrequencyGrid,
    col_grid: &FrequencyGrid,
    max_modes: usize,
) -> Result<SchmidtDecomposition> {
    if max_modes == 0 {
        return Err(invalid("max_modes must be at least 1"));
    }
    let svd = sorted_svd(m);
    let cell = row_grid.spacing() * col_grid.spacing();
    let raw: Vec<f64> = svd.singular_values.iter().map(|s| s * s * cell).collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(invalid("cannot decompose a zero kernel"));
    }
    let keep = max_modes.min(raw.len());
    let weights: Vec<f64> = raw[..keep].iter().map(|g| g / total).collect();
    let residual_weight = (raw[keep..].iter().sum::<f64>() / total).max(0.0);

    let su = 1.0 / row_grid.spacing().sqrt();
    let sv = 1.0 / col_grid.spacing().sqrt();
    let mut signal_modes = Vec::with_capacity(keep);
    let mut idler_modes = Vec::with_capacity(keep);
    for k in 0..keep {
        let psi: Vec<Complex64> = svd.u.column(k).iter().map(|a| a * su).collect();
        let phi: Vec<Complex64> = svd.v_t.row(k).iter().map(|a| a * sv).collect();
        signal_modes.push(ComplexSpectrum::new(*row_grid, psi)?);
        idler_modes.push(ComplexSpectrum::new(*col_grid, phi)?);
    }
    Ok(SchmidtDecomposition { weights, residual_weight, signal_modes, idler_modes })
}

/// Schmidt decomposition of a joint spectral amplitude by SVD.
pub fn schmidt_decompose(jsa: &JointSpectralAmplitude, max_modes: usize) -> Result<SchmidtDecomposition> {
    decompose_kernel(jsa.amplitudes(), jsa.signal_grid(), jsa.idler_grid(), max_modes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{hg_mode, inner_product, make_grid, HermiteGaussParams};

    #[test]
    fn product_kernel_has_single_mode() {
        let gs = make_grid(1.0, 0.2, 40).unwrap();
        let gi = make_grid(1.1, 0.3, 50).unwrap();
        let a = hg_mode(&HermiteGaussParams::new(0, 1.0, 0.02).unwrap(), &gs).unwrap();
        let b = hg_mode(&HermiteGaussParams::new(2, 1.1, 0.03).unwrap(), &gi).unwrap();
        let m = CMatrix::from_fn(40, 50, |s, i| a.amplitudes()[s] * b.amplitudes()[i]);
        let jsa = JointSpectralAmplitude::new(gs, gi, m).unwrap();
        let dec = schmidt_decompose(&jsa, 5).unwrap();
        assert!((dec.weights[0] - 1.0).abs() < 1e-8);
        assert!(dec.weights[1..].iter().all(|&g| g < 1e-8));
        let ov = inner_product(&dec.signal_modes[0], &a).unwrap().norm();
        assert!((ov - 1.0).abs() < 1e-8);
    }

    #[test]
    fn modes_are_orthonormal_and_weights_sum_to_one() {
        let g = make_grid(0.0, 8.0, 60).unwrap();
        let m = CMatrix::from_fn(60, 60, |s, i| {
            let (x, y) = (g.point(s), g.point(i));
            Complex64::from_polar((-(x * x + y * y) / 2.0 - 0.6 * x * y).exp(), 0.3 * x * y)
        });
        let jsa = JointSpectralAmplitude::new(g, g, m).unwrap();
        let dec = schmidt_decompose(&jsa, 10).unwrap();
        let total: f64 = dec.weights.iter().sum::<f64>() + dec.residual_weight;
        assert!((total - 1.0).abs() < 1e-12);
        assert!(dec.weights.windows(2).all(|w| w[0] >= w[1]));
        for a in 0..4 {
            for b in 0..4 {
                let want = if a == b { 1.0 } else { 0.0 };
                let ip = inner_product(&dec.signal_modes[a], &dec.signal_modes[b]).unwrap();
                assert!((ip - want).norm() < 1e-6);
                let ip = inner_product(&dec.idler_modes[a], &dec.idler_modes[b]).unwrap();
                assert!((ip - want).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn truncation_reports_residual() {
        let g = make_grid(0.0, 8.0, 40).unwrap();
        let m = CMatrix::from_fn(40, 40, |s, i| {
            let (x, y) = (g.point(s), g.point(i));
            Complex64::new((-(x * x + y * y) / 2.0 - 0.9 * x * y).exp(), 0.0)
        });
        let jsa = JointSpectralAmplitude::new(g, g, m).unwrap();
        let dec = schmidt_decompose(&jsa, 2).unwrap();
        assert_eq!(dec.len(), 2);
        assert!(dec.residual_weight > 1e-3);
        assert!((dec.weights.iter().sum::<f64>() + dec.residual_weight - 1.0).abs() < 1e-12);
        assert!(schmidt_decompose(&jsa, 0).is_err());
    }
}

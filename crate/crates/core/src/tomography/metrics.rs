use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CMatrix};
use crate::pdc::ModalDensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateMetrics {
    pub purity_a: f64,
    pub fidelity: f64,
    pub trace_distance: f64,
}

/// Purity of `a`, Uhlmann fidelity `(Tr√(√a b √a))²`, and trace distance
/// `½ Tr|a − b|`.
pub fn state_metrics(a: &ModalDensityMatrix, b: &ModalDensityMatrix) -> Result<StateMetrics> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch { expected: a.dimension(), found: b.dimension() });
    }
    let sa = linalg::psd_sqrt(a.entries());
    let inner = &sa * b.entries() * &sa;
    let ev = linalg::hermitian_eigenvalues(&inner);
    let floor = 1e-14 * ev.first().copied().unwrap_or(0.0).max(0.0);
    let root_sum: f64 = ev.iter().filter(|l| **l > floor).map(|l| l.sqrt()).sum();
    let diff = a.entries() - b.entries();
    let trace_distance = 0.5 * linalg::hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>();
    Ok(StateMetrics { purity_a: a.purity(), fidelity: (root_sum * root_sum).min(1.0), trace_distance })
}

/// Random density matrix `G G† / Tr` from a d×rank complex Gaussian `G`.
pub fn random_state(d: usize, rank: usize, seed: u64) -> Result<ModalDensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(invalid(format!("need 1 <= rank <= d, got rank {rank} for d = {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(d, rank, |_, _| {
        Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    });
    ModalDensityMatrix::from_psd(&g * g.adjoint(), None, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_orthogonal_states() {
        let a = ModalDensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let b = ModalDensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        let same = state_metrics(&a, &a).unwrap();
        assert!((same.fidelity - 1.0).abs() < 1e-12 && same.trace_distance < 1e-12);
        let orth = state_metrics(&a, &b).unwrap();
        assert!(orth.fidelity < 1e-12 && (orth.trace_distance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_versus_maximally_mixed() {
        let pure = random_state(7, 1, 11).unwrap();
        let mixed = ModalDensityMatrix::maximally_mixed(7).unwrap();
        let m = state_metrics(&pure, &mixed).unwrap();
        assert!((m.fidelity - 1.0 / 7.0).abs() < 1e-10);
        assert!((m.purity_a - 1.0).abs() < 1e-12);
        assert!(state_metrics(&pure, &ModalDensityMatrix::maximally_mixed(3).unwrap()).is_err());
    }

    #[test]
    fn random_states_are_valid() {
        for r in 1..=4 {
            let s = random_state(4, r, r as u64).unwrap();
            let ev = s.eigenvalues();
            assert_eq!(ev.iter().filter(|l| **l > 1e-10).count(), r);
        }
        assert!(random_state(3, 4, 0).is_err());
    }
}

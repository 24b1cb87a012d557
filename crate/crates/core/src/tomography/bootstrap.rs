use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::counts::poisson;
use super::{mle_reconstruct, state_metrics, CountRecord, MleConfig, ProjectorSet};
use crate::error::{invalid, Result};
use crate::export::{to_json_string, Export};

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloSummary {
    pub resamples: usize,
    pub purity_mean: f64,
    pub purity_std: f64,
    /// Spread of the fidelity between each resampled estimate and the
    /// estimate from the original record.
    pub fidelity_std: f64,
    /// Purity of the estimate from the original record.
    pub estimate_purity: f64,
}

impl Export for MonteCarloSummary {
    fn kind(&self) -> &'static str {
        "Monte Carlo summary"
    }

    fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Poisson resampling of every count, followed by reconstruction.
///
/// Resample `k` draws from its own ChaCha stream `k` under `seed`, so the
/// result does not depend on how the work is scheduled across threads.
pub fn monte_carlo_errors(
    records: &[CountRecord],
    set: &ProjectorSet,
    cfg: &MleConfig,
    resamples: usize,
    seed: u64,
) -> Result<MonteCarloSummary> {
    if resamples < 2 {
        return Err(invalid(format!("need at least 2 resamples, got {resamples}")));
    }
    let estimate = mle_reconstruct(records, set, cfg)?.rho_hat;
    let stats: Vec<(f64, f64)> = (0..resamples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let resampled = records
                .iter()
                .map(|r| Ok(CountRecord { counts: poisson(&mut rng, r.counts as f64)?, ..*r }))
                .collect::<Result<Vec<_>>>()?;
            let rho = mle_reconstruct(&resampled, set, cfg)?.rho_hat;
            let m = state_metrics(&rho, &estimate)?;
            Ok((m.purity_a, m.fidelity))
        })
        .collect::<Result<_>>()?;
    let purities: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let fidelities: Vec<f64> = stats.iter().map(|s| s.1).collect();
    let (purity_mean, purity_std) = mean_std(&purities);
    let (_, fidelity_std) = mean_std(&fidelities);
    Ok(MonteCarloSummary { resamples, purity_mean, purity_std, fidelity_std, estimate_purity: estimate.purity() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdc::ModalDensityMatrix;
    use crate::qpg::SelectivityModel;
    use crate::tomography::{mub_bases, simulate_counts};

    #[test]
    fn deterministic_for_a_seed() {
        let set = mub_bases(3).unwrap();
        let rho = ModalDensityMatrix::diagonal(&[0.7, 0.2, 0.1]).unwrap();
        let recs = simulate_counts(&rho, &set, &SelectivityModel::ideal(), 1e4, 0.0, 5).unwrap();
        let cfg = MleConfig::default();
        let a = monte_carlo_errors(&recs.0, &set, &cfg, 8, 42).unwrap();
        let b = monte_carlo_errors(&recs.0, &set, &cfg, 8, 42).unwrap();
        assert_eq!(a.purity_std, b.purity_std);
        assert_eq!(a.purity_mean, b.purity_mean);
        assert!(monte_carlo_errors(&recs.0, &set, &cfg, 1, 42).is_err());
    }
}

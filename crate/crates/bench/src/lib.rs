//! Inputs shared by the benchmarks.

use tmode_core::pdc::{build_jsa, JointSpectralAmplitude, PhasematchingModel};
use tmode_core::qpg::SelectivityModel;
use tmode_core::spectral::units::{angular_frequency, convert_bandwidth};
use tmode_core::spectral::{hg_mode, make_grid, FrequencyGrid, HermiteGaussParams};
use tmode_core::tomography::{mub_bases, random_state, simulate_counts, CountRecord, ProjectorSet};

/// Matched Gaussian source pumped at 769 nm with a 1.72 nm pump, sampled on
/// an `n`×`n` grid.
pub fn matched_jsa(n: usize) -> JointSpectralAmplitude {
    let sigma_p = convert_bandwidth(769.0, 1.72).unwrap().amplitude_width();
    let sigma_pm = PhasematchingModel::matched_width(sigma_p);
    let center = angular_frequency(769.0).unwrap() / 2.0;
    let grid = make_grid(center, 12.0 * sigma_pm, n).unwrap();
    let pump_grid = FrequencyGrid::sum_grid(&grid, &grid).unwrap();
    let pump = hg_mode(&HermiteGaussParams::new(0, pump_grid.center(), sigma_p).unwrap(), &pump_grid).unwrap();
    build_jsa(&pump, &PhasematchingModel::gaussian(45.0, sigma_pm).unwrap(), &grid, &grid).unwrap()
}

/// Poisson counts from a random rank-`rank` state measured in the full
/// 7-dimensional MUB set.
pub fn tomography_input(rank: usize, seed: u64) -> (Vec<CountRecord>, ProjectorSet) {
    let set = mub_bases(7).unwrap();
    let rho = random_state(7, rank, seed).unwrap();
    let counts = simulate_counts(&rho, &set, &SelectivityModel::ideal(), 1e5, 0.0, seed).unwrap();
    (counts.0, set)
}

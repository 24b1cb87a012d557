use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::selectivity::check_mode;
use crate::error::{invalid, Error, Result};
use crate::export::{to_json_string, Export};
use crate::linalg::{self, CMatrix};
use crate::pdc::{HgBasis, ModalDensityMatrix};
use crate::spectral::ComplexSpectrum;

/// Largest fraction of a filter mode allowed outside the truncated basis.
pub const FILTER_LEAKAGE_MAX: f64 = 1e-3;

/// Mode removed from the transmitted beam, with conversion efficiency η.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub mode: Vec<Complex64>,
    pub efficiency: f64,
}

impl FilterSpec {
    pub fn new(mode: Vec<Complex64>, efficiency: f64) -> Result<Self> {
        let s = Self { mode, efficiency };
        s.validate()?;
        Ok(s)
    }

    /// Filter acting on the k-th basis element.
    pub fn basis_element(d: usize, k: usize, efficiency: f64) -> Result<Self> {
        if k >= d {
            return Err(invalid(format!("mode index {k} out of range for dimension {d}")));
        }
        Self::new(super::selectivity::unit_vector(d, k), efficiency)
    }

    /// Expresses a spectral mode in the first `d` elements of `basis`.
    pub fn from_spectrum(mode: &ComplexSpectrum, basis: &HgBasis, d: usize, efficiency: f64) -> Result<Self> {
        let norm = mode.norm_sqr();
        let (coeffs, outside) = basis.project(mode, d)?;
        let leakage = outside / norm;
        if leakage >= FILTER_LEAKAGE_MAX {
            return Err(Error::BasisMismatch { leakage });
        }
        let inside = linalg::vector_norm(&coeffs);
        Self::new(coeffs.into_iter().map(|c| c / inside).collect(), efficiency)
    }

    pub fn validate(&self) -> Result<()> {
        check_mode(&self.mode)?;
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(invalid(format!("filter efficiency must lie in [0, 1], got {}", self.efficiency)));
        }
        Ok(())
    }
}

/// Result of passing a state through an add-drop mode filter.
#[derive(Debug, Clone, Serialize)]
pub struct FilterOutcome {
    /// Normalized eigenvalue spectrum of the transmitted state, descending.
    pub transmitted: Vec<f64>,
    /// Normalized weights of the converted light; empty when nothing converts.
    pub upconverted: Vec<f64>,
    /// Unnormalized probability of transmission.
    pub transmitted_weight: f64,
    /// Unnormalized probability of conversion.
    pub upconverted_weight: f64,
    pub transmitted_g2: f64,
    pub upconverted_g2: Option<f64>,
    pub upconverted_empty: bool,
    pub transmitted_state: ModalDensityMatrix,
}

impl Export for FilterOutcome {
    fn kind(&self) -> &'static str {
        "filter outcome"
    }

    fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

fn g2_of(weights: &[f64]) -> f64 {
    1.0 + weights.iter().map(|w| w * w).sum::<f64>()
}

/// Removes a fraction η of the filter mode from `rho`.
///
/// The transmitted state is `TρT†` with `T = I − (1 − √(1−η))|m⟩⟨m|`; the
/// converted light is the single mode `|m⟩` with weight `η⟨m|ρ|m⟩`.
pub fn apply_mode_filter(rho: &ModalDensityMatrix, spec: &FilterSpec) -> Result<FilterOutcome> {
    spec.validate()?;
    let d = rho.dimension();
    if spec.mode.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: spec.mode.len() });
    }
    let eta = spec.efficiency;
    let k = 1.0 - (1.0 - eta).sqrt();
    let t = CMatrix::identity(d, d) - linalg::outer(&spec.mode).scale(k);
    let trans = &t * rho.entries() * t.adjoint();
    let population = rho.expectation(&spec.mode)?;
    let upconverted_weight = eta * population;
    let transmitted_weight = linalg::trace(&trans).re;
    if !(transmitted_weight > 0.0) {
        return Err(invalid("filter removes the entire state"));
    }
    let state = ModalDensityMatrix::from_psd(trans, rho.basis().copied(), rho.leakage())?;
    let transmitted: Vec<f64> = state.eigenvalues().into_iter().map(|w| w.max(0.0)).collect();
    let upconverted_empty = upconverted_weight <= 0.0;
    let upconverted = if upconverted_empty { Vec::new() } else { vec![1.0] };
    Ok(FilterOutcome {
        transmitted_g2: g2_of(&transmitted),
        upconverted_g2: (!upconverted_empty).then(|| g2_of(&upconverted)),
        transmitted,
        upconverted,
        transmitted_weight,
        upconverted_weight,
        upconverted_empty,
        transmitted_state: state,
    })
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::ProjectorSet;
use crate::error::{invalid, Error, Result};
use crate::export::{to_json_string, Export};
use crate::pdc::ModalDensityMatrix;
use crate::qpg::{project_probability, SelectivityModel};

/// Heralded counts recorded for one projector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub basis_index: usize,
    pub element_index: usize,
    pub counts: u64,
    /// Relative flux weight of the setting.
    #[serde(default = "unit_exposure")]
    pub exposure: f64,
}

fn unit_exposure() -> f64 {
    1.0
}

impl CountRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.exposure > 0.0 && self.exposure.is_finite()) {
            return Err(invalid(format!(
                "exposure of record ({}, {}) must be positive, got {}",
                self.basis_index, self.element_index, self.exposure
            )));
        }
        Ok(())
    }
}

/// A list of records, serializable as a whole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountRecords(pub Vec<CountRecord>);

impl CountRecords {
    pub fn total(&self) -> u64 {
        self.0.iter().map(|r| r.counts).sum()
    }

    /// CSV with columns `basis_index,element_index,counts,exposure`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let ser = |e: csv::Error| Error::Serialization(e.to_string());
        w.write_record(["basis_index", "element_index", "counts", "exposure"]).map_err(ser)?;
        for r in &self.0 {
            w.write_record([
                r.basis_index.to_string(),
                r.element_index.to_string(),
                r.counts.to_string(),
                crate::export::fmt_sci(r.exposure),
            ])
            .map_err(ser)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let records = r
            .deserialize()
            .collect::<std::result::Result<Vec<CountRecord>, _>>()
            .map_err(|e| Error::Serialization(e.to_string()))?;
        Ok(Self(records))
    }
}

impl Export for CountRecords {
    fn kind(&self) -> &'static str {
        "count records"
    }

    fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    fn to_csv(&self) -> Result<String> {
        CountRecords::to_csv(self)
    }
}

pub(crate) fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| invalid(format!("Poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// Counts `~ Poisson(flux·p + background)` for every projector in `set`,
/// with `p` the click probability under `sel`. `flux` is the mean number of
/// heralded photons per basis setting.
pub fn simulate_counts(
    rho: &ModalDensityMatrix,
    set: &ProjectorSet,
    sel: &SelectivityModel,
    flux: f64,
    background: f64,
    seed: u64,
) -> Result<CountRecords> {
    if !(flux > 0.0 && flux.is_finite()) {
        return Err(invalid(format!("flux must be positive, got {flux}")));
    }
    if !(background >= 0.0 && background.is_finite()) {
        return Err(invalid(format!("background must be non-negative, got {background}")));
    }
    if rho.dimension() != set.dimension() {
        return Err(Error::DimensionMismatch { expected: set.dimension(), found: rho.dimension() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = set
        .projectors()
        .iter()
        .map(|p| {
            let prob = project_probability(rho, &p.coefficients, sel)?;
            Ok(CountRecord {
                basis_index: p.basis_index,
                element_index: p.element_index,
                counts: poisson(&mut rng, flux * prob + background)?,
                exposure: 1.0,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CountRecords(records))
}

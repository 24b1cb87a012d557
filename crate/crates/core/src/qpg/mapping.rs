use serde::Serialize;

use crate::error::{invalid, Result};
use crate::export::{csv_table, to_json_string, Export};
use crate::linalg::CMatrix;
use crate::pdc::{decompose_kernel, GridMatrixRepr};
use crate::spectral::{ComplexSpectrum, FrequencyGrid};

/// Transfer kernel `ξ(ω_in, ω_out)` of the frequency converter, rows indexed
/// by input frequency, normalized so that `Σ|ξ|² Δω_in Δω_out = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingFunction {
    input_grid: FrequencyGrid,
    output_grid: FrequencyGrid,
    values: CMatrix,
}

impl MappingFunction {
    pub fn new(input_grid: FrequencyGrid, output_grid: FrequencyGrid, values: CMatrix) -> Result<Self> {
        if values.nrows() != input_grid.count() || values.ncols() != output_grid.count() {
            return Err(invalid(format!(
                "mapping is {}x{} but the grids have {} and {} points",
                values.nrows(),
                values.ncols(),
                input_grid.count(),
                output_grid.count()
            )));
        }
        let cell = input_grid.spacing() * output_grid.spacing();
        let norm = values.iter().map(|a| a.norm_sqr()).sum::<f64>() * cell;
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("mapping function has zero or non-finite norm"));
        }
        Ok(Self { input_grid, output_grid, values: values.unscale(norm.sqrt()) })
    }

    pub fn input_grid(&self) -> &FrequencyGrid {
        &self.input_grid
    }

    pub fn output_grid(&self) -> &FrequencyGrid {
        &self.output_grid
    }

    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    /// CSV with columns `omega_in,omega_out,real,imag`, input-major order.
    pub fn to_csv(&self) -> Result<String> {
        let (gi, go) = (&self.input_grid, &self.output_grid);
        let rows = (0..gi.count()).flat_map(|a| {
            (0..go.count()).map(move |b| {
                let v = self.values[(a, b)];
                [gi.point(a), go.point(b), v.re, v.im]
            })
        });
        csv_table(&["omega_in", "omega_out", "real", "imag"], rows)
    }
}

impl Export for MappingFunction {
    fn kind(&self) -> &'static str {
        "mapping function"
    }

    fn to_json(&self) -> Result<String> {
        let repr = GridMatrixRepr::new(self.input_grid, self.output_grid, &self.values, "input_grid", "output_grid");
        to_json_string(&repr.into_value())
    }

    fn to_csv(&self) -> Result<String> {
        MappingFunction::to_csv(self)
    }
}

/// `ξ(ω_in, ω_out) = α(ω_out − ω_in) · Φ̃(ω_out − s·(ω_in − ω̄_in))`.
///
/// `skew` is the dimensionless tilt `s` of the phasematching ridge
/// relative to the input axis (ω̄_in is the input grid centre). At `s = 0`
/// the phasematching depends on the output frequency alone.
pub fn build_mapping(
    pump: &ComplexSpectrum,
    output_pm: &ComplexSpectrum,
    skew: f64,
    input_grid: &FrequencyGrid,
    output_grid: &FrequencyGrid,
) -> Result<MappingFunction> {
    if !skew.is_finite() {
        return Err(invalid("skew must be finite"));
    }
    pump.check_coverage(output_grid.first() - input_grid.last(), output_grid.last() - input_grid.first())?;
    let reach = skew.abs() * input_grid.span() / 2.0;
    output_pm.check_coverage(output_grid.first() - reach, output_grid.last() + reach)?;
    let center_in = input_grid.center();
    let values = CMatrix::from_fn(input_grid.count(), output_grid.count(), |a, b| {
        let (w_in, w_out) = (input_grid.point(a), output_grid.point(b));
        pump.sample(w_out - w_in) * output_pm.sample(w_out - skew * (w_in - center_in))
    });
    MappingFunction::new(*input_grid, *output_grid, values)
}

/// Schmidt structure of a mapping function.
#[derive(Debug, Clone, Serialize)]
pub struct SelectivityReport {
    pub schmidt_weights: Vec<f64>,
    pub dominant_input_mode: ComplexSpectrum,
    pub dominant_output_mode: ComplexSpectrum,
    /// Largest normalized weight γ₁.
    pub separability: f64,
}

impl Export for SelectivityReport {
    fn kind(&self) -> &'static str {
        "selectivity report"
    }

    fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

pub fn separability_report(xi: &MappingFunction, max_modes: usize) -> Result<SelectivityReport> {
    let mut dec = decompose_kernel(&xi.values, &xi.input_grid, &xi.output_grid, max_modes.max(1))?;
    Ok(SelectivityReport {
        separability: dec.weights[0],
        dominant_input_mode: dec.signal_modes.swap_remove(0),
        dominant_output_mode: dec.idler_modes.swap_remove(0),
        schmidt_weights: dec.weights,
    })
}

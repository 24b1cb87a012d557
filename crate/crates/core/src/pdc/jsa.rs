use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::export::{csv_table, to_json_string, Export};
use crate::linalg::CMatrix;
use crate::spectral::{weighted_sigma, ComplexSpectrum, FrequencyGrid};

/// x at which sinc²(x) = 1/2.
const SINC_HALF_POWER_ARG: f64 = 1.391_557_378_251_51;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhasematchingShape {
    Gaussian,
    Sinc,
}

/// Phasematching ridge in the (ω_s, ω_i) plane.
///
/// With detunings ν from the grid centres, the phasematching argument is
/// `u = ν_s cos θ − ν_i sin θ`; the ridge `u = 0` therefore runs along
/// `(sin θ, cos θ)`. At 45° signal and idler are symmetric. Larger angles
/// tilt the ridge towards the signal axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasematchingModel {
    /// θ in degrees, within (0, 90).
    pub angle: f64,
    /// Amplitude width σ_pm (rad/fs) across the ridge.
    pub width: f64,
    pub shape: PhasematchingShape,
}

impl PhasematchingModel {
    pub fn gaussian(angle: f64, width: f64) -> Result<Self> {
        let m = Self { angle, width, shape: PhasematchingShape::Gaussian };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(invalid(format!("phasematching width must be positive, got {}", self.width)));
        }
        if !(self.angle > 0.0 && self.angle < 90.0) {
            return Err(invalid(format!("phasematching angle must lie in (0, 90) degrees, got {}", self.angle)));
        }
        Ok(())
    }

    /// Width that makes a Gaussian pump of amplitude width `pump_width`
    /// produce a separable state at 45°.
    pub fn matched_width(pump_width: f64) -> f64 {
        pump_width / std::f64::consts::SQRT_2
    }

    /// Φ at detunings `(ν_s, ν_i)`.
    pub fn evaluate(&self, nu_s: f64, nu_i: f64) -> f64 {
        let theta = self.angle.to_radians();
        let u = nu_s * theta.cos() - nu_i * theta.sin();
        match self.shape {
            PhasematchingShape::Gaussian => (-0.5 * (u / self.width).powi(2)).exp(),
            PhasematchingShape::Sinc => {
                // same −3 dB intensity point as the Gaussian of equal width
                let x = SINC_HALF_POWER_ARG * u / (self.width * std::f64::consts::LN_2.sqrt());
                if x.abs() < 1e-12 {
                    1.0
                } else {
                    x.sin() / x
                }
            }
        }
    }
}

/// Two-photon amplitude `f(ω_s, ω_i)`, rows indexed by signal, columns by
/// idler, normalized so that `Σ|f|² Δω_s Δω_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectralAmplitude {
    signal_grid: FrequencyGrid,
    idler_grid: FrequencyGrid,
    amplitudes: CMatrix,
}

impl JointSpectralAmplitude {
    /// Wraps and normalizes a sampled amplitude matrix.
    pub fn new(signal_grid: FrequencyGrid, idler_grid: FrequencyGrid, amplitudes: CMatrix) -> Result<Self> {
        if amplitudes.nrows() != signal_grid.count() {
            return Err(Error::DimensionMismatch { expected: signal_grid.count(), found: amplitudes.nrows() });
        }
        if amplitudes.ncols() != idler_grid.count() {
            return Err(Error::DimensionMismatch { expected: idler_grid.count(), found: amplitudes.ncols() });
        }
        let cell = signal_grid.spacing() * idler_grid.spacing();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * cell;
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("joint spectral amplitude has zero or non-finite norm"));
        }
        Ok(Self { signal_grid, idler_grid, amplitudes: amplitudes.unscale(norm.sqrt()) })
    }

    pub fn signal_grid(&self) -> &FrequencyGrid {
        &self.signal_grid
    }

    pub fn idler_grid(&self) -> &FrequencyGrid {
        &self.idler_grid
    }

    pub fn amplitudes(&self) -> &CMatrix {
        &self.amplitudes
    }

    pub fn cell_area(&self) -> f64 {
        self.signal_grid.spacing() * self.idler_grid.spacing()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.cell_area()
    }

    /// Phase-blind joint spectral intensity `|f|²`.
    pub fn intensity(&self) -> nalgebra::DMatrix<f64> {
        self.amplitudes.map(|a| a.norm_sqr())
    }

    /// Intensity standard deviations (rad/fs) of the signal and idler
    /// marginals.
    pub fn marginal_sigmas(&self) -> (f64, f64) {
        let jsi = self.intensity();
        let sig: Vec<f64> = jsi.row_iter().map(|r| r.sum()).collect();
        let idl: Vec<f64> = jsi.column_iter().map(|c| c.sum()).collect();
        (weighted_sigma(&sig, |j| self.signal_grid.point(j)), weighted_sigma(&idl, |j| self.idler_grid.point(j)))
    }

    fn cells(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        (0..self.signal_grid.count()).flat_map(move |s| {
            (0..self.idler_grid.count())
                .map(move |i| (self.signal_grid.point(s), self.idler_grid.point(i), self.amplitudes[(s, i)]))
        })
    }

    /// CSV with columns `omega_s,omega_i,real,imag`, signal-major order.
    pub fn to_csv(&self) -> Result<String> {
        csv_table(&["omega_s", "omega_i", "real", "imag"], self.cells().map(|(s, i, a)| [s, i, a.re, a.im]))
    }

    /// CSV with columns `omega_s,omega_i,intensity`.
    pub fn jsi_csv(&self) -> Result<String> {
        csv_table(&["omega_s", "omega_i", "intensity"], self.cells().map(|(s, i, a)| [s, i, a.norm_sqr()]))
    }

    pub(crate) fn repr(&self) -> GridMatrixRepr {
        GridMatrixRepr::new(self.signal_grid, self.idler_grid, &self.amplitudes, "signal_grid", "idler_grid")
    }
}

impl Export for JointSpectralAmplitude {
    fn kind(&self) -> &'static str {
        "joint spectral amplitude"
    }

    fn to_json(&self) -> Result<String> {
        to_json_string(&self.repr().into_value())
    }

    fn to_csv(&self) -> Result<String> {
        JointSpectralAmplitude::to_csv(self)
    }
}

/// `{<row_key>: grid, <col_key>: grid, re: [[..]], im: [[..]]}`.
pub(crate) struct GridMatrixRepr {
    rows: FrequencyGrid,
    cols: FrequencyGrid,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    row_key: &'static str,
    col_key: &'static str,
}

impl GridMatrixRepr {
    pub(crate) fn new(
        rows: FrequencyGrid,
        cols: FrequencyGrid,
        m: &CMatrix,
        row_key: &'static str,
        col_key: &'static str,
    ) -> Self {
        let re = m.row_iter().map(|r| r.iter().map(|a| a.re).collect()).collect();
        let im = m.row_iter().map(|r| r.iter().map(|a| a.im).collect()).collect();
        Self { rows, cols, re, im, row_key, col_key }
    }

    pub(crate) fn into_value(self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert(self.row_key.into(), serde_json::to_value(self.rows).expect("grid serializes"));
        map.insert(self.col_key.into(), serde_json::to_value(self.cols).expect("grid serializes"));
        map.insert("re".into(), serde_json::to_value(self.re).expect("floats serialize"));
        map.insert("im".into(), serde_json::to_value(self.im).expect("floats serialize"));
        serde_json::Value::Object(map)
    }
}

/// `f(ω_s, ω_i) = α(ω_s + ω_i) Φ(ω_s, ω_i)`, normalized.
///
/// When the pump grid is the exact sum grid of the two output grids the pump
/// is indexed directly; otherwise it is linearly interpolated.
pub fn build_jsa(
    pump: &ComplexSpectrum,
    pm: &PhasematchingModel,
    signal_grid: &FrequencyGrid,
    idler_grid: &FrequencyGrid,
) -> Result<JointSpectralAmplitude> {
    pm.validate()?;
    let lo = signal_grid.first() + idler_grid.first();
    let hi = signal_grid.last() + idler_grid.last();
    pump.check_coverage(lo, hi)?;

    let exact = FrequencyGrid::sum_grid(signal_grid, idler_grid).map(|g| g.same_as(pump.grid())).unwrap_or(false);
    let ns = signal_grid.count();
    let ni = idler_grid.count();
    let pump_at = |s: usize, i: usize| {
        if exact {
            pump.amplitudes()[s + i]
        } else {
            pump.sample(signal_grid.point(s) + idler_grid.point(i))
        }
    };
    let m = CMatrix::from_fn(ns, ni, |s, i| pump_at(s, i) * pm.evaluate(signal_grid.offset(s), idler_grid.offset(i)));
    JointSpectralAmplitude::new(*signal_grid, *idler_grid, m)
}

//! Uniform frequency grids, complex spectral amplitudes and the handful of
//! operations everything else is built on.
//!
//! Units throughout: angular frequency in rad/fs, time in fs, quadratic
//! spectral phase in fs². Wavelength-domain quantities only appear in
//! [`units`].

mod chirp;
mod hermite;
pub mod units;

pub use chirp::{apply_chirp, ChirpPhase};
pub use hermite::{hermite_function, hg_mode, HermiteGaussParams, MAX_HG_ORDER};
pub use units::{convert_bandwidth, BandwidthConversion};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative amplitude below which a spectrum is considered to have decayed at
/// its grid edge, so that sampling beyond the grid may return zero.
pub const EDGE_DECAY_TOL: f64 = 1e-6;

/// Uniformly spaced angular-frequency axis, symmetric about `center`.
///
/// Point `j` sits at `center + (j - (count - 1) / 2) * spacing`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr")]
pub struct FrequencyGrid {
    center: f64,
    spacing: f64,
    count: usize,
}

#[derive(Deserialize)]
struct GridRepr {
    center: f64,
    spacing: f64,
    count: usize,
}

impl TryFrom<GridRepr> for FrequencyGrid {
    type Error = Error;

    fn try_from(r: GridRepr) -> Result<Self> {
        FrequencyGrid::new(r.center, r.spacing, r.count)
    }
}

impl FrequencyGrid {
    pub fn new(center: f64, spacing: f64, count: usize) -> Result<Self> {
        if !center.is_finite() {
            return Err(invalid("grid center must be finite"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(invalid(format!("grid spacing must be positive, got {spacing}")));
        }
        if count < 2 {
            return Err(invalid(format!("grid needs at least 2 points, got {count}")));
        }
        Ok(Self { center, spacing, count })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Total width between the first and last point.
    pub fn span(&self) -> f64 {
        self.spacing * (self.count - 1) as f64
    }

    /// Signed distance of point `j` from the grid center.
    ///
    /// Computed from the index alone, so mirrored points are exact negatives
    /// of each other.
    pub fn offset(&self, j: usize) -> f64 {
        (j as f64 - (self.count - 1) as f64 / 2.0) * self.spacing
    }

    pub fn point(&self, j: usize) -> f64 {
        self.center + self.offset(j)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |j| self.point(j))
    }

    pub fn first(&self) -> f64 {
        self.point(0)
    }

    pub fn last(&self) -> f64 {
        self.point(self.count - 1)
    }

    /// Whether two grids describe the same sample points.
    pub fn same_as(&self, other: &FrequencyGrid) -> bool {
        let scale = self.center.abs().max(self.spacing).max(1.0);
        self.count == other.count
            && (self.center - other.center).abs() <= 1e-12 * scale
            && (self.spacing - other.spacing).abs() <= 1e-12 * self.spacing
    }

    /// Grid that samples `signal + idler` exactly when both inputs share a
    /// spacing: `count_s + count_i - 1` points centred on the summed centres.
    pub fn sum_grid(signal: &FrequencyGrid, idler: &FrequencyGrid) -> Result<FrequencyGrid> {
        if (signal.spacing - idler.spacing).abs() > 1e-12 * signal.spacing {
            return Err(Error::IncompatibleGrid("sum grid requires equal signal and idler spacing".into()));
        }
        FrequencyGrid::new(signal.center + idler.center, signal.spacing, signal.count + idler.count - 1)
    }
}

/// Grid centred at `center` covering `[center - span/2, center + span/2]`.
pub fn make_grid(center: f64, span: f64, count: usize) -> Result<FrequencyGrid> {
    if !(span > 0.0 && span.is_finite()) {
        return Err(invalid(format!("grid span must be positive, got {span}")));
    }
    if count < 2 {
        return Err(invalid(format!("grid needs at least 2 points, got {count}")));
    }
    FrequencyGrid::new(center, span / (count - 1) as f64, count)
}

/// Complex amplitudes sampled on a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    grid: FrequencyGrid,
    amplitudes: Vec<Complex64>,
}

impl ComplexSpectrum {
    pub fn new(grid: FrequencyGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.count() {
            return Err(Error::DimensionMismatch { expected: grid.count(), found: amplitudes.len() });
        }
        Ok(Self { grid, amplitudes })
    }

    /// Samples `f(ω)` at every grid point.
    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.points().map(f).collect();
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `Σ |a_j|² Δω`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Rescales to unit discrete norm.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid("cannot normalize a spectrum with zero or non-finite norm"));
        }
        let s = 1.0 / n.sqrt();
        self.amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(self)
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
        self
    }

    fn max_abs(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Linear interpolation at `omega`; `None` outside the grid.
    pub fn interpolate(&self, omega: f64) -> Option<Complex64> {
        let pos = (omega - self.grid.first()) / self.grid.spacing();
        let last = (self.grid.count() - 1) as f64;
        // half-ulp slack so that exact grid points at the ends are accepted
        if !(pos >= -1e-9 && pos <= last + 1e-9) {
            return None;
        }
        let pos = pos.clamp(0.0, last);
        let i = (pos.floor() as usize).min(self.grid.count() - 2);
        let t = pos - i as f64;
        Some(self.amplitudes[i] * (1.0 - t) + self.amplitudes[i + 1] * t)
    }

    /// Checks that sampling over `[lo, hi]` is meaningful: either the range is
    /// inside the grid, or the spectrum has decayed below
    /// [`EDGE_DECAY_TOL`] at every edge the range crosses.
    pub fn check_coverage(&self, lo: f64, hi: f64) -> Result<()> {
        let slack = 1e-9 * self.grid.spacing();
        let peak = self.max_abs();
        let n = self.amplitudes.len();
        let low_ok = lo >= self.grid.first() - slack || self.amplitudes[0].norm() <= EDGE_DECAY_TOL * peak;
        let high_ok = hi <= self.grid.last() + slack || self.amplitudes[n - 1].norm() <= EDGE_DECAY_TOL * peak;
        if low_ok && high_ok {
            Ok(())
        } else {
            Err(Error::Coverage { lo, hi, covered_lo: self.grid.first(), covered_hi: self.grid.last() })
        }
    }

    /// Interpolated value, zero outside the grid. Call [`check_coverage`]
    /// first when the range matters.
    ///
    /// [`check_coverage`]: ComplexSpectrum::check_coverage
    pub fn sample(&self, omega: f64) -> Complex64 {
        self.interpolate(omega).unwrap_or_default()
    }

    /// Intensity-weighted standard deviation of ω.
    pub fn intensity_sigma(&self) -> f64 {
        let w: Vec<f64> = self.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        weighted_sigma(&w, |j| self.grid.point(j))
    }

    /// CSV with columns `omega_rad_per_fs,real,imag`.
    pub fn to_csv(&self) -> Result<String> {
        let rows = self.grid.points().zip(&self.amplitudes).map(|(w, a)| [w, a.re, a.im]);
        crate::export::csv_table(&["omega_rad_per_fs", "real", "imag"], rows)
    }
}

pub(crate) fn weighted_sigma(weights: &[f64], x: impl Fn(usize) -> f64) -> f64 {
    let total: f64 = weights.iter().sum();
    let mean = weights.iter().enumerate().map(|(j, w)| w * x(j)).sum::<f64>() / total;
    let var = weights.iter().enumerate().map(|(j, w)| w * (x(j) - mean).powi(2)).sum::<f64>() / total;
    var.sqrt()
}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    grid: FrequencyGrid,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexSpectrum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpectrumRepr {
            grid: self.grid,
            re: self.amplitudes.iter().map(|a| a.re).collect(),
            im: self.amplitudes.iter().map(|a| a.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexSpectrum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SpectrumRepr::deserialize(d)?;
        if r.re.len() != r.im.len() {
            return Err(serde::de::Error::custom("re and im lengths differ"));
        }
        let amps = r.re.iter().zip(&r.im).map(|(&re, &im)| Complex64::new(re, im)).collect();
        ComplexSpectrum::new(r.grid, amps).map_err(serde::de::Error::custom)
    }
}

/// `⟨a|b⟩ = Σ conj(a_j) b_j Δω`.
pub fn inner_product(a: &ComplexSpectrum, b: &ComplexSpectrum) -> Result<Complex64> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::IncompatibleGrid(format!("{:?} vs {:?}", a.grid, b.grid)));
    }
    let sum: Complex64 = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum();
    Ok(sum * a.grid.spacing())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_points_follow_uniform_spacing() {
        let g = make_grid(1.223, 0.04, 5).unwrap();
        let pts: Vec<f64> = g.points().collect();
        for (p, want) in pts.iter().zip([1.203, 1.213, 1.223, 1.233, 1.243]) {
            assert_abs_diff_eq!(*p, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_point_grid_hits_endpoints() {
        let g = make_grid(0.0, 2.0, 2).unwrap();
        assert_eq!(g.first(), -1.0);
        assert_eq!(g.last(), 1.0);
    }

    #[test]
    fn bad_grids_are_rejected() {
        assert!(matches!(make_grid(1.0, -1.0, 8), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(1.0, 0.0, 8), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_grid(1.0, 1.0, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn grid_offsets_are_mirror_exact() {
        let g = make_grid(1.2, 0.37, 513).unwrap();
        for j in 0..g.count() {
            assert_eq!(g.offset(j), -g.offset(g.count() - 1 - j));
        }
    }

    #[test]
    fn inner_product_rejects_mismatched_grids() {
        let a = ComplexSpectrum::from_fn(make_grid(0.0, 1.0, 8).unwrap(), |_| Complex64::ONE);
        let b = ComplexSpectrum::from_fn(make_grid(0.0, 1.0, 9).unwrap(), |_| Complex64::ONE);
        assert!(matches!(inner_product(&a, &b), Err(Error::IncompatibleGrid(_))));
    }

    #[test]
    fn inner_product_is_hermitian() {
        let g = make_grid(0.0, 6.0, 64).unwrap();
        let a = ComplexSpectrum::from_fn(g, |w| Complex64::new((-w * w).exp(), w.sin()));
        let b = ComplexSpectrum::from_fn(g, |w| Complex64::from_polar((-w * w / 3.0).exp(), 2.0 * w));
        let ab = inner_product(&a, &b).unwrap();
        let ba = inner_product(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-14);
        let aa = inner_product(&a, &a).unwrap();
        assert!(aa.im.abs() < 1e-15 && aa.re > 0.0);
    }

    #[test]
    fn interpolation_is_exact_on_grid_points_and_linear_between() {
        let g = make_grid(0.0, 4.0, 5).unwrap();
        let s = ComplexSpectrum::from_fn(g, |w| Complex64::new(w, -2.0 * w));
        assert_eq!(s.interpolate(1.0), Some(Complex64::new(1.0, -2.0)));
        let mid = s.interpolate(0.25).unwrap();
        assert_abs_diff_eq!(mid.re, 0.25, epsilon = 1e-14);
        assert_eq!(s.interpolate(2.5), None);
        assert_eq!(s.sample(-3.0), Complex64::ZERO);
    }

    #[test]
    fn coverage_allows_decayed_edges_only() {
        let g = make_grid(0.0, 12.0, 200).unwrap();
        let wide = ComplexSpectrum::from_fn(g, |w| Complex64::new((-w * w / 2.0).exp(), 0.0));
        assert!(wide.check_coverage(-10.0, 10.0).is_ok());
        let g = make_grid(0.0, 4.0, 200).unwrap();
        let cut = ComplexSpectrum::from_fn(g, |w| Complex64::new((-w * w / 2.0).exp(), 0.0));
        assert!(cut.check_coverage(-1.5, 1.5).is_ok());
        match cut.check_coverage(-3.0, 1.0) {
            Err(Error::Coverage { lo, covered_lo, .. }) => {
                assert_eq!(lo, -3.0);
                assert_abs_diff_eq!(covered_lo, -2.0, epsilon = 1e-12);
            }
            other => panic!("expected coverage error, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip_keeps_schema() {
        let g = make_grid(1.0, 1.0, 3).unwrap();
        let s = ComplexSpectrum::from_fn(g, |w| Complex64::new(w, 1.0));
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["grid"]["count"], 3);
        assert_eq!(v["re"].as_array().unwrap().len(), 3);
        let back: ComplexSpectrum = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}

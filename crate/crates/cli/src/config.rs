//! Experiment configuration: JSON file values, overridden by flags, checked
//! field by field before anything runs.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use tmode_core::pdc::PhasematchingShape;
use tmode_core::qpg::SelectivityModel;
use tmode_core::tomography::MleConfig;
use tmode_core::Format;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pump: PumpConfig,
    pub phasematching: PhasematchingConfig,
    pub grid: GridConfig,
    pub basis: BasisConfig,
    pub qpg: QpgConfig,
    pub tomography: TomographyConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        crate::presets::Case::A.config()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PumpConfig {
    /// Hermite-Gauss order of the pump amplitude.
    pub order: usize,
    pub center_nm: f64,
    /// Intensity FWHM in wavelength.
    pub fwhm_nm: f64,
    /// Quadratic spectral phase (fs²).
    pub chirp_fs2: f64,
}

impl Default for PumpConfig {
    fn default() -> Self {
        Self { order: 0, center_nm: 769.0, fwhm_nm: 1.72, chirp_fs2: 0.0 }
    }
}

/// How the phasematching width is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "value")]
pub enum PmWidth {
    /// Matched to the configured pump, giving a separable JSA at 45°.
    Matched,
    /// Matched to a Gaussian pump of this FWHM (nm) at the pump centre,
    /// i.e. a crystal designed for another pump bandwidth.
    MatchedToFwhmNm(f64),
    /// Explicit width in rad/fs.
    RadPerFs(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhasematchingConfig {
    pub angle_deg: f64,
    pub width: PmWidth,
    pub shape: PhasematchingShape,
}

impl Default for PhasematchingConfig {
    fn default() -> Self {
        Self { angle_deg: 45.0, width: PmWidth::Matched, shape: PhasematchingShape::Gaussian }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Points per signal/idler axis.
    pub points: usize,
    /// Half-span of the grids in units of the widest marginal width.
    pub span_sigmas: f64,
    /// Schmidt modes kept.
    pub max_modes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { points: 512, span_sigmas: 6.0, max_modes: 20 }
    }
}

/// How the Hermite-Gauss basis width is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "value")]
pub enum BasisWidth {
    /// Fitted to the dominant mode of the decorrelated reference state
    /// (case a) and frozen.
    FrozenReference,
    /// Fitted to the dominant mode of the simulated state itself.
    FitOwn,
    RadPerFs(f64),
}

/// Spectral phase carried by the basis modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisPhase {
    Flat,
    /// Same quadratic phase as the PDC pump.
    MatchPump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasisConfig {
    pub d: usize,
    pub width: BasisWidth,
    pub phase: BasisPhase,
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self { d: 7, width: BasisWidth::FrozenReference, phase: BasisPhase::MatchPump }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QpgConfig {
    pub crosstalk: f64,
    pub falloff: Vec<f64>,
    pub filter_efficiency: f64,
    /// Converter parameters for `qpg map`.
    pub input_nm: f64,
    pub output_nm: f64,
    pub pump_order: usize,
    /// QPG pump bandwidth expressed at the input wavelength (GHz).
    pub pump_fwhm_ghz: f64,
    pub pm_fwhm_ghz: f64,
    pub skew: f64,
    pub points: usize,
}

impl Default for QpgConfig {
    fn default() -> Self {
        Self {
            crosstalk: 0.0,
            falloff: Vec::new(),
            filter_efficiency: 0.22,
            input_nm: 1540.0,
            output_nm: 558.0,
            pump_order: 0,
            pump_fwhm_ghz: 620.0,
            pm_fwhm_ghz: 59.0,
            skew: 0.0,
            points: 256,
        }
    }
}

impl QpgConfig {
    pub fn selectivity(&self) -> SelectivityModel {
        SelectivityModel { crosstalk: self.crosstalk, per_order_falloff: self.falloff.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TomographyConfig {
    /// Mean heralded counts per basis setting.
    pub flux: f64,
    /// Mean background counts per projector.
    pub background: f64,
    pub seed: u64,
    pub resamples: usize,
    pub reconstruction: MleConfig,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        Self { flux: 1e5, background: 0.0, seed: 1, resamples: 20, reconstruction: MleConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    // not part of the manifest, so a rerun into another directory is identical
    #[serde(skip_serializing)]
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), formats: vec![Format::Json, Format::Csv] }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

fn check(errors: &mut Vec<String>, ok: bool, field: &str, msg: impl std::fmt::Display) {
    if !ok {
        errors.push(format!("{field}: {msg}"));
    }
}

fn positive(errors: &mut Vec<String>, field: &str, v: f64) {
    check(errors, v > 0.0 && v.is_finite(), field, format_args!("must be positive, got {v}"));
}

impl ExperimentConfig {
    /// Every invalid field, each message naming the field.
    pub fn validation_errors(&self) -> Vec<String> {
        let mut e = Vec::new();
        let max_order = tmode_core::spectral::MAX_HG_ORDER;
        check(&mut e, self.pump.order <= max_order, "pump.order", format_args!("must be at most {max_order}"));
        positive(&mut e, "pump.center_nm", self.pump.center_nm);
        positive(&mut e, "pump.fwhm_nm", self.pump.fwhm_nm);
        check(&mut e, self.pump.chirp_fs2.is_finite(), "pump.chirp_fs2", "must be finite");
        let a = self.phasematching.angle_deg;
        check(&mut e, a > 0.0 && a < 90.0, "phasematching.angle_deg", format_args!("must lie in (0, 90), got {a}"));
        match self.phasematching.width {
            PmWidth::Matched => {}
            PmWidth::MatchedToFwhmNm(v) => positive(&mut e, "phasematching.width", v),
            PmWidth::RadPerFs(v) => positive(&mut e, "phasematching.width", v),
        }
        check(
            &mut e,
            self.grid.points >= 16,
            "grid.points",
            format_args!("must be at least 16, got {}", self.grid.points),
        );
        positive(&mut e, "grid.span_sigmas", self.grid.span_sigmas);
        check(&mut e, self.grid.max_modes >= 1, "grid.max_modes", "must be at least 1");
        check(
            &mut e,
            self.basis.d >= 1 && self.basis.d <= max_order + 1,
            "basis.d",
            format_args!("must lie in [1, {}], got {}", max_order + 1, self.basis.d),
        );
        if let BasisWidth::RadPerFs(v) = self.basis.width {
            positive(&mut e, "basis.width", v);
        }
        let q = &self.qpg;
        check(
            &mut e,
            (0.0..=1.0).contains(&q.crosstalk),
            "qpg.crosstalk",
            format_args!("must lie in [0, 1], got {}", q.crosstalk),
        );
        for (k, f) in q.falloff.iter().enumerate() {
            check(
                &mut e,
                *f > 0.0 && *f <= 1.0,
                &format!("qpg.falloff[{k}]"),
                format_args!("must lie in (0, 1], got {f}"),
            );
        }
        check(
            &mut e,
            (0.0..=1.0).contains(&q.filter_efficiency),
            "qpg.filter_efficiency",
            format_args!("must lie in [0, 1], got {}", q.filter_efficiency),
        );
        positive(&mut e, "qpg.input_nm", q.input_nm);
        positive(&mut e, "qpg.output_nm", q.output_nm);
        check(&mut e, q.output_nm < q.input_nm, "qpg.output_nm", "must be shorter than qpg.input_nm");
        check(&mut e, q.pump_order <= max_order, "qpg.pump_order", format_args!("must be at most {max_order}"));
        positive(&mut e, "qpg.pump_fwhm_ghz", q.pump_fwhm_ghz);
        positive(&mut e, "qpg.pm_fwhm_ghz", q.pm_fwhm_ghz);
        check(&mut e, q.skew.is_finite(), "qpg.skew", "must be finite");
        check(&mut e, q.points >= 16, "qpg.points", format_args!("must be at least 16, got {}", q.points));
        let t = &self.tomography;
        positive(&mut e, "tomography.flux", t.flux);
        check(
            &mut e,
            t.background >= 0.0 && t.background.is_finite(),
            "tomography.background",
            format_args!("must be non-negative, got {}", t.background),
        );
        check(
            &mut e,
            t.resamples >= 2,
            "tomography.resamples",
            format_args!("must be at least 2, got {}", t.resamples),
        );
        if let Err(err) = t.reconstruction.validate() {
            e.push(format!("tomography.reconstruction: {err}"));
        }
        check(&mut e, !self.output.formats.is_empty(), "output.formats", "must list at least one format");
        e
    }

    pub fn validate(&self) -> CliResult<()> {
        let errors = self.validation_errors();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(errors))
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))
    }
}

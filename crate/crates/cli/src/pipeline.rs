//! End-to-end runs: source → Schmidt decomposition → modal state →
//! simulated tomography → mode filtering, rendered into in-memory
//! artifacts that are written only once everything has succeeded.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use tmode_core::export::{to_json_string, Export, Format};
use tmode_core::pdc::{
    build_jsa, chirp_purity_analytic, fit_basis_width, g2_from_purity, reduced_density_matrix, schmidt_decompose,
    HgBasis, JointSpectralAmplitude, ModalDensityMatrix, PhasematchingModel, PhasematchingShape, SchmidtDecomposition,
};
use tmode_core::qpg::{apply_mode_filter, FilterOutcome, FilterSpec};
use tmode_core::spectral::units::{angular_frequency, convert_bandwidth};
use tmode_core::spectral::{apply_chirp, hg_mode, make_grid, ChirpPhase, FrequencyGrid, HermiteGaussParams};
use tmode_core::tomography::{
    mle_reconstruct, monte_carlo_errors, mub_bases, simulate_counts, state_metrics, MonteCarloSummary,
    ReconstructionResult,
};

use crate::config::{BasisPhase, BasisWidth, ExperimentConfig, PmWidth};
use crate::error::{CliError, CliResult};
use crate::presets::{Case, Reference};

/// Named file contents, written in name order.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Artifacts(BTreeMap<String, String>);

impl Artifacts {
    pub fn insert(&mut self, name: impl Into<String>, contents: String) {
        self.0.insert(name.into(), contents);
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Adds `<stem>.json` and/or `<stem>.csv` as requested by `formats`.
    pub fn export(&mut self, stem: &str, object: &dyn Export, formats: &[Format]) -> CliResult<()> {
        for &f in formats {
            match tmode_core::export(object, f) {
                Ok(text) => self.insert(format!("{stem}.{}", f.extension()), text),
                Err(tmode_core::Error::UnsupportedFormat(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> CliResult<()> {
        self.insert(name, to_json_string(value)?);
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        for (name, contents) in &self.0 {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}

/// Widths and grids derived from a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolved {
    pub pump_center_rad_per_fs: f64,
    pub pump_width_rad_per_fs: f64,
    pub pm_width_rad_per_fs: f64,
    pub signal_center_rad_per_fs: f64,
    pub grid_spacing_rad_per_fs: f64,
    pub basis_width_rad_per_fs: f64,
    pub basis_chirp_fs2: f64,
}

pub struct Source {
    pub jsa: JointSpectralAmplitude,
    pub pump_width: f64,
    pub pm_width: f64,
}

fn pump_amplitude_width(center_nm: f64, fwhm_nm: f64) -> CliResult<f64> {
    Ok(convert_bandwidth(center_nm, fwhm_nm)?.amplitude_width())
}

/// Samples the pump on the exact sum grid of the signal/idler grids and
/// builds the joint spectral amplitude.
pub fn build_source(cfg: &ExperimentConfig) -> CliResult<Source> {
    cfg.validate()?;
    let p = &cfg.pump;
    let pump_width = pump_amplitude_width(p.center_nm, p.fwhm_nm)?;
    let pm_width = match cfg.phasematching.width {
        PmWidth::Matched => PhasematchingModel::matched_width(pump_width),
        PmWidth::MatchedToFwhmNm(nm) => PhasematchingModel::matched_width(pump_amplitude_width(p.center_nm, nm)?),
        PmWidth::RadPerFs(w) => w,
    };
    let pm = PhasematchingModel { angle: cfg.phasematching.angle_deg, width: pm_width, shape: cfg.phasematching.shape };
    let center = angular_frequency(p.center_nm)? / 2.0;
    let reach = cfg.grid.span_sigmas * ((p.order + 1) as f64).sqrt() * (pump_width / 2f64.sqrt()).max(pm_width);
    let grid = make_grid(center, 2.0 * reach, cfg.grid.points)?;
    let pump_grid = FrequencyGrid::sum_grid(&grid, &grid)?;
    let pump = hg_mode(&HermiteGaussParams::new(p.order, pump_grid.center(), pump_width)?, &pump_grid)?;
    let pump = apply_chirp(&pump, &ChirpPhase::new(p.chirp_fs2, pump_grid.center()));
    let jsa = build_jsa(&pump, &pm, &grid, &grid)?;
    Ok(Source { jsa, pump_width, pm_width })
}

/// Closed-form chirp purity, defined for the Gaussian configuration whose
/// unchirped state is separable.
pub fn analytic_purity(cfg: &ExperimentConfig, jsa: &JointSpectralAmplitude) -> CliResult<Option<f64>> {
    let applicable = cfg.pump.order == 0
        && cfg.phasematching.shape == PhasematchingShape::Gaussian
        && cfg.phasematching.width == PmWidth::Matched
        && (cfg.phasematching.angle_deg - 45.0).abs() < 1e-12;
    if !applicable {
        return Ok(None);
    }
    let (ss, si) = jsa.marginal_sigmas();
    Ok(Some(chirp_purity_analytic(cfg.pump.chirp_fs2, ss, si)?))
}

fn basis_chirp(cfg: &ExperimentConfig) -> f64 {
    match cfg.basis.phase {
        BasisPhase::Flat => 0.0,
        BasisPhase::MatchPump => cfg.pump.chirp_fs2,
    }
}

/// Width of the reference basis: fitted to the dominant signal mode of the
/// decorrelated reference configuration on the same grid settings.
pub fn reference_basis_width(cfg: &ExperimentConfig) -> CliResult<f64> {
    let mut reference = Case::A.config();
    reference.grid = cfg.grid.clone();
    reference.pump.center_nm = cfg.pump.center_nm;
    let src = build_source(&reference)?;
    let dec = schmidt_decompose(&src.jsa, 1)?;
    Ok(fit_basis_width(&dec.signal_modes[0], src.jsa.signal_grid().center(), 0.0)?)
}

fn resolve_basis(
    cfg: &ExperimentConfig,
    dec: &SchmidtDecomposition,
    center: f64,
    reference_width: Option<f64>,
) -> CliResult<HgBasis> {
    let chirp = basis_chirp(cfg);
    let width = match cfg.basis.width {
        BasisWidth::RadPerFs(w) => w,
        BasisWidth::FitOwn => fit_basis_width(&dec.signal_modes[0], center, chirp)?,
        BasisWidth::FrozenReference => match reference_width {
            Some(w) => w,
            None => reference_basis_width(cfg)?,
        },
    };
    Ok(HgBasis { center, width, chirp })
}

/// State-level results shared by several subcommands.
pub struct ModalState {
    pub source: Source,
    pub decomposition: SchmidtDecomposition,
    pub rho: ModalDensityMatrix,
    pub resolved: Resolved,
}

pub fn modal_state(cfg: &ExperimentConfig, reference_width: Option<f64>) -> CliResult<ModalState> {
    let source = build_source(cfg)?;
    let decomposition = schmidt_decompose(&source.jsa, cfg.grid.max_modes)?;
    let center = source.jsa.signal_grid().center();
    let basis = resolve_basis(cfg, &decomposition, center, reference_width)?;
    let rho = reduced_density_matrix(&decomposition, &basis, cfg.basis.d)?;
    let resolved = Resolved {
        pump_center_rad_per_fs: 2.0 * center,
        pump_width_rad_per_fs: source.pump_width,
        pm_width_rad_per_fs: source.pm_width,
        signal_center_rad_per_fs: center,
        grid_spacing_rad_per_fs: source.jsa.signal_grid().spacing(),
        basis_width_rad_per_fs: basis.width,
        basis_chirp_fs2: basis.chirp,
    };
    Ok(ModalState { source, decomposition, rho, resolved })
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterSummary {
    pub hg0: FilterOutcome,
    pub hg1: Option<FilterOutcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub case: String,
    pub svd_purity: f64,
    pub analytic_purity: Option<f64>,
    pub g2: f64,
    pub reconstructed_purity: f64,
    pub purity_std: f64,
    pub purity_mean_resampled: f64,
    pub reconstructed_eigenvalues: Vec<f64>,
    pub model_populations: Vec<f64>,
    pub reconstructed_populations: Vec<f64>,
    pub model_purity_in_basis: f64,
    pub fidelity_to_model: f64,
    pub basis_leakage: f64,
    pub schmidt_weights: Vec<f64>,
    pub transmitted_g2_hg0: f64,
    pub transmitted_g2_hg1: Option<f64>,
    pub upconverted_g2_hg0: Option<f64>,
    pub upconverted_g2_hg1: Option<f64>,
    pub converged: bool,
    pub reference: Option<Reference>,
}

pub struct ExperimentOutcome {
    pub summary: Summary,
    pub reconstruction: ReconstructionResult,
    pub bootstrap: MonteCarloSummary,
    pub state: ModalState,
    pub artifacts: Artifacts,
    /// Remarks for the manifest.
    pub notes: Vec<String>,
}

fn filter_outcomes(rho: &ModalDensityMatrix, eta: f64) -> CliResult<FilterSummary> {
    let d = rho.dimension();
    let hg0 = apply_mode_filter(rho, &FilterSpec::basis_element(d, 0, eta)?)?;
    let hg1 = if d > 1 { Some(apply_mode_filter(rho, &FilterSpec::basis_element(d, 1, eta)?)?) } else { None };
    Ok(FilterSummary { hg0, hg1 })
}

/// Full pipeline for one configuration; `case` selects the reference values
/// reported next to the results.
pub fn run_experiment(case: Option<Case>, cfg: &ExperimentConfig) -> CliResult<ExperimentOutcome> {
    cfg.validate()?;
    let reference_width = if case == Some(Case::A) && cfg.basis.width == BasisWidth::FrozenReference {
        // the reference state is this state; fit once
        let src = build_source(cfg)?;
        let dec = schmidt_decompose(&src.jsa, 1)?;
        Some(fit_basis_width(&dec.signal_modes[0], src.jsa.signal_grid().center(), 0.0)?)
    } else {
        None
    };
    let state = modal_state(cfg, reference_width)?;
    let summary_dec = state.decomposition.summary();
    let svd_purity = summary_dec.purity;
    let analytic = analytic_purity(cfg, &state.source.jsa)?;
    let g2 = g2_from_purity(svd_purity.min(1.0))?;

    let t = &cfg.tomography;
    let set = mub_bases(cfg.basis.d)?;
    let sel = cfg.qpg.selectivity();
    let counts = simulate_counts(&state.rho, &set, &sel, t.flux, t.background, t.seed)?;
    let reconstruction = mle_reconstruct(&counts.0, &set, &t.reconstruction)?;
    if !reconstruction.converged {
        return Err(CliError::Numerical(format!(
            "reconstruction did not converge within {} iterations",
            t.reconstruction.max_iterations
        )));
    }
    let bootstrap = monte_carlo_errors(&counts.0, &set, &t.reconstruction, t.resamples, t.seed.wrapping_add(1))?;
    let rho_hat = &reconstruction.rho_hat;
    let metrics = state_metrics(rho_hat, &state.rho)?;
    let filters = filter_outcomes(&state.rho, cfg.qpg.filter_efficiency)?;

    let case_name = case.map(|c| c.name().to_string()).unwrap_or_else(|| "custom".into());
    let summary = Summary {
        case: case_name,
        svd_purity,
        analytic_purity: analytic,
        g2,
        reconstructed_purity: rho_hat.purity(),
        purity_std: bootstrap.purity_std,
        purity_mean_resampled: bootstrap.purity_mean,
        reconstructed_eigenvalues: rho_hat.eigenvalues(),
        model_populations: state.rho.populations(),
        reconstructed_populations: rho_hat.populations(),
        model_purity_in_basis: state.rho.purity(),
        fidelity_to_model: metrics.fidelity,
        basis_leakage: state.rho.leakage(),
        schmidt_weights: summary_dec.weights.clone(),
        transmitted_g2_hg0: filters.hg0.transmitted_g2,
        transmitted_g2_hg1: filters.hg1.as_ref().map(|f| f.transmitted_g2),
        upconverted_g2_hg0: filters.hg0.upconverted_g2,
        upconverted_g2_hg1: filters.hg1.as_ref().and_then(|f| f.upconverted_g2),
        converged: reconstruction.converged,
        reference: case.map(Case::reference),
    };

    let mut notes = Vec::new();
    if cfg.basis.width == BasisWidth::FrozenReference {
        notes.push(format!(
            "basis width frozen at {:.6e} rad/fs (fitted to the decorrelated reference state) for all cases",
            state.resolved.basis_width_rad_per_fs
        ));
        if let Some(c) = case {
            notes.push(format!(
                "the measured QPG pump bandwidth for case {} was {} nm; the simulation uses the frozen basis instead",
                c.name(),
                c.reference().qpg_pump_fwhm_nm
            ));
        }
    }
    let formats = &cfg.output.formats;
    let mut art = Artifacts::default();
    art.export("jsa", &state.source.jsa, formats)?;
    if cfg.output.wants(Format::Csv) {
        art.insert("jsi.csv", state.source.jsa.jsi_csv()?);
    }
    art.json("schmidt.json", &summary_dec)?;
    art.export("rho_model", &state.rho, formats)?;
    art.export("projectors", &set, formats)?;
    art.export("counts", &counts, formats)?;
    art.export("rho_reconstructed", rho_hat, &[Format::Json])?;
    if cfg.output.wants(Format::Csv) {
        art.insert("convergence.csv", reconstruction.convergence_csv()?);
    }
    art.json("bootstrap.json", &bootstrap)?;
    art.json("filter.json", &filters)?;
    art.json("summary.json", &summary)?;
    Ok(ExperimentOutcome { summary, reconstruction, bootstrap, state, artifacts: art, notes })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub chirp_fs2: f64,
    pub analytic_purity: f64,
    pub svd_purity: f64,
    pub g2: f64,
    pub background_mixed_g2: f64,
}

/// Purity and g² as the pump chirp is varied, with the g² a detector would
/// see when a Poissonian background makes up `background_fraction` of the
/// total count rate.
pub fn chirp_scan(chirps: &[f64], cfg: &ExperimentConfig, background_fraction: f64) -> CliResult<Vec<ScanRow>> {
    cfg.validate()?;
    if !(0.0..1.0).contains(&background_fraction) {
        return Err(CliError::config(format!("background-fraction: must lie in [0, 1), got {background_fraction}")));
    }
    if chirps.is_empty() {
        return Err(CliError::config("chirps: at least one value is required"));
    }
    chirps
        .iter()
        .map(|&a| {
            if !a.is_finite() {
                return Err(CliError::config(format!("chirps: non-finite value {a}")));
            }
            let mut c = cfg.clone();
            c.pump.chirp_fs2 = a;
            let src = build_source(&c)?;
            let (ss, si) = src.jsa.marginal_sigmas();
            let dec = schmidt_decompose(&src.jsa, c.grid.max_modes)?;
            let svd_purity = dec.summary().purity;
            let g2 = g2_from_purity(svd_purity.min(1.0))?;
            let mixed = tmode_core::pdc::background_mixed_g2(g2, 1.0 - background_fraction, background_fraction)?;
            Ok(ScanRow {
                chirp_fs2: a,
                analytic_purity: chirp_purity_analytic(a, ss, si)?,
                svd_purity,
                g2,
                background_mixed_g2: mixed,
            })
        })
        .collect()
}

pub fn scan_csv(rows: &[ScanRow]) -> CliResult<String> {
    Ok(tmode_core::export::csv_table(
        &["chirp_fs2", "analytic_purity", "svd_purity", "g2", "background_mixed_g2"],
        rows.iter().map(|r| [r.chirp_fs2, r.analytic_purity, r.svd_purity, r.g2, r.background_mixed_g2]),
    )?)
}

//! One CLI invocation: what was asked for, the resolved configuration, and
//! the manifest that lets it be replayed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;
use tmode_core::export::Format;
use tmode_core::pdc::{g2_from_purity, purity_from_schmidt, schmidt_decompose};
use tmode_core::qpg::{
    apply_mode_filter, build_mapping, project_probability, separability_report, suppression_ratio, FilterSpec,
};
use tmode_core::spectral::units::{angular_frequency, convert_bandwidth, wavelength_fwhm};
use tmode_core::spectral::{hg_mode, make_grid, HermiteGaussParams};
use tmode_core::tomography::{
    mle_reconstruct, monte_carlo_errors, mub_bases, simulate_counts, CountRecords, ProjectorSet,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::pipeline::{analytic_purity, build_source, chirp_scan, modal_state, run_experiment, scan_csv, Artifacts};
use crate::presets::Case;

pub const TOOL: &str = "tmode";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default share of the total count rate taken by background in chirp scans.
pub const DEFAULT_BACKGROUND_FRACTION: f64 = 0.04;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Invocation {
    Jsa,
    Schmidt,
    Rho,
    QpgMap,
    /// Projection probability of basis mode `mode` and its suppression
    /// relative to mode `against`.
    QpgProject {
        mode: usize,
        against: usize,
    },
    QpgFilter {
        mode: usize,
    },
    TomoMubs,
    TomoSimulate,
    /// Reconstructs from a counts CSV, or from simulated counts when absent.
    TomoReconstruct {
        counts: Option<PathBuf>,
    },
    TomoBootstrap {
        counts: Option<PathBuf>,
    },
    Preset {
        case: Case,
    },
    ChirpScan {
        chirps: Vec<f64>,
        background_fraction: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub invocation: Invocation,
    pub seed: u64,
    pub config: ExperimentConfig,
    /// Derived quantities, informational only.
    #[serde(default, skip_deserializing)]
    pub resolved: serde_json::Value,
    #[serde(default, skip_deserializing)]
    pub notes: Vec<String>,
}

impl Manifest {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let m: Manifest = serde_json::from_str(text).map_err(|e| CliError::config(format!("manifest: {e}")))?;
        if m.tool != TOOL {
            return Err(CliError::config(format!("manifest: written by '{}', not {TOOL}", m.tool)));
        }
        if m.version != VERSION {
            log::warn!("manifest written by {TOOL} {}, running {VERSION}", m.version);
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

fn read_counts(path: &Path) -> CliResult<CountRecords> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    CountRecords::from_csv(&text).map_err(|e| CliError::config(format!("counts ({}): {e}", path.display())))
}

fn counts_for(cfg: &ExperimentConfig, set: &ProjectorSet, path: Option<&Path>) -> CliResult<CountRecords> {
    match path {
        Some(p) => read_counts(p),
        None => {
            let rho = modal_state(cfg, None)?.rho;
            let t = &cfg.tomography;
            Ok(simulate_counts(&rho, set, &cfg.qpg.selectivity(), t.flux, t.background, t.seed)?)
        }
    }
}

fn unit(d: usize, k: usize) -> CliResult<Vec<num_complex::Complex64>> {
    if k >= d {
        return Err(CliError::config(format!("mode: index {k} is outside the {d}-dimensional basis")));
    }
    let mut v = vec![num_complex::Complex64::ZERO; d];
    v[k] = num_complex::Complex64::ONE;
    Ok(v)
}

/// Amplitude width (rad/fs) of a band with intensity FWHM `ghz` at `nm`.
fn width_from_ghz(nm: f64, ghz: f64) -> CliResult<f64> {
    Ok(convert_bandwidth(nm, wavelength_fwhm(nm, ghz)?)?.amplitude_width())
}

/// Runs `inv` and renders every output, the manifest included, in memory.
pub fn execute(inv: &Invocation, cfg: &ExperimentConfig) -> CliResult<Artifacts> {
    cfg.validate()?;
    let formats = &cfg.output.formats;
    let mut art = Artifacts::default();
    let mut resolved = serde_json::Value::Null;
    let mut notes = Vec::new();
    match inv {
        Invocation::Jsa => {
            let src = build_source(cfg)?;
            art.export("jsa", &src.jsa, formats)?;
            if cfg.output.wants(Format::Csv) {
                art.insert("jsi.csv", src.jsa.jsi_csv()?);
            }
            resolved = json!({ "pump_width_rad_per_fs": src.pump_width, "pm_width_rad_per_fs": src.pm_width });
        }
        Invocation::Schmidt => {
            let src = build_source(cfg)?;
            let dec = schmidt_decompose(&src.jsa, cfg.grid.max_modes)?;
            let est = purity_from_schmidt(&dec);
            art.json("schmidt.json", &dec.summary())?;
            art.json(
                "purity.json",
                &json!({
                    "svd_purity": est.purity,
                    "residual_bound": est.residual_bound,
                    "analytic_purity": analytic_purity(cfg, &src.jsa)?,
                    "g2": g2_from_purity(est.purity.min(1.0))?,
                }),
            )?;
            resolved = json!({ "pump_width_rad_per_fs": src.pump_width, "pm_width_rad_per_fs": src.pm_width });
        }
        Invocation::Rho => {
            let st = modal_state(cfg, None)?;
            art.export("rho_model", &st.rho, formats)?;
            resolved = serde_json::to_value(st.resolved).map_err(|e| CliError::Io(e.to_string()))?;
        }
        Invocation::QpgMap => {
            let q = &cfg.qpg;
            let w_in = angular_frequency(q.input_nm)?;
            let w_out = angular_frequency(q.output_nm)?;
            if w_out <= w_in {
                return Err(CliError::config("qpg.output_nm: output must be bluer than the input"));
            }
            let pump_width = width_from_ghz(q.input_nm, q.pump_fwhm_ghz)?;
            let pm_width = width_from_ghz(q.output_nm, q.pm_fwhm_ghz)?;
            let reach = cfg.grid.span_sigmas * ((q.pump_order + 1) as f64).sqrt() * pump_width;
            let input = make_grid(w_in, 2.0 * reach, q.points)?;
            let output = make_grid(w_out, 2.0 * reach, q.points)?;
            let pump_grid = make_grid(w_out - w_in, 4.0 * reach, 2 * q.points)?;
            let pump = hg_mode(&HermiteGaussParams::new(q.pump_order, w_out - w_in, pump_width)?, &pump_grid)?;
            let pm_reach = 4.0 * reach * (1.0 + q.skew.abs());
            let pm_grid = make_grid(w_out, 2.0 * pm_reach, 4 * q.points)?;
            let pm = hg_mode(&HermiteGaussParams::new(0, w_out, pm_width)?, &pm_grid)?;
            let xi = build_mapping(&pump, &pm, q.skew, &input, &output)?;
            art.export("mapping", &xi, formats)?;
            art.json("separability.json", &separability_report(&xi, cfg.grid.max_modes)?)?;
            resolved = json!({ "pump_width_rad_per_fs": pump_width, "pm_width_rad_per_fs": pm_width });
        }
        Invocation::QpgProject { mode, against } => {
            let st = modal_state(cfg, None)?;
            let d = st.rho.dimension();
            let sel = cfg.qpg.selectivity();
            let (a, b) = (unit(d, *mode)?, unit(d, *against)?);
            art.json(
                "projection.json",
                &json!({
                    "mode": mode,
                    "against": against,
                    "probability": project_probability(&st.rho, &a, &sel)?,
                    "probability_against": project_probability(&st.rho, &b, &sel)?,
                    "suppression": suppression_ratio(&st.rho, &a, &b, &sel)?,
                }),
            )?;
        }
        Invocation::QpgFilter { mode } => {
            let st = modal_state(cfg, None)?;
            let spec = FilterSpec::basis_element(st.rho.dimension(), *mode, cfg.qpg.filter_efficiency)?;
            art.json("filter.json", &apply_mode_filter(&st.rho, &spec)?)?;
        }
        Invocation::TomoMubs => {
            art.export("projectors", &mub_bases(cfg.basis.d)?, &[Format::Json])?;
        }
        Invocation::TomoSimulate => {
            let set = mub_bases(cfg.basis.d)?;
            art.export("counts", &counts_for(cfg, &set, None)?, formats)?;
        }
        Invocation::TomoReconstruct { counts } => {
            let set = mub_bases(cfg.basis.d)?;
            let records = counts_for(cfg, &set, counts.as_deref())?;
            let rec = mle_reconstruct(&records.0, &set, &cfg.tomography.reconstruction)?;
            if !rec.converged {
                return Err(CliError::Numerical(format!(
                    "reconstruction did not converge within {} iterations",
                    rec.iterations
                )));
            }
            art.export("rho_reconstructed", &rec.rho_hat, &[Format::Json])?;
            art.insert("convergence.csv", rec.convergence_csv()?);
        }
        Invocation::TomoBootstrap { counts } => {
            let set = mub_bases(cfg.basis.d)?;
            let records = counts_for(cfg, &set, counts.as_deref())?;
            let t = &cfg.tomography;
            let mc = monte_carlo_errors(&records.0, &set, &t.reconstruction, t.resamples, t.seed.wrapping_add(1))?;
            art.json("bootstrap.json", &mc)?;
        }
        Invocation::Preset { case } => {
            let out = run_experiment(Some(*case), cfg)?;
            resolved = serde_json::to_value(out.state.resolved).map_err(|e| CliError::Io(e.to_string()))?;
            notes = out.notes;
            art = out.artifacts;
        }
        Invocation::ChirpScan { chirps, background_fraction } => {
            let rows = chirp_scan(chirps, cfg, *background_fraction)?;
            art.insert("chirp_scan.csv", scan_csv(&rows)?);
        }
    }
    let manifest = Manifest {
        tool: TOOL.into(),
        version: VERSION.into(),
        invocation: inv.clone(),
        seed: cfg.tomography.seed,
        config: cfg.clone(),
        resolved,
        notes,
    };
    art.json("manifest.json", &manifest)?;
    Ok(art)
}

/// Replays a manifest.
pub fn rerun(manifest: &Manifest) -> CliResult<Artifacts> {
    execute(&manifest.invocation, &manifest.config)
}

/// Preset configuration merged with a partial override object.
pub fn preset_config(case: Case, overrides: Option<&serde_json::Value>) -> CliResult<ExperimentConfig> {
    let base = case.config();
    match overrides {
        None => Ok(base),
        Some(o) => merge_config(&base, o),
    }
}

/// Deep-merges `overrides` into `base`; objects merge key by key and any
/// other value replaces what it overrides. Tagged policies (objects with a
/// `policy` key) are replaced whole.
pub fn merge_config(base: &ExperimentConfig, overrides: &serde_json::Value) -> CliResult<ExperimentConfig> {
    let mut v = serde_json::to_value(base).map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(dir) = overrides.pointer("/output/directory") {
        // the directory is not serialized; carry it through explicitly
        v["output"]["directory"] = dir.clone();
    } else {
        v["output"]["directory"] = json!(base.output.directory);
    }
    merge(&mut v, overrides);
    serde_json::from_value(v).map_err(|e| CliError::config(format!("config: {e}")))
}

fn merge(dst: &mut serde_json::Value, src: &serde_json::Value) {
    match (dst, src) {
        (serde_json::Value::Object(d), serde_json::Value::Object(s)) if !s.contains_key("policy") => {
            for (k, v) in s {
                match d.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        d.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (d, s) => *d = s.clone(),
    }
}

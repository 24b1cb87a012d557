//! Argument parsing and dispatch.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use tmode_core::Format;

use crate::config::{BasisWidth, ExperimentConfig, PmWidth};
use crate::error::{CliError, CliResult};
use crate::presets::Case;
use crate::run::{execute, merge_config, preset_config, rerun, Invocation, Manifest, DEFAULT_BACKGROUND_FRACTION};

#[derive(Debug, Parser)]
#[command(name = "tmode", version, about = "Temporal-mode PDC simulation, mode filtering and tomography")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint spectral amplitude and intensity.
    Jsa(Overrides),
    /// Schmidt weights, purity and g².
    Schmidt(Overrides),
    /// Signal-photon density matrix in the Hermite-Gauss basis.
    Rho(Overrides),
    /// Mode-selective frequency conversion.
    #[command(subcommand)]
    Qpg(QpgCommand),
    /// Mutually unbiased tomography of the signal photon.
    #[command(subcommand)]
    Tomo(TomoCommand),
    /// Full pipeline for one of the four reference cases.
    Preset {
        case: Case,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Replays the run recorded in a manifest.
    Rerun {
        manifest: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Purity and g² as a function of pump chirp.
    ChirpScan {
        /// Chirp values in fs².
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0,1e5,2e5,3.8e5,6e5,1e6")]
        chirps: Vec<f64>,
        /// Background share of the total count rate.
        #[arg(long, default_value_t = DEFAULT_BACKGROUND_FRACTION)]
        background_fraction: f64,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Debug, Subcommand)]
pub enum QpgCommand {
    /// Transfer function of the converter and its separability.
    Map(Overrides),
    /// Projection probability of one basis mode and its suppression ratio.
    Project {
        #[arg(long, default_value_t = 0)]
        mode: usize,
        #[arg(long, default_value_t = 1)]
        against: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Add-drop filtering of one basis mode.
    Filter {
        #[arg(long, default_value_t = 0)]
        mode: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Debug, Subcommand)]
pub enum TomoCommand {
    /// Mutually unbiased projector set.
    Mubs(Overrides),
    /// Poisson counts for every projector.
    Simulate(Overrides),
    /// Maximum-likelihood density matrix.
    Reconstruct {
        /// Counts CSV; simulated from the configuration when omitted.
        #[arg(long)]
        counts: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Monte Carlo error bars of the reconstruction.
    Bootstrap {
        #[arg(long)]
        counts: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

/// Configuration file and per-field overrides shared by all commands.
#[derive(Debug, Default, Clone, Args)]
pub struct Overrides {
    /// JSON configuration; only the fields present override the defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    #[arg(long)]
    pub pump_order: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub pump_center_nm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub pump_fwhm_nm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub chirp_fs2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub angle_deg: Option<f64>,
    /// Explicit phasematching width in rad/fs.
    #[arg(long, allow_negative_numbers = true)]
    pub pm_width: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub max_modes: Option<usize>,
    /// Basis dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Explicit basis width in rad/fs.
    #[arg(long, allow_negative_numbers = true)]
    pub basis_width: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub crosstalk: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub filter_efficiency: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub flux: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub background: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub resamples: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
}

fn read_json(path: &Path) -> CliResult<serde_json::Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

impl Overrides {
    /// `base`, then the config file, then the flags; validated.
    pub fn resolve(&self, base: ExperimentConfig) -> CliResult<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => merge_config(&base, &read_json(p)?)?,
            None => base,
        };
        macro_rules! set {
            ($flag:ident => $($field:ident).+) => {
                if let Some(v) = self.$flag.clone() {
                    c.$($field).+ = v;
                }
            };
        }
        set!(pump_order => pump.order);
        set!(pump_center_nm => pump.center_nm);
        set!(pump_fwhm_nm => pump.fwhm_nm);
        set!(chirp_fs2 => pump.chirp_fs2);
        set!(angle_deg => phasematching.angle_deg);
        set!(grid_points => grid.points);
        set!(max_modes => grid.max_modes);
        set!(d => basis.d);
        set!(crosstalk => qpg.crosstalk);
        set!(filter_efficiency => qpg.filter_efficiency);
        set!(flux => tomography.flux);
        set!(background => tomography.background);
        set!(seed => tomography.seed);
        set!(resamples => tomography.resamples);
        set!(max_iterations => tomography.reconstruction.max_iterations);
        set!(tolerance => tomography.reconstruction.tolerance);
        set!(out => output.directory);
        set!(format => output.formats);
        if let Some(w) = self.pm_width {
            c.phasematching.width = PmWidth::RadPerFs(w);
        }
        if let Some(w) = self.basis_width {
            c.basis.width = BasisWidth::RadPerFs(w);
        }
        c.validate()?;
        Ok(c)
    }
}

fn plan(command: &Command) -> CliResult<(Invocation, ExperimentConfig)> {
    let default = ExperimentConfig::default;
    Ok(match command {
        Command::Jsa(o) => (Invocation::Jsa, o.resolve(default())?),
        Command::Schmidt(o) => (Invocation::Schmidt, o.resolve(default())?),
        Command::Rho(o) => (Invocation::Rho, o.resolve(default())?),
        Command::Qpg(QpgCommand::Map(o)) => (Invocation::QpgMap, o.resolve(default())?),
        Command::Qpg(QpgCommand::Project { mode, against, overrides }) => {
            (Invocation::QpgProject { mode: *mode, against: *against }, overrides.resolve(default())?)
        }
        Command::Qpg(QpgCommand::Filter { mode, overrides }) => {
            (Invocation::QpgFilter { mode: *mode }, overrides.resolve(default())?)
        }
        Command::Tomo(TomoCommand::Mubs(o)) => (Invocation::TomoMubs, o.resolve(default())?),
        Command::Tomo(TomoCommand::Simulate(o)) => (Invocation::TomoSimulate, o.resolve(default())?),
        Command::Tomo(TomoCommand::Reconstruct { counts, overrides }) => {
            (Invocation::TomoReconstruct { counts: counts.clone() }, overrides.resolve(default())?)
        }
        Command::Tomo(TomoCommand::Bootstrap { counts, overrides }) => {
            (Invocation::TomoBootstrap { counts: counts.clone() }, overrides.resolve(default())?)
        }
        Command::Preset { case, overrides } => {
            (Invocation::Preset { case: *case }, overrides.resolve(preset_config(*case, None)?)?)
        }
        Command::ChirpScan { chirps, background_fraction, overrides } => (
            Invocation::ChirpScan { chirps: chirps.clone(), background_fraction: *background_fraction },
            overrides.resolve(default())?,
        ),
        Command::Rerun { .. } => unreachable!("handled by run"),
    })
}

/// Executes a parsed command line and returns the output directory.
pub fn run(cli: &Cli) -> CliResult<PathBuf> {
    let (artifacts, dir) = match &cli.command {
        Command::Rerun { manifest, out } => (rerun(&Manifest::load(manifest)?)?, out.clone()),
        other => {
            let (inv, cfg) = plan(other)?;
            log::info!("running {inv:?}");
            (execute(&inv, &cfg)?, cfg.output.directory.clone())
        }
    };
    artifacts.write(&dir)?;
    for name in artifacts.names() {
        println!("{}", dir.join(name).display());
    }
    Ok(dir)
}

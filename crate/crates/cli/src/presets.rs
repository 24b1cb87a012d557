//! The four pump configurations and their measured reference values.

use serde::{Deserialize, Serialize};

use crate::config::{
    BasisConfig, ExperimentConfig, GridConfig, OutputConfig, PhasematchingConfig, PmWidth, PumpConfig, QpgConfig,
    TomographyConfig,
};

/// Bandwidth (nm) of the decorrelated reference pump; the crystal of the
/// narrowband and HG1 cases is designed for it.
pub const REFERENCE_FWHM_NM: f64 = 1.72;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    /// Decorrelated, single-mode state (HG0 pump, 1.72 nm).
    A,
    /// Narrowband pump, spectrally anticorrelated (HG0, 0.54 nm).
    B,
    /// Chirped pump, phase-correlated (HG0, 1.49 nm, 0.38e6 fs²).
    C,
    /// HG1 pump, two-mode state (1.31 nm).
    D,
}

/// Measured values for one case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reference {
    pub pump_shape: &'static str,
    pub pump_fwhm_nm: f64,
    pub pump_chirp_fs2: f64,
    pub qpg_pump_fwhm_nm: f64,
    pub reconstructed_purity: f64,
    pub reconstructed_purity_error: f64,
    pub expected_purity_from_jsi: f64,
    pub transmitted_g2_pump_blocked: f64,
    pub transmitted_g2_pump_delayed: f64,
    pub transmitted_g2_hg0: f64,
    pub transmitted_g2_hg1: f64,
    pub upconverted_g2_hg0: f64,
    pub upconverted_g2_hg1: f64,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::A, Case::B, Case::C, Case::D];

    pub fn name(self) -> &'static str {
        match self {
            Case::A => "a",
            Case::B => "b",
            Case::C => "c",
            Case::D => "d",
        }
    }

    pub fn config(self) -> ExperimentConfig {
        let (order, fwhm_nm, chirp_fs2, angle, width) = match self {
            Case::A => (0, REFERENCE_FWHM_NM, 0.0, 45.0, PmWidth::Matched),
            Case::B => (0, 0.54, 0.0, 45.0, PmWidth::MatchedToFwhmNm(REFERENCE_FWHM_NM)),
            Case::C => (0, 1.49, 0.38e6, 45.0, PmWidth::Matched),
            Case::D => (1, 1.31, 0.0, 49.0, PmWidth::MatchedToFwhmNm(REFERENCE_FWHM_NM)),
        };
        ExperimentConfig {
            pump: PumpConfig { order, center_nm: 769.0, fwhm_nm, chirp_fs2 },
            phasematching: PhasematchingConfig { angle_deg: angle, width, ..PhasematchingConfig::default() },
            grid: GridConfig::default(),
            basis: BasisConfig::default(),
            qpg: QpgConfig::default(),
            tomography: TomographyConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn reference(self) -> Reference {
        match self {
            Case::A => Reference {
                pump_shape: "HG0",
                pump_fwhm_nm: 1.72,
                pump_chirp_fs2: 0.0,
                qpg_pump_fwhm_nm: 1.54,
                reconstructed_purity: 0.896,
                reconstructed_purity_error: 0.006,
                expected_purity_from_jsi: 0.995,
                transmitted_g2_pump_blocked: 1.929,
                transmitted_g2_pump_delayed: 1.861,
                transmitted_g2_hg0: 1.827,
                transmitted_g2_hg1: 1.875,
                upconverted_g2_hg0: 1.975,
                upconverted_g2_hg1: 2.078,
            },
            Case::B => Reference {
                pump_shape: "HG0",
                pump_fwhm_nm: 0.54,
                pump_chirp_fs2: 0.0,
                qpg_pump_fwhm_nm: 1.05,
                reconstructed_purity: 0.523,
                reconstructed_purity_error: 0.008,
                expected_purity_from_jsi: 0.652,
                transmitted_g2_pump_blocked: 1.528,
                transmitted_g2_pump_delayed: 1.494,
                transmitted_g2_hg0: 1.456,
                transmitted_g2_hg1: 1.512,
                upconverted_g2_hg0: 2.044,
                upconverted_g2_hg1: 1.951,
            },
            Case::C => Reference {
                pump_shape: "HG0",
                pump_fwhm_nm: 1.49,
                pump_chirp_fs2: 0.38e6,
                qpg_pump_fwhm_nm: 1.58,
                reconstructed_purity: 0.317,
                reconstructed_purity_error: 0.005,
                expected_purity_from_jsi: 0.377,
                transmitted_g2_pump_blocked: 1.327,
                transmitted_g2_pump_delayed: 1.302,
                transmitted_g2_hg0: 1.277,
                transmitted_g2_hg1: 1.308,
                upconverted_g2_hg0: 1.983,
                upconverted_g2_hg1: 1.925,
            },
            Case::D => Reference {
                pump_shape: "HG1",
                pump_fwhm_nm: 1.31,
                pump_chirp_fs2: 0.0,
                qpg_pump_fwhm_nm: 1.30,
                reconstructed_purity: 0.531,
                reconstructed_purity_error: 0.004,
                expected_purity_from_jsi: 0.542,
                transmitted_g2_pump_blocked: 1.498,
                transmitted_g2_pump_delayed: 1.461,
                transmitted_g2_hg0: 1.467,
                transmitted_g2_hg1: 1.446,
                upconverted_g2_hg0: 1.949,
                upconverted_g2_hg1: 1.993,
            },
        }
    }
}

impl std::str::FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Case::A),
            "b" => Ok(Case::B),
            "c" => Ok(Case::C),
            "d" => Ok(Case::D),
            other => Err(format!("unknown case '{other}' (expected a, b, c or d)")),
        }
    }
}

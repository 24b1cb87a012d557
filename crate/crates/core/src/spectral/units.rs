//! Wavelength-domain conversions. The rest of the crate works in rad/fs.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Speed of light in nm/fs.
pub const SPEED_OF_LIGHT_NM_PER_FS: f64 = 299.792458;

/// Ratio of a Gaussian's intensity FWHM to its intensity standard deviation.
pub fn fwhm_per_sigma() -> f64 {
    2.0 * (2.0 * std::f64::consts::LN_2).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthConversion {
    /// Intensity FWHM in GHz.
    pub fwhm_frequency: f64,
    /// Intensity standard deviation in rad/fs.
    pub sigma_omega: f64,
}

impl BandwidthConversion {
    /// Width parameter σ of the Gaussian amplitude `exp(-ω²/(2σ²))` whose
    /// intensity has standard deviation `sigma_omega`.
    pub fn amplitude_width(&self) -> f64 {
        self.sigma_omega * std::f64::consts::SQRT_2
    }
}

/// Converts a wavelength FWHM at `center_wavelength` (both nm) into a
/// frequency FWHM and an angular-frequency intensity standard deviation.
pub fn convert_bandwidth(center_wavelength: f64, fwhm_wavelength: f64) -> Result<BandwidthConversion> {
    if !(center_wavelength > 0.0 && center_wavelength.is_finite()) {
        return Err(invalid(format!("center wavelength must be positive, got {center_wavelength}")));
    }
    if !(fwhm_wavelength > 0.0 && fwhm_wavelength.is_finite()) {
        return Err(invalid(format!("wavelength FWHM must be positive, got {fwhm_wavelength}")));
    }
    // 1/fs = 1e6 GHz
    let fwhm_per_fs = SPEED_OF_LIGHT_NM_PER_FS * fwhm_wavelength / center_wavelength.powi(2);
    Ok(BandwidthConversion {
        fwhm_frequency: fwhm_per_fs * 1e6,
        sigma_omega: 2.0 * std::f64::consts::PI * fwhm_per_fs / fwhm_per_sigma(),
    })
}

/// Inverse of [`convert_bandwidth`]: the wavelength FWHM (nm) of a band with
/// frequency FWHM `fwhm_ghz` centred at `center_wavelength` nm.
pub fn wavelength_fwhm(center_wavelength: f64, fwhm_ghz: f64) -> Result<f64> {
    if !(center_wavelength > 0.0 && fwhm_ghz > 0.0) {
        return Err(invalid("wavelength and frequency FWHM must be positive"));
    }
    Ok(fwhm_ghz * 1e-6 * center_wavelength.powi(2) / SPEED_OF_LIGHT_NM_PER_FS)
}

/// Angular frequency (rad/fs) of light at `wavelength` nm.
pub fn angular_frequency(wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(invalid(format!("wavelength must be positive, got {wavelength}")));
    }
    Ok(2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_NM_PER_FS / wavelength)
}

/// Intensity FWHM in rad/fs of a band given in nm.
pub fn omega_fwhm(center_wavelength: f64, fwhm_wavelength: f64) -> Result<f64> {
    let c = convert_bandwidth(center_wavelength, fwhm_wavelength)?;
    Ok(c.sigma_omega * fwhm_per_sigma())
}

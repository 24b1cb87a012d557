use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SchmidtDecomposition;
use crate::error::{invalid, Error, Result};
use crate::export::{to_json_string, Export};
use crate::linalg::{self, CMatrix};
use crate::spectral::{
    apply_chirp, hg_mode, inner_product, ChirpPhase, ComplexSpectrum, FrequencyGrid, HermiteGaussParams,
};

/// Leakage above which [`reduced_density_matrix`] logs a warning.
pub const LEAKAGE_WARN: f64 = 0.1;
/// Leakage above which [`reduced_density_matrix`] refuses the basis.
pub const LEAKAGE_MAX: f64 = 0.5;

/// Hermite-Gauss mode family used as the temporal-mode basis, optionally
/// carrying a common quadratic spectral phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HgBasis {
    /// ω₀ (rad/fs).
    pub center: f64,
    /// Amplitude width σ (rad/fs).
    pub width: f64,
    /// Quadratic phase coefficient (fs²) applied to every basis mode.
    #[serde(default)]
    pub chirp: f64,
}

impl HgBasis {
    pub fn new(center: f64, width: f64) -> Self {
        Self { center, width, chirp: 0.0 }
    }

    pub fn with_chirp(self, chirp: f64) -> Self {
        Self { chirp, ..self }
    }

    pub fn params(&self, order: usize) -> HermiteGaussParams {
        HermiteGaussParams { order, center: self.center, width: self.width }
    }

    pub fn mode(&self, order: usize, grid: &FrequencyGrid) -> Result<ComplexSpectrum> {
        let m = hg_mode(&self.params(order), grid)?;
        Ok(apply_chirp(&m, &ChirpPhase::new(self.chirp, self.center)))
    }

    pub fn modes(&self, d: usize, grid: &FrequencyGrid) -> Result<Vec<ComplexSpectrum>> {
        (0..d).map(|n| self.mode(n, grid)).collect()
    }

    /// Coefficients of `spectrum` in the first `d` basis modes, and the
    /// fraction of its norm outside them.
    pub fn project(&self, spectrum: &ComplexSpectrum, d: usize) -> Result<(Vec<Complex64>, f64)> {
        let modes = self.modes(d, spectrum.grid())?;
        let coeffs: Vec<Complex64> = modes.iter().map(|m| inner_product(m, spectrum)).collect::<Result<_>>()?;
        let inside: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        Ok((coeffs, (spectrum.norm_sqr() - inside).max(0.0)))
    }
}

/// d×d Hermitian, positive-semidefinite, unit-trace matrix in a temporal-mode
/// basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalDensityMatrix {
    entries: CMatrix,
    basis: Option<HgBasis>,
    leakage: f64,
}

impl ModalDensityMatrix {
    /// Validates Hermiticity (1e-10), unit trace (1e-8) and
    /// positive-semidefiniteness (eigenvalues ≥ −1e-8).
    pub fn new(entries: CMatrix, basis: Option<HgBasis>, leakage: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(invalid(format!(
                "density matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("density matrix has non-finite entries"));
        }
        let herm = linalg::hermiticity_error(&entries);
        if herm > 1e-10 {
            return Err(invalid(format!("density matrix is not Hermitian (deviation {herm:.3e})")));
        }
        let tr = linalg::trace(&entries);
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(invalid(format!("density matrix trace is {tr}, expected 1")));
        }
        let min = linalg::hermitian_eigenvalues(&entries).last().copied().unwrap_or(0.0);
        if min < -1e-8 {
            return Err(invalid(format!("density matrix has negative eigenvalue {min:.3e}")));
        }
        Ok(Self { entries: linalg::hermitian_part(&entries), basis, leakage })
    }

    /// Hermitizes and rescales a positive-semidefinite matrix to unit trace.
    pub fn from_psd(m: CMatrix, basis: Option<HgBasis>, leakage: f64) -> Result<Self> {
        let h = linalg::hermitian_part(&m);
        let tr = linalg::trace(&h).re;
        if !(tr > 0.0 && tr.is_finite()) {
            return Err(invalid("cannot normalize a matrix with non-positive trace"));
        }
        Self::new(h.unscale(tr), basis, leakage)
    }

    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let d = weights.len();
        let m = CMatrix::from_fn(d, d, |i, j| if i == j { Complex64::new(weights[i], 0.0) } else { Complex64::ZERO });
        Self::new(m, None, 0.0)
    }

    /// `|v⟩⟨v|` for a normalized coefficient vector.
    pub fn pure(coeffs: &[Complex64]) -> Result<Self> {
        let norm = linalg::vector_norm(coeffs);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NonUnitMode { norm });
        }
        Self::new(linalg::outer(coeffs), None, 0.0)
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0 / d as f64; d])
    }

    pub fn with_basis(mut self, basis: Option<HgBasis>) -> Self {
        self.basis = basis;
        self
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn basis(&self) -> Option<&HgBasis> {
        self.basis.as_ref()
    }

    /// Weight that fell outside the truncated basis before renormalization.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.entries)
    }

    pub fn populations(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    /// `⟨m|ρ|m⟩`.
    pub fn expectation(&self, mode: &[Complex64]) -> Result<f64> {
        if mode.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), found: mode.len() });
        }
        Ok(linalg::expectation(&self.entries, mode))
    }
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    d: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    leakage: f64,
}

impl Serialize for ModalDensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DensityRepr {
            d: self.dimension(),
            re: self.entries.row_iter().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            im: self.entries.row_iter().map(|r| r.iter().map(|z| z.im).collect()).collect(),
            leakage: self.leakage,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModalDensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = DensityRepr::deserialize(de)?;
        let d = r.d;
        let shape_ok = r.re.len() == d && r.im.len() == d && r.re.iter().chain(&r.im).all(|row| row.len() == d);
        if !shape_ok {
            return Err(D::Error::custom(format!("re/im must be {d}x{d}")));
        }
        let m = CMatrix::from_fn(d, d, |i, j| Complex64::new(r.re[i][j], r.im[i][j]));
        ModalDensityMatrix::new(m, None, r.leakage).map_err(D::Error::custom)
    }
}

impl Export for ModalDensityMatrix {
    fn kind(&self) -> &'static str {
        "density matrix"
    }

    fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

/// Signal-photon state `ρ_mn = Σ_k γ_k ⟨HG_m|ψ_k⟩⟨ψ_k|HG_n⟩` for `m, n < d`,
/// renormalized to unit trace. The weight lost to truncation (basis and
/// Schmidt) is stored as [`ModalDensityMatrix::leakage`].
pub fn reduced_density_matrix(dec: &SchmidtDecomposition, basis: &HgBasis, d: usize) -> Result<ModalDensityMatrix> {
    if d == 0 {
        return Err(invalid("basis dimension must be at least 1"));
    }
    if dec.is_empty() {
        return Err(invalid("empty Schmidt decomposition"));
    }
    let grid = dec.signal_modes[0].grid();
    let modes = basis.modes(d, grid)?;
    // overlaps[m][k] = ⟨HG_m|ψ_k⟩
    let overlaps: Vec<Vec<Complex64>> = modes
        .iter()
        .map(|hg| dec.signal_modes.iter().map(|psi| inner_product(hg, psi)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let rho = CMatrix::from_fn(d, d, |m, n| {
        dec.weights.iter().enumerate().map(|(k, g)| overlaps[m][k] * overlaps[n][k].conj() * *g).sum()
    });
    let captured = linalg::trace(&rho).re;
    let leakage = (1.0 - captured).max(0.0);
    if leakage > LEAKAGE_MAX {
        return Err(Error::BasisMismatch { leakage });
    }
    if leakage > LEAKAGE_WARN {
        log::warn!("{:.1}% of the signal state lies outside the {d}-mode basis", 100.0 * leakage);
    }
    ModalDensityMatrix::from_psd(rho, Some(*basis), leakage)
}

/// Basis width maximizing `|⟨HG0|ψ⟩|` for the given mode, by golden-section
/// search on a logarithmic width axis.
pub fn fit_basis_width(mode: &ComplexSpectrum, center: f64, chirp: f64) -> Result<f64> {
    let sigma = mode.intensity_sigma();
    if !(sigma > 0.0) {
        return Err(invalid("mode has no spectral extent"));
    }
    let overlap = |log_w: f64| -> Result<f64> {
        let b = HgBasis { center, width: log_w.exp(), chirp };
        Ok(inner_product(&b.mode(0, mode.grid())?, mode)?.norm())
    };
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = ((sigma / 8.0).ln(), (sigma * 8.0).ln());
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (overlap(x1)?, overlap(x2)?);
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = overlap(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = overlap(x1)?;
        }
    }
    Ok(((lo + hi) / 2.0).exp())
}

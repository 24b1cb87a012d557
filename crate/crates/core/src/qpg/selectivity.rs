use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::export::{to_json_string, Export};
use crate::linalg::{self, CMatrix};
use crate::pdc::ModalDensityMatrix;

/// Imperfect projector `Π = (1−ε)·f_k·|m⟩⟨m| + ε·I/d`.
///
/// `crosstalk` ε spreads part of every projection uniformly over the space;
/// `per_order_falloff[k]` scales the efficiency of a projection onto the
/// k-th basis element (orders past the end of the list are unscaled).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectivityModel {
    pub crosstalk: f64,
    #[serde(default)]
    pub per_order_falloff: Vec<f64>,
}

impl SelectivityModel {
    pub fn ideal() -> Self {
        Self::default()
    }

    pub fn with_crosstalk(crosstalk: f64) -> Result<Self> {
        let s = Self { crosstalk, per_order_falloff: Vec::new() };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.crosstalk) {
            return Err(invalid(format!("crosstalk must lie in [0, 1], got {}", self.crosstalk)));
        }
        if let Some(f) = self.per_order_falloff.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
            return Err(invalid(format!("falloff factors must lie in (0, 1], got {f}")));
        }
        Ok(())
    }

    /// Falloff factor for `mode`, applied only when it is a single basis
    /// element.
    fn order_factor(&self, mode: &[Complex64]) -> f64 {
        mode.iter()
            .position(|c| (c.norm_sqr() - 1.0).abs() < 1e-10)
            .and_then(|k| self.per_order_falloff.get(k).copied())
            .unwrap_or(1.0)
    }

    /// Measurement operator realized when programming `mode`.
    pub fn operator(&self, mode: &[Complex64]) -> Result<CMatrix> {
        self.validate()?;
        check_mode(mode)?;
        let d = mode.len();
        let eps = self.crosstalk;
        let mut op = linalg::outer(mode).scale((1.0 - eps) * self.order_factor(mode));
        for j in 0..d {
            op[(j, j)] += Complex64::new(eps / d as f64, 0.0);
        }
        Ok(op)
    }
}

pub(crate) fn check_mode(mode: &[Complex64]) -> Result<()> {
    if mode.is_empty() {
        return Err(invalid("mode has no coefficients"));
    }
    let norm = linalg::vector_norm(mode);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitMode { norm });
    }
    Ok(())
}

/// Probability that the converter fires when programmed to `mode`.
pub fn project_probability(rho: &ModalDensityMatrix, mode: &[Complex64], sel: &SelectivityModel) -> Result<f64> {
    if mode.len() != rho.dimension() {
        return Err(Error::DimensionMismatch { expected: rho.dimension(), found: mode.len() });
    }
    let op = sel.operator(mode)?;
    let p = linalg::trace(&(op * rho.entries())).re;
    Ok(p.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuppressionRatio {
    pub ratio: f64,
    pub db: f64,
    /// Set when the suppressed probability is zero.
    pub infinite: bool,
}

impl Export for SuppressionRatio {
    fn kind(&self) -> &'static str {
        "suppression ratio"
    }

    fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

/// `p_a / p_b` and its value in dB.
pub fn suppression_ratio(
    rho: &ModalDensityMatrix,
    mode_a: &[Complex64],
    mode_b: &[Complex64],
    sel: &SelectivityModel,
) -> Result<SuppressionRatio> {
    let pa = project_probability(rho, mode_a, sel)?;
    let pb = project_probability(rho, mode_b, sel)?;
    if pb <= f64::EPSILON * pa {
        if pa == 0.0 {
            return Err(invalid("both projection probabilities vanish"));
        }
        return Ok(SuppressionRatio { ratio: f64::INFINITY, db: f64::INFINITY, infinite: true });
    }
    let ratio = pa / pb;
    Ok(SuppressionRatio { ratio, db: 10.0 * ratio.log10(), infinite: false })
}

/// Crosstalk ε at which a pure basis state is favoured over an orthogonal
/// basis element by `ratio` in dimension `d`:
/// `((1−ε) + ε/d) / (ε/d) = ratio`.
pub fn crosstalk_for_ratio(ratio: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(invalid("dimension must be at least 2"));
    }
    if !(ratio >= 1.0) {
        return Err(invalid(format!("suppression ratio must be at least 1, got {ratio}")));
    }
    let d = d as f64;
    Ok(d / (ratio + d - 1.0))
}

pub(crate) fn unit_vector(d: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::ZERO; d];
    v[k] = Complex64::ONE;
    v
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CountRecord, ProjectorSet};
use crate::error::{invalid, Error, Result};
use crate::export::{csv_table, to_json_string, Export};
use crate::linalg::{self, CMatrix};
use crate::pdc::ModalDensityMatrix;
use crate::qpg::SelectivityModel;

/// Largest decrease of the log-likelihood tolerated before a step is retried
/// with half the dilution.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MleConfig {
    pub max_iterations: usize,
    /// Stop once the per-count log-likelihood changes by less than this.
    pub tolerance: f64,
    /// Dilution λ ∈ (0, 1].
    pub dilution: f64,
    /// Known mean background per projector (scaled by exposure), subtracted
    /// before reconstruction when set.
    pub subtract_background: Option<f64>,
    /// Measurement model assumed by the reconstruction.
    pub selectivity: SelectivityModel,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            tolerance: 1e-10,
            dilution: 0.5,
            subtract_background: None,
            selectivity: SelectivityModel::ideal(),
        }
    }
}

impl MleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.dilution > 0.0 && self.dilution <= 1.0) {
            return Err(invalid(format!("dilution must lie in (0, 1], got {}", self.dilution)));
        }
        if let Some(b) = self.subtract_background {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(invalid(format!("background must be non-negative, got {b}")));
            }
        }
        self.selectivity.validate()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionResult {
    pub rho_hat: ModalDensityMatrix,
    /// Per-count log-likelihood after every iteration.
    pub log_likelihood: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl ReconstructionResult {
    /// CSV with columns `iteration,log_likelihood`.
    pub fn convergence_csv(&self) -> Result<String> {
        let rows = self.log_likelihood.iter().enumerate().map(|(k, l)| [(k + 1) as f64, *l]);
        csv_table(&["iteration", "log_likelihood"], rows)
    }
}

impl Export for ReconstructionResult {
    fn kind(&self) -> &'static str {
        "reconstruction"
    }

    fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    fn to_csv(&self) -> Result<String> {
        self.convergence_csv()
    }
}

struct Term {
    op: CMatrix,
    exposure: f64,
    /// Fraction of all counts.
    freq: f64,
}

fn click_probability(op: &CMatrix, rho: &CMatrix) -> f64 {
    // Tr(Πρ) = Σ_jk Π_jk ρ_kj
    let mut s = Complex64::ZERO;
    for j in 0..op.nrows() {
        for k in 0..op.ncols() {
            s += op[(j, k)] * rho[(k, j)];
        }
    }
    s.re
}

/// Per-count Poisson log-likelihood with the overall flux profiled out:
/// `Σ f_i ln(e_i p_i) − ln Σ e_j p_j`, and the probabilities it used.
fn log_likelihood(terms: &[Term], rho: &CMatrix) -> (f64, Vec<f64>) {
    let probs: Vec<f64> = terms.iter().map(|t| click_probability(&t.op, rho).max(0.0)).collect();
    let norm: f64 = terms.iter().zip(&probs).map(|(t, p)| t.exposure * p).sum();
    let mut l = -norm.ln();
    for (t, p) in terms.iter().zip(&probs) {
        if t.freq > 0.0 {
            l += t.freq * (t.exposure * p).ln();
        }
    }
    (l, probs)
}

/// `L(ρ + δρ) − L(ρ)` from the probability increments, without the
/// cancellation of subtracting two nearly equal likelihoods.
fn likelihood_change(terms: &[Term], probs: &[f64], norm: f64, step: &CMatrix) -> f64 {
    let mut dnorm = 0.0;
    let mut dl = 0.0;
    for (t, p) in terms.iter().zip(probs) {
        let dp = click_probability(&t.op, step);
        dnorm += t.exposure * dp;
        if t.freq > 0.0 {
            let x = dp / p.max(f64::MIN_POSITIVE);
            if x <= -1.0 {
                return f64::NEG_INFINITY;
            }
            dl += t.freq * x.ln_1p();
        }
    }
    dl - (dnorm / norm).ln_1p()
}

fn span_rank(ops: &[&CMatrix], d: usize) -> usize {
    let m = CMatrix::from_fn(d * d, ops.len(), |r, c| ops[c][(r / d, r % d)]);
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|s| **s > 1e-9 * max).count()
}

/// Maximum-likelihood state estimate by the diluted `RρR` iteration
/// `ρ ← A ρ A† / Tr`, `A = (1−λ)I + λ·S·H⁻¹·R`, where
/// `R = Σ f_i Π_i / p_i`, `H = Σ e_i Π_i` and `S = Σ e_i p_i`.
///
/// For a complete set of bases with equal exposure `S·H⁻¹ = I` and this is
/// the usual `RρR` update. A step that would lower the likelihood is
/// retried with half the dilution.
pub fn mle_reconstruct(records: &[CountRecord], set: &ProjectorSet, cfg: &MleConfig) -> Result<ReconstructionResult> {
    cfg.validate()?;
    if records.is_empty() {
        return Err(invalid("no count records"));
    }
    let d = set.dimension();
    let background = cfg.subtract_background.unwrap_or(0.0);
    let mut raw = Vec::with_capacity(records.len());
    for r in records {
        r.validate()?;
        let p = set
            .find(r.basis_index, r.element_index)
            .ok_or_else(|| invalid(format!("no projector labelled ({}, {})", r.basis_index, r.element_index)))?;
        let n = (r.counts as f64 - background * r.exposure).max(0.0);
        raw.push((cfg.selectivity.operator(&p.coefficients)?, r.exposure, n));
    }
    let total: f64 = raw.iter().map(|t| t.2).sum();
    if !(total > 0.0) {
        return Err(invalid("total counts are zero"));
    }
    let ops: Vec<&CMatrix> = raw.iter().map(|t| &t.0).collect();
    let rank = span_rank(&ops, d);
    if rank < d * d {
        return Err(Error::IllPosed { rank, required: d * d });
    }
    let h = raw.iter().fold(CMatrix::zeros(d, d), |acc, t| acc + t.0.scale(t.1));
    let h_inv = h.try_inverse().ok_or_else(|| invalid("measurement operators do not resolve the identity"))?;
    let terms: Vec<Term> = raw.into_iter().map(|(op, exposure, n)| Term { op, exposure, freq: n / total }).collect();

    let identity = CMatrix::identity(d, d);
    let mut rho = identity.unscale(d as f64);
    let (mut l, mut probs) = log_likelihood(&terms, &rho);
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let s: f64 = terms.iter().zip(&probs).map(|(t, p)| t.exposure * p).sum();
        let mut r = CMatrix::zeros(d, d);
        for (t, p) in terms.iter().zip(&probs) {
            if t.freq > 0.0 {
                r += t.op.scale(t.freq / p.max(f64::MIN_POSITIVE));
            }
        }
        // A = I + λG; the increment of ρ is formed directly so that likelihood
        // changes far below the resolution of L itself stay measurable
        let g = (&h_inv * r).scale(s) - &identity;
        let gr = &g * &rho;
        let first = &gr + gr.adjoint();
        let second = &gr * g.adjoint();
        let mut lambda = cfg.dilution;
        let mut accepted = None;
        for _ in 0..60 {
            let delta = first.scale(lambda) + second.scale(lambda * lambda);
            let t = linalg::trace(&delta).re;
            let step = linalg::hermitian_part(&(&delta - rho.scale(t))).unscale(1.0 + t);
            let dl = likelihood_change(&terms, &probs, s, &step);
            if dl >= -MONOTONE_SLACK {
                accepted = Some((step, dl));
                break;
            }
            lambda /= 2.0;
        }
        let Some((step, dl)) = accepted else {
            // no ascent direction left at machine precision
            converged = true;
            break;
        };
        rho += step;
        let tr = linalg::trace(&rho).re;
        rho.unscale_mut(tr);
        probs = log_likelihood(&terms, &rho).1;
        let change = dl.abs();
        l += dl;
        trace.push(l);
        if change < cfg.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("maximum-likelihood iteration stopped after {iterations} steps without converging");
    }
    Ok(ReconstructionResult {
        rho_hat: ModalDensityMatrix::from_psd(rho, None, 0.0)?,
        log_likelihood: trace,
        iterations,
        converged,
    })
}

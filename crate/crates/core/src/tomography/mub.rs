use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::export::{to_json_string, Export};
use crate::linalg;

/// One measurement setting: element `element_index` of basis `basis_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub basis_index: usize,
    pub element_index: usize,
    pub coefficients: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSet {
    dimension: usize,
    projectors: Vec<Projector>,
}

impl ProjectorSet {
    /// Checks unit norms (1e-12) and orthogonality within each basis (1e-10).
    pub fn new(dimension: usize, projectors: Vec<Projector>) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("projector dimension must be at least 1"));
        }
        for p in &projectors {
            if p.coefficients.len() != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, found: p.coefficients.len() });
            }
            let norm = linalg::vector_norm(&p.coefficients);
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::NonUnitMode { norm });
            }
        }
        for (i, a) in projectors.iter().enumerate() {
            for b in &projectors[i + 1..] {
                if a.basis_index != b.basis_index {
                    continue;
                }
                if a.element_index == b.element_index {
                    return Err(invalid(format!("duplicate projector label ({}, {})", a.basis_index, a.element_index)));
                }
                let ov = overlap(&a.coefficients, &b.coefficients).norm();
                if ov > 1e-10 {
                    return Err(invalid(format!(
                        "projectors ({}, {}) and ({}, {}) are not orthogonal (overlap {ov:.3e})",
                        a.basis_index, a.element_index, b.basis_index, b.element_index
                    )));
                }
            }
        }
        Ok(Self { dimension, projectors })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn find(&self, basis_index: usize, element_index: usize) -> Option<&Projector> {
        self.projectors.iter().find(|p| p.basis_index == basis_index && p.element_index == element_index)
    }

    pub fn basis_count(&self) -> usize {
        self.projectors.iter().map(|p| p.basis_index + 1).max().unwrap_or(0)
    }
}

/// `⟨a|b⟩`.
pub fn overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// Complete set of d+1 mutually unbiased bases for prime `d`: the
/// computational basis followed by the bases
/// `e_k = ω^(a·k² + j·k)/√d`, `ω = e^(2πi/d)`, for `a = 0..d`.
///
/// For `d = 2` the quadratic term uses `i^(a·k²)`, since `ω^(a·k²)` does
/// not separate the last two bases there.
pub fn mub_bases(d: usize) -> Result<ProjectorSet> {
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut projectors = Vec::with_capacity(d * (d + 1));
    for j in 0..d {
        let mut c = vec![Complex64::ZERO; d];
        c[j] = Complex64::ONE;
        projectors.push(Projector { basis_index: 0, element_index: j, coefficients: c });
    }
    for a in 0..d {
        for j in 0..d {
            let coefficients = (0..d)
                .map(|k| {
                    let phase = if d == 2 {
                        PI / 2.0 * (a * k * k) as f64 + PI * (j * k) as f64
                    } else {
                        2.0 * PI * ((a * k * k + j * k) % d) as f64 / d as f64
                    };
                    Complex64::from_polar(norm, phase)
                })
                .collect();
            projectors.push(Projector { basis_index: a + 1, element_index: j, coefficients });
        }
    }
    ProjectorSet::new(d, projectors)
}

#[derive(Serialize, Deserialize)]
struct ProjectorRepr {
    basis_index: usize,
    element_index: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProjectorSetRepr {
    d: usize,
    projectors: Vec<ProjectorRepr>,
}

impl Serialize for ProjectorSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProjectorSetRepr {
            d: self.dimension,
            projectors: self
                .projectors
                .iter()
                .map(|p| ProjectorRepr {
                    basis_index: p.basis_index,
                    element_index: p.element_index,
                    re: p.coefficients.iter().map(|c| c.re).collect(),
                    im: p.coefficients.iter().map(|c| c.im).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjectorSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ProjectorSetRepr::deserialize(de)?;
        let projectors = r
            .projectors
            .into_iter()
            .map(|p| {
                if p.re.len() != p.im.len() {
                    return Err(D::Error::custom("re and im lengths differ"));
                }
                let coefficients = p.re.iter().zip(&p.im).map(|(&re, &im)| Complex64::new(re, im)).collect();
                Ok(Projector { basis_index: p.basis_index, element_index: p.element_index, coefficients })
            })
            .collect::<std::result::Result<_, _>>()?;
        ProjectorSet::new(r.d, projectors).map_err(D::Error::custom)
    }
}

impl Export for ProjectorSet {
    fn kind(&self) -> &'static str {
        "projector set"
    }

    fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

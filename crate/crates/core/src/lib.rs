//! Temporal-mode modelling of heralded single photons: joint spectral
//! amplitudes of parametric down-conversion, mode-selective frequency
//! conversion, and modal state tomography.
//!
//! Frequencies are angular frequencies in rad/fs, times in fs and spectral
//! phases in fs².

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod export;
pub mod linalg;
pub mod pdc;
pub mod qpg;
pub mod spectral;
pub mod tomography;

pub use error::{Error, Result};
pub use export::{export, Export, Format};
pub use pdc::{
    build_jsa, reduced_density_matrix, schmidt_decompose, HgBasis, JointSpectralAmplitude, ModalDensityMatrix,
    PhasematchingModel, PhasematchingShape, SchmidtDecomposition,
};
pub use spectral::{ComplexSpectrum, FrequencyGrid, HermiteGaussParams};

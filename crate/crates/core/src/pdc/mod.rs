//! Parametric down-conversion: joint spectra, Schmidt decomposition, and
//! the derived photon statistics and modal states.

mod density;
mod jsa;
mod schmidt;
mod stats;

pub use density::{fit_basis_width, reduced_density_matrix, HgBasis, ModalDensityMatrix, LEAKAGE_MAX, LEAKAGE_WARN};
pub(crate) use jsa::GridMatrixRepr;
pub use jsa::{build_jsa, JointSpectralAmplitude, PhasematchingModel, PhasematchingShape};
pub(crate) use schmidt::decompose_kernel;
pub use schmidt::{schmidt_decompose, SchmidtDecomposition, SchmidtSummary, DEFAULT_MAX_MODES};
pub use stats::{
    background_mixed_g2, chirp_purity_analytic, g2_from_purity, mean_photon_from_g11, purity_from_schmidt,
    PurityEstimate,
};

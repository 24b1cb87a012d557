//! Modal state tomography with mutually unbiased bases: projector sets,
//! simulated count records, maximum-likelihood reconstruction and Monte
//! Carlo error bars.

mod bootstrap;
mod counts;
mod metrics;
mod mle;
mod mub;

pub use bootstrap::{monte_carlo_errors, MonteCarloSummary};
pub use counts::{simulate_counts, CountRecord, CountRecords};
pub use metrics::{random_state, state_metrics, StateMetrics};
pub use mle::{mle_reconstruct, MleConfig, ReconstructionResult};
pub use mub::{mub_bases, overlap, Projector, ProjectorSet};

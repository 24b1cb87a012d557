//! Mode-selective frequency conversion: the transfer kernel, imperfect
//! projective measurements, and add-drop mode filtering.

mod filter;
mod mapping;
mod selectivity;

pub use filter::{apply_mode_filter, FilterOutcome, FilterSpec, FILTER_LEAKAGE_MAX};
pub use mapping::{build_mapping, separability_report, MappingFunction, SelectivityReport};
pub use selectivity::{
    crosstalk_for_ratio, project_probability, suppression_ratio, SelectivityModel, SuppressionRatio,
};

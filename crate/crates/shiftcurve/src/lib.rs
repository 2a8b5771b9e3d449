//! Experiment runner for `shiftcurve-core`: TOML configuration, CSV bundles,
//! a rayon replication runner and the `shiftcurve` command line tool.
//!
//! Every table the CLI writes comes from a function in [`experiments`], so
//! results can be regenerated from library code alone.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod parallel;

pub use config::{
    ConfigPatch, CriterionName, DensitySpec, ExperimentConfig, LogBaseName, PenaltyVariant, TemplateSpec,
};
pub use error::{AppError, Result};
pub use experiments::{
    default_n_grid, estimate_bundle, rate_study_bundle, risk_bundle, run_section4_study, section4_replicates,
    select_bundle, simulate_bundle, StudyReplicate,
};
pub use output::{write_bundle, Bundle};
pub use parallel::{Parallel, Runner};

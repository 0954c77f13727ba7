//! Experiment harness: configuration, parallel runs, log files and the
//! offline RRF and ECDF analyses.

pub mod analysis;
pub mod config;
pub mod logs;
pub mod runner;
pub mod verify;

pub use analysis::{aggregate_rrf, compute_ecdf, RrfReport};
pub use config::{parse_config_str, parse_index_list, ExperimentConfig};
pub use logs::{parse_event_line, parse_manifest, parse_trajectory, Manifest, RunEntry};
pub use runner::run_experiment;
pub use verify::verify_dir;

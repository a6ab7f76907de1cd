//! Scenario runner and acceptance suite for `cpdq-core`.

pub mod config;
pub mod error;
pub mod format;
pub mod report;
pub mod scenario;
pub mod suite;

pub use config::{load_config, parse_config, schema_json, Kind, LoadedConfig, Scenario, ScenarioConfig};
pub use error::{CliError, CliResult, EXIT_CHECK, EXIT_COMPUTE, EXIT_CONFIG, EXIT_OK};
pub use report::{Check, Comparator, RunReport};
pub use suite::{criteria, run_suite, Criterion, CriterionOutcome, SuiteSummary};

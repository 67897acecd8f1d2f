//! Monte Carlo harness: configuration, trials, sweeps and output.

pub mod config;
pub mod metrics;
pub mod plot;
pub mod sweep;
pub mod trial;

pub use config::{noise_power, parse_list, ExperimentConfig, Mode};
pub use metrics::{aggregate, MetricsRecord, TrialOutcome};
pub use plot::{plot_script, write_plot_script};
pub use sweep::{failure_budget_exceeded, grid, run_point, run_sweep, write_csv, write_csv_to, PointTrials, FAILURE_BUDGET};
pub use trial::{correlation, run_trial, GridPoint, Scenario};

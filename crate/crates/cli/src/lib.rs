//! Configuration files, runs, sweeps and plots for `photodet-core`.

pub mod config;
pub mod error;
pub mod plot;
pub mod run;
pub mod sweep;

pub use config::{parse_config, InitialState, RawConfig, RunConfig};
pub use error::{CliError, Result};
pub use plot::plot_csv;
pub use run::{metrics_csv, run, run_metrics, CSV_HEADER};
pub use sweep::{figure_grid, parse_sweep, run_sweep, SweepPlan};

//! Load generator for the stageseat HTTP API.
//!
//! Virtual users register their own accounts, then loop over a weighted mix
//! of browse, search, book and review actions. SeatTaken and Houseful
//! refusals are counted as contended rather than as errors.

pub mod config;
pub mod monitor;
pub mod report;
pub mod runner;
pub mod stats;
pub mod sweep;
pub mod workload;

pub use config::{Action, ConfigError, Mix, ScenarioConfig};
pub use report::{EndpointKpi, KpiReport, Outcome};
pub use runner::{run_load, BenchError};
pub use stats::{percentile, LatencyStats, StatsError};
pub use sweep::{stress_sweep, SweepStep};

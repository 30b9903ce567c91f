//! Scenario configuration, Monte-Carlo drops, sweeps and CSV output.

pub mod config;
pub mod csv;
pub mod metrics;
pub mod runner;

pub use config::{ScenarioConfig, SweepAxis};
pub use csv::emit_csv;
pub use metrics::{empirical_cdf, quantile, AggregatedMetrics, MeanRates, MetricsBundle, Stat};
pub use runner::{
    baseline_config, run_drop, run_scenario, run_sweep, DropContext, DropOutcome, Execution,
    SweepRow, SweepTable,
};

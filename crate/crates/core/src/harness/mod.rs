//! Simulation sweeps, the degree-grouping counterexample and the political
//! blogs analysis. Everything tabular is written as CSV with the columns
//! `sweep_param,sweep_value,criterion,method,replication,metric,value,seed`.

mod counterexample;
mod experiment;
mod polblogs;
mod presets;

pub use counterexample::{
    run_counterexample, CounterexampleConfig, CounterexampleReport, FiniteSampleOutcome,
};
pub use experiment::{
    detect, median, medians, run_experiment, write_csv, ExperimentSpec, Method, Metric, Row,
    SweepParam, DEFAULT_SPECTRAL_ITERS, DEFAULT_SPECTRAL_TOL,
};
pub use polblogs::{
    degree_summary, load_polblogs, polblogs_path, quantile_sorted, run_polblogs, DegreeSummary,
    PolblogsConfig, PolblogsFit, PolblogsReport, DEFAULT_POLBLOGS_PATH, POLBLOGS_ENV,
};
pub use presets::{preset, preset_names, DESK_N, DESK_REPS, FULL_N, FULL_REPS, LAMBDAS};

/// Environment variable overriding the default output directory.
pub const OUT_DIR_ENV: &str = "DCSBM_OUT_DIR";

/// Output directory from `DCSBM_OUT_DIR`, falling back to `results`.
pub fn output_dir() -> std::path::PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(Into::into)
        .unwrap_or_else(|| "results".into())
}

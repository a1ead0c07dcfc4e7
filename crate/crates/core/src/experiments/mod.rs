//! Simulation generators, benchmark ingestion and the Monte Carlo driver.

pub mod benchmark;
pub mod sim;
pub mod trials;

pub use benchmark::{
    load_benchmark, load_labeled_csv, load_unlabeled_csv, synthetic_g10_like, BenchmarkData,
    BenchmarkName,
};
pub use sim::{
    gen_sim1, gen_sim2, sim1_conditional_prob, sim1_label_density, sim1_unlabel_density,
    Sim1Config, Sim2Case, Sim2Config,
};
pub use trials::{
    prediction_error, run_trials, BenchmarkExperiment, Experiment, ExperimentSpec, MethodOutcome, TrialRecord, TrialReport,
    TrialSettings, TrialSummary,
};

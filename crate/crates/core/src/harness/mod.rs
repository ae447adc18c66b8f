//! Experiment driver: baselines, configuration, the ablation, refinement
//! comparison and Δ-sweep pipelines, and the command-line front end.
//!
//! Every table is written as CSV whose first line is a `#` comment carrying
//! the configuration hash and seeds. Work is spread over rayon but each
//! result lands in a fixed slot, so outputs do not depend on the thread
//! count.

mod baselines;
pub mod cli;
mod config;
mod pipelines;

pub use baselines::{baseline_select_random, baseline_select_volume, building_volumes};
pub use config::{
    AblationSettings, DeltaSweep, Deployment, ExperimentConfig, Method, RadioConfig, SceneSource, SceneTx,
};
pub use pipelines::{
    bf_evaluate, run_ablation_experiment, run_delta_sweep, run_refinement_comparison, AblationEntry,
    AblationResults, ComparisonResults, ComparisonRow, DeltaRow, DeltaSweepResults, Evaluation, Experiment,
    ScenePair, Table,
};

//! Experiment runner: configuration, single runs, optimizer comparisons and
//! report files.

mod config;
mod report;
mod run;

pub use config::{
    BoundsSpec, ElementScale, ExperimentConfig, OptimizerChoice, OutputSpec, StructureSource, TargetSpec, TargetsFile,
    EXPERIMENT_SCHEMA_VERSION,
};
pub use report::{
    emit_comparison, emit_report, format_comparison, format_report, ComacReport, Comparison, ComparisonRow,
    FrequencyRow, ModulusRow, RunReport,
};
pub use run::{build_problem, compare_optimizers, run_experiment, run_problem, ResolvedTargets};

use thiserror::Error;

use crate::fe::FeError;
use crate::modal::ModalError;
use crate::optimize::OptimizeError;
use crate::surrogate::SurrogateError;
use crate::updating::UpdatingError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Fe(#[from] FeError),
    #[error(transparent)]
    Modal(#[from] ModalError),
    #[error(transparent)]
    Updating(#[from] UpdatingError),
    #[error("{optimizer} run failed: {source}")]
    Optimize {
        optimizer: &'static str,
        #[source]
        source: OptimizeError,
    },
    #[error("surrogate run failed: {0}")]
    Surrogate(#[from] SurrogateError),
    #[error("config {index} defines a different updating problem than config 0")]
    ProblemMismatch { index: usize },
    #[error("comparison needs at least two configs, got {0}")]
    TooFewConfigs(usize),
    #[error("writing {path}: {message}")]
    Output { path: String, message: String },
}

//! Finite-element model updating for planar frame structures.
//!
//! A 2-D Euler–Bernoulli frame model ([`fe`]) is solved for its natural
//! frequencies and mode shapes ([`modal`]). Per-element Young's moduli are
//! then tuned so the model's frequencies match measured ones ([`updating`]),
//! using particle swarm, simulated annealing or a genetic algorithm
//! ([`optimize`]), or a neural-network response surface searched by the
//! genetic algorithm ([`surrogate`]). [`experiment`] ties these together
//! behind a versioned TOML configuration and writes CSV/JSON reports.
//!
//! ```no_run
//! use feupdate::{pso_minimize, Bounds, PsoConfig, StructureConfig, UpdatingProblem, WeightRule};
//!
//! let model = StructureConfig::h_structure_default().build()?;
//! let bounds = Bounds::uniform(model.n_elements(), 6.0e10, 8.0e10)?;
//! let targets = vec![53.9, 117.3, 208.4, 254.0, 445.1];
//! let problem = UpdatingProblem::with_weight_rule(model, targets, WeightRule::PaperRule, bounds.clone())?;
//! let run = pso_minimize(&problem, &bounds, &PsoConfig::default())?;
//! println!("best cost {:.3e} after {} evaluations", run.best_cost, run.evaluations);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bounds;
pub mod experiment;
pub mod fe;
pub mod modal;
pub mod optimize;
pub mod surrogate;
pub mod updating;

pub use bounds::{clip_to_bounds, Bounds, BoundsError};
pub use experiment::{
    compare_optimizers, emit_comparison, emit_report, run_experiment, Comparison, ExperimentConfig, ExperimentError,
    OptimizerChoice, RunReport,
};
pub use fe::{FeError, FrameElement, GlobalMatrices, Node, StructureConfig, StructureModel};
pub use modal::{
    average_comac, comac, frf_inertance, select_measured, solve_modes, FrfSpec, ModalError, ModalSolution,
};
pub use optimize::{
    ga_minimize, pso_minimize, sa_minimize, GaConfig, Objective, OptimizeError, OptimizerRun, PsoConfig, SaConfig,
};
pub use surrogate::{surrogate_optimize, Mlp, SurrogateError, SurrogateLoopConfig, TrainingSet};
pub use updating::{CostEvaluation, UpdatingError, UpdatingProblem, WeightRule};

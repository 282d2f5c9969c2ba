//! Bound-constrained stochastic minimizers: particle swarm, simulated
//! annealing and a real-coded genetic algorithm.
//!
//! All three share the [`Objective`] contract and return an [`OptimizerRun`]
//! holding the best point ever evaluated and a best-so-far history.

mod ga;
mod pso;
mod sa;

pub use ga::{
    arithmetic_crossover, arithmetic_crossover_with, ga_minimize, nonuniform_mutate,
    nonuniform_mutate_with, normalized_geometric_pmf, normalized_geometric_select, GaConfig,
};
pub use pso::{pso_minimize, pso_minimize_observed, Particle, PsoConfig};
pub use sa::{metropolis_accept, sa_minimize, SaConfig};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::Bounds;

pub type ObjectiveError = Box<dyn std::error::Error + Send + Sync>;

/// Scalar cost to minimize. Implementations must be pure: the same input
/// always yields the same cost, and concurrent calls are allowed.
pub trait Objective: Sync {
    fn evaluate(&self, params: &[f64]) -> Result<f64, ObjectiveError>;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn evaluate(&self, params: &[f64]) -> Result<f64, ObjectiveError> {
        Ok(self(params))
    }
}

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("invalid {algorithm} configuration: {message}")]
    Config {
        algorithm: &'static str,
        message: String,
    },
    #[error("objective returned non-finite value {value} for {context}")]
    NonFinite { value: f64, context: String },
    #[error("objective failed for {context}: {source}")]
    Objective {
        context: String,
        #[source]
        source: ObjectiveError,
    },
}

/// Outcome of one optimizer call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerRun {
    pub best_params: Vec<f64>,
    pub best_cost: f64,
    /// Best-so-far cost after each step (swarm step, temperature stage,
    /// generation or surrogate refinement). Non-increasing.
    pub history: Vec<f64>,
    /// Total number of objective evaluations.
    pub evaluations: usize,
    pub seed: u64,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn checked_eval<O: Objective + ?Sized>(
    objective: &O,
    params: &[f64],
    context: impl FnOnce() -> String,
) -> Result<f64, OptimizeError> {
    match objective.evaluate(params) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(value) => Err(OptimizeError::NonFinite {
            value,
            context: context(),
        }),
        Err(source) => Err(OptimizeError::Objective {
            context: context(),
            source,
        }),
    }
}

/// Evaluates a batch in parallel; results come back in input order.
pub(crate) fn evaluate_batch<O: Objective + ?Sized>(
    objective: &O,
    points: &[Vec<f64>],
    context: impl Fn(usize) -> String + Sync,
) -> Result<Vec<f64>, OptimizeError> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| checked_eval(objective, p, || context(i)))
        .collect()
}

pub(crate) fn check_bounds_dim(bounds: &Bounds, algorithm: &'static str) -> Result<(), OptimizeError> {
    if bounds.dim() == 0 {
        return Err(OptimizeError::Config {
            algorithm,
            message: "bounds have zero dimensions".into(),
        });
    }
    Ok(())
}

//! Neural response-surface pipeline.
//!
//! A 12-8-1 perceptron approximates the updating cost from a Latin-hypercube
//! sample of true evaluations. The GA then minimizes the network, the
//! network's optimum is checked against the true objective, appended to the
//! training data, and the network is briefly retrained from its current
//! weights. The network is initialized exactly once per pipeline run.

mod mlp;
mod scg;

pub use mlp::{Mlp, MlpGradient};
pub use scg::{mlp_train, sum_of_squares, TrainOutcome, TrainingSet};

use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::Bounds;
use crate::optimize::{
    evaluate_batch, ga_minimize, rng_from_seed, Objective, ObjectiveError, OptimizeError, OptimizerRun, GaConfig,
};
use crate::updating::UpdatingProblem;

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training inputs must have dimension {expected}")]
    InputDimension { expected: usize },
    #[error("training loss became non-finite at cycle {cycle}")]
    NonFiniteLoss { cycle: usize },
    #[error("invalid surrogate configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error("csv export failed: {0}")]
    Csv(#[from] csv::Error),
}

/// Latin-hypercube design: every dimension's `n` equal strata each receive
/// exactly one point, placed uniformly within its stratum.
pub fn sample_design<R: Rng + ?Sized>(bounds: &Bounds, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let dim = bounds.dim();
    let mut points = vec![vec![0.0; dim]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..dim {
        strata.shuffle(rng);
        let (lo, width) = (bounds.lower()[j], bounds.width(j));
        for (point, &s) in points.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            point[j] = (lo + width * (s as f64 + u) / n as f64).min(bounds.upper()[j]);
        }
    }
    points
}

/// Loop settings; defaults reproduce the 150 + 10 evaluation budget with
/// 200 initial and 5 refresh training cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateLoopConfig {
    pub n_initial_samples: usize,
    pub n_refinements: usize,
    pub initial_training_cycles: usize,
    pub refresh_training_cycles: usize,
    pub hidden_units: usize,
    /// Optimizer applied to the network prediction at each refinement.
    pub inner: GaConfig,
    pub seed: u64,
}

impl Default for SurrogateLoopConfig {
    fn default() -> Self {
        Self {
            n_initial_samples: 150,
            n_refinements: 10,
            initial_training_cycles: 200,
            refresh_training_cycles: 5,
            hidden_units: 8,
            inner: GaConfig::default(),
            seed: 0,
        }
    }
}

impl SurrogateLoopConfig {
    fn validate(&self) -> Result<(), SurrogateError> {
        if self.n_initial_samples < 1
            || self.n_refinements < 1
            || self.initial_training_cycles < 1
            || self.refresh_training_cycles < 1
            || self.hidden_units < 1
        {
            return Err(SurrogateError::Config("all counts must be >= 1".into()));
        }
        Ok(())
    }
}

/// One training call in the surrogate's history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub refinement: usize,
    pub training_points: usize,
    pub cycles: usize,
    pub initial_loss: f64,
    pub final_loss: f64,
}

/// Trained network plus the data it was fitted to. Inputs are normalized to
/// `[-1, 1]` with the parameter bounds; targets are standardized with the
/// mean and standard deviation of the initial sample.
#[derive(Debug, Clone)]
pub struct SurrogateModel {
    net: Mlp,
    bounds: Bounds,
    target_mean: f64,
    target_scale: f64,
    /// Raw parameter vectors and true costs, in evaluation order.
    pub points: Vec<Vec<f64>>,
    pub costs: Vec<f64>,
    pub training_log: Vec<TrainingRecord>,
    initializations: usize,
}

impl SurrogateModel {
    fn new<R: Rng + ?Sized>(bounds: Bounds, hidden_units: usize, costs: &[f64], rng: &mut R) -> Self {
        let n = costs.len() as f64;
        let mean = costs.iter().sum::<f64>() / n;
        let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n;
        let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        let net = Mlp::random(bounds.dim(), hidden_units, rng);
        Self {
            net,
            bounds,
            target_mean: mean,
            target_scale: scale,
            points: Vec::new(),
            costs: Vec::new(),
            training_log: Vec::new(),
            initializations: 1,
        }
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    /// How many times the network weights were initialized.
    pub fn initializations(&self) -> usize {
        self.initializations
    }

    pub fn predict(&self, params: &[f64]) -> f64 {
        let z = self.bounds.normalize(params);
        self.net.forward(&z) * self.target_scale + self.target_mean
    }

    fn training_set(&self) -> TrainingSet {
        TrainingSet {
            inputs: self.points.iter().map(|p| self.bounds.normalize(p)).collect(),
            targets: self
                .costs
                .iter()
                .map(|c| (c - self.target_mean) / self.target_scale)
                .collect(),
        }
    }

    fn train(&mut self, cycles: usize, refinement: usize) -> Result<(), SurrogateError> {
        let set = self.training_set();
        let out = mlp_train(&mut self.net, &set, cycles)?;
        self.training_log.push(TrainingRecord {
            refinement,
            training_points: set.len(),
            cycles,
            initial_loss: out.losses[0],
            final_loss: out.final_loss,
        });
        Ok(())
    }

    /// CSV with one row per training point: `p1..pd,cost`.
    pub fn write_training_set_csv<W: Write>(&self, writer: W) -> Result<(), SurrogateError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=self.bounds.dim()).map(|i| format!("p{i}")).collect();
        header.push("cost".into());
        w.write_record(&header)?;
        for (p, c) in self.points.iter().zip(&self.costs) {
            let mut row: Vec<String> = p.iter().map(|v| format!("{v:e}")).collect();
            row.push(format!("{c:e}"));
            w.write_record(&row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// CSV with one row per training call.
    pub fn write_training_log_csv<W: Write>(&self, writer: W) -> Result<(), SurrogateError> {
        let mut w = csv::Writer::from_writer(writer);
        for record in &self.training_log {
            w.serialize(record)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

impl Objective for SurrogateModel {
    fn evaluate(&self, params: &[f64]) -> Result<f64, ObjectiveError> {
        Ok(self.predict(params))
    }
}

#[derive(Debug, Clone)]
pub struct SurrogateOutcome {
    pub run: OptimizerRun,
    pub model: SurrogateModel,
}

/// Runs the sample → train → (GA on network → true check → append →
/// refresh) loop against any true objective.
pub fn surrogate_minimize<O: Objective + ?Sized>(
    objective: &O,
    bounds: &Bounds,
    config: &SurrogateLoopConfig,
) -> Result<SurrogateOutcome, SurrogateError> {
    config.validate()?;
    let mut rng = rng_from_seed(config.seed);

    let design = sample_design(bounds, config.n_initial_samples, &mut rng);
    let costs = evaluate_batch(objective, &design, |i| format!("design point {i}"))?;
    let mut evaluations = design.len();

    let mut model = SurrogateModel::new(bounds.clone(), config.hidden_units, &costs, &mut rng);
    model.points = design;
    model.costs = costs;

    let (mut best_params, mut best_cost) = model
        .points
        .iter()
        .zip(&model.costs)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(p, &c)| (p.clone(), c))
        .expect("at least one design point");
    let mut history = vec![best_cost];

    model.train(config.initial_training_cycles, 0)?;

    for refinement in 1..=config.n_refinements {
        let inner = GaConfig {
            seed: config.inner.seed.wrapping_add(config.seed).wrapping_add(refinement as u64),
            ..config.inner.clone()
        };
        let candidate = ga_minimize(&model, bounds, &inner)?.best_params;
        let cost = crate::optimize::checked_eval(objective, &candidate, || {
            format!("surrogate optimum at refinement {refinement}")
        })?;
        evaluations += 1;
        if cost < best_cost {
            best_cost = cost;
            best_params.clone_from(&candidate);
        }
        history.push(best_cost);
        model.points.push(candidate);
        model.costs.push(cost);
        model.train(config.refresh_training_cycles, refinement)?;
    }

    Ok(SurrogateOutcome {
        run: OptimizerRun {
            best_params,
            best_cost,
            history,
            evaluations,
            seed: config.seed,
        },
        model,
    })
}

/// The surrogate pipeline on an FE updating problem.
pub fn surrogate_optimize(
    problem: &UpdatingProblem,
    config: &SurrogateLoopConfig,
) -> Result<SurrogateOutcome, SurrogateError> {
    surrogate_minimize(problem, problem.bounds(), config)
}

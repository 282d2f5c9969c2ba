use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_bounds_dim, evaluate_batch, rng_from_seed, Objective, OptimizeError, OptimizerRun};
use crate::bounds::Bounds;

/// Real-coded genetic algorithm settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    /// Evaluated generations, the random initial population included.
    pub generations: usize,
    /// Probability of selecting the best-ranked individual.
    pub selection_q: f64,
    /// Probability that a selected pair undergoes arithmetic crossover.
    pub crossover_rate: f64,
    /// Probability that an offspring undergoes non-uniform mutation.
    pub mutation_rate: f64,
    /// Non-uniformity exponent `b` of the mutation step.
    pub mutation_shape: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 600,
            generations: 100,
            selection_q: 0.08,
            crossover_rate: 0.8,
            mutation_rate: 0.3,
            mutation_shape: 3.0,
            seed: 0,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |message: &str| {
            Err(OptimizeError::Config {
                algorithm: "ga",
                message: message.into(),
            })
        };
        if self.population_size < 2 {
            return bad("population_size must be >= 2");
        }
        if self.generations < 1 {
            return bad("generations must be >= 1");
        }
        if !(self.selection_q > 0.0 && self.selection_q < 1.0) {
            return bad("selection_q must lie in (0, 1)");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) || !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("crossover_rate and mutation_rate must lie in [0, 1]");
        }
        if !(self.mutation_shape >= 0.0 && self.mutation_shape.is_finite()) {
            return bad("mutation_shape must be finite and >= 0");
        }
        Ok(())
    }
}

/// Rank probabilities `q' (1 − q)^r` with `q' = q / (1 − (1 − q)^P)`.
pub fn normalized_geometric_pmf(population: usize, q: f64) -> Vec<f64> {
    let norm = q / (1.0 - (1.0 - q).powi(population as i32));
    (0..population)
        .map(|r| norm * (1.0 - q).powi(r as i32))
        .collect()
}

/// Draws a 0-based rank from the normalized geometric distribution by
/// inverting its cumulative distribution.
pub fn normalized_geometric_select<R: Rng + ?Sized>(population: usize, q: f64, rng: &mut R) -> usize {
    if population <= 1 {
        return 0;
    }
    let total = 1.0 - (1.0 - q).powi(population as i32);
    let u: f64 = rng.random();
    let r = ((1.0 - u * total).ln() / (1.0 - q).ln()).floor();
    (r.max(0.0) as usize).min(population - 1)
}

/// Interpolates `a·p1 + (1 − a)·p2` and `(1 − a)·p1 + a·p2`.
pub fn arithmetic_crossover_with(parent1: &[f64], parent2: &[f64], a: f64) -> (Vec<f64>, Vec<f64>) {
    let c1 = parent1
        .iter()
        .zip(parent2)
        .map(|(x, y)| a * x + (1.0 - a) * y)
        .collect();
    let c2 = parent1
        .iter()
        .zip(parent2)
        .map(|(x, y)| (1.0 - a) * x + a * y)
        .collect();
    (c1, c2)
}

pub fn arithmetic_crossover<R: Rng + ?Sized>(
    parent1: &[f64],
    parent2: &[f64],
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    arithmetic_crossover_with(parent1, parent2, rng.random())
}

/// Moves coordinate `index` toward its upper (`upward`) or lower bound by
/// `gap · (1 − u^((1 − g/G)^b))`.
#[allow(clippy::too_many_arguments)]
pub fn nonuniform_mutate_with(
    individual: &[f64],
    bounds: &Bounds,
    index: usize,
    upward: bool,
    u: f64,
    generation: usize,
    max_generations: usize,
    shape: f64,
) -> Vec<f64> {
    let mut out = individual.to_vec();
    let progress = if max_generations == 0 {
        1.0
    } else {
        (generation as f64 / max_generations as f64).min(1.0)
    };
    let factor = 1.0 - u.powf((1.0 - progress).powf(shape));
    let x = out[index];
    out[index] = if upward {
        x + (bounds.upper()[index] - x) * factor
    } else {
        x - (x - bounds.lower()[index]) * factor
    };
    out[index] = out[index].clamp(bounds.lower()[index], bounds.upper()[index]);
    out
}

pub fn nonuniform_mutate<R: Rng + ?Sized>(
    individual: &[f64],
    bounds: &Bounds,
    generation: usize,
    max_generations: usize,
    shape: f64,
    rng: &mut R,
) -> Vec<f64> {
    let index = rng.random_range(0..individual.len());
    let upward = rng.random::<bool>();
    let u = rng.random::<f64>();
    nonuniform_mutate_with(individual, bounds, index, upward, u, generation, max_generations, shape)
}

/// Evaluate → rank-select → crossover → mutate, keeping the best individual
/// unchanged in every generation.
pub fn ga_minimize<O: Objective + ?Sized>(
    objective: &O,
    bounds: &Bounds,
    config: &GaConfig,
) -> Result<OptimizerRun, OptimizeError> {
    config.validate()?;
    check_bounds_dim(bounds, "ga")?;
    let size = config.population_size;
    let mut rng = rng_from_seed(config.seed);

    let mut population: Vec<Vec<f64>> = (0..size).map(|_| bounds.sample_uniform(&mut rng)).collect();
    let mut costs = evaluate_batch(objective, &population, |i| format!("individual {i} of generation 0"))?;
    let mut evaluations = size;

    let mut best_params = Vec::new();
    let mut best_cost = f64::INFINITY;
    let mut history = Vec::with_capacity(config.generations);
    let mut record = |population: &[Vec<f64>], costs: &[f64], history: &mut Vec<f64>| {
        for (p, &c) in population.iter().zip(costs) {
            if c < best_cost {
                best_cost = c;
                best_params.clone_from(p);
            }
        }
        history.push(best_cost);
    };
    record(&population, &costs, &mut history);

    for generation in 1..config.generations {
        let mut ranked: Vec<usize> = (0..size).collect();
        ranked.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]));

        let mut next: Vec<Vec<f64>> = (0..size)
            .map(|_| {
                let r = normalized_geometric_select(size, config.selection_q, &mut rng);
                population[ranked[r]].clone()
            })
            .collect();

        for pair in next.chunks_exact_mut(2) {
            if rng.random::<f64>() < config.crossover_rate {
                let (c1, c2) = arithmetic_crossover(&pair[0], &pair[1], &mut rng);
                pair[0] = c1;
                pair[1] = c2;
            }
        }
        for individual in next.iter_mut() {
            if rng.random::<f64>() < config.mutation_rate {
                *individual = nonuniform_mutate(
                    individual,
                    bounds,
                    generation,
                    config.generations,
                    config.mutation_shape,
                    &mut rng,
                );
            }
        }
        next[0] = population[ranked[0]].clone();

        population = next;
        costs = evaluate_batch(objective, &population, |i| {
            format!("individual {i} of generation {generation}")
        })?;
        evaluations += size;
        record(&population, &costs, &mut history);
    }

    Ok(OptimizerRun {
        best_params,
        best_cost,
        history,
        evaluations,
        seed: config.seed,
    })
}

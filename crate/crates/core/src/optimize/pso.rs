use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_bounds_dim, evaluate_batch, rng_from_seed, Objective, OptimizeError, OptimizerRun};
use crate::bounds::Bounds;

/// Particle swarm settings. Defaults are conventional values, not tuned to
/// any particular problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub max_steps: usize,
    /// Weight of the previous velocity.
    pub inertia: f64,
    /// Pull toward the particle's own best position.
    pub cognitive: f64,
    /// Pull toward the swarm's best position.
    pub social: f64,
    /// Optional velocity cap per dimension, as a fraction of the bound width.
    pub v_max: Option<f64>,
    /// Draw `r1`, `r2` per dimension instead of once per particle and step.
    pub per_dimension_random: bool,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 50,
            max_steps: 100,
            inertia: 0.72,
            cognitive: 1.49,
            social: 1.49,
            v_max: None,
            per_dimension_random: false,
            seed: 0,
        }
    }
}

impl PsoConfig {
    fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |message: &str| {
            Err(OptimizeError::Config {
                algorithm: "pso",
                message: message.into(),
            })
        };
        if self.swarm_size < 2 {
            return bad("swarm_size must be >= 2");
        }
        if self.max_steps < 1 {
            return bad("max_steps must be >= 1");
        }
        if !(self.inertia >= 0.0 && self.cognitive >= 0.0 && self.social >= 0.0) {
            return bad("inertia, cognitive and social must be >= 0");
        }
        if let Some(v) = self.v_max {
            if !(v > 0.0 && v.is_finite()) {
                return bad("v_max must be finite and > 0");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest: Vec<f64>,
    pub pbest_cost: f64,
}

/// Global-best particle swarm minimization.
///
/// Each step moves every particle with
/// `v ← w·v + c₁r₁(pbest − p) + c₂r₂(gbest − p)`, `p ← p + v`, projects the
/// position onto the bounds and evaluates the swarm.
pub fn pso_minimize<O: Objective + ?Sized>(
    objective: &O,
    bounds: &Bounds,
    config: &PsoConfig,
) -> Result<OptimizerRun, OptimizeError> {
    pso_minimize_observed(objective, bounds, config, |_, _, _| {})
}

/// Like [`pso_minimize`], calling `observer(step, particles, gbest_cost)`
/// after initialization (step 0) and after every step.
pub fn pso_minimize_observed<O, F>(
    objective: &O,
    bounds: &Bounds,
    config: &PsoConfig,
    mut observer: F,
) -> Result<OptimizerRun, OptimizeError>
where
    O: Objective + ?Sized,
    F: FnMut(usize, &[Particle], f64),
{
    config.validate()?;
    check_bounds_dim(bounds, "pso")?;
    let dim = bounds.dim();
    let mut rng = rng_from_seed(config.seed);

    let positions: Vec<Vec<f64>> = (0..config.swarm_size)
        .map(|_| bounds.sample_uniform(&mut rng))
        .collect();
    let velocities: Vec<Vec<f64>> = (0..config.swarm_size)
        .map(|_| {
            (0..dim)
                .map(|j| bounds.width(j) * (2.0 * rng.random::<f64>() - 1.0))
                .collect()
        })
        .collect();
    let costs = evaluate_batch(objective, &positions, |i| format!("particle {i} at step 0"))?;
    let mut evaluations = positions.len();

    let mut swarm: Vec<Particle> = positions
        .into_iter()
        .zip(velocities)
        .zip(costs)
        .map(|((position, velocity), cost)| Particle {
            pbest: position.clone(),
            position,
            velocity,
            pbest_cost: cost,
        })
        .collect();

    let mut g = 0;
    for (i, p) in swarm.iter().enumerate() {
        if p.pbest_cost < swarm[g].pbest_cost {
            g = i;
        }
    }
    let mut gbest = swarm[g].pbest.clone();
    let mut gbest_cost = swarm[g].pbest_cost;
    let mut history = Vec::with_capacity(config.max_steps + 1);
    history.push(gbest_cost);
    observer(0, &swarm, gbest_cost);

    let v_cap: Option<Vec<f64>> = config
        .v_max
        .map(|f| (0..dim).map(|j| f * bounds.width(j)).collect());

    for step in 1..=config.max_steps {
        for particle in swarm.iter_mut() {
            let (mut r1, mut r2) = (rng.random::<f64>(), rng.random::<f64>());
            for j in 0..dim {
                if config.per_dimension_random && j > 0 {
                    r1 = rng.random();
                    r2 = rng.random();
                }
                let x = particle.position[j];
                let mut v = config.inertia * particle.velocity[j]
                    + config.cognitive * r1 * (particle.pbest[j] - x)
                    + config.social * r2 * (gbest[j] - x);
                if let Some(cap) = &v_cap {
                    v = v.clamp(-cap[j], cap[j]);
                }
                particle.velocity[j] = v;
                particle.position[j] = x + v;
            }
            bounds.clip_in_place(&mut particle.position);
        }

        let positions: Vec<Vec<f64>> = swarm.iter().map(|p| p.position.clone()).collect();
        let costs = evaluate_batch(objective, &positions, |i| format!("particle {i} at step {step}"))?;
        evaluations += positions.len();

        for (particle, cost) in swarm.iter_mut().zip(costs) {
            if cost < particle.pbest_cost {
                particle.pbest_cost = cost;
                particle.pbest.clone_from(&particle.position);
            }
            if cost < gbest_cost {
                gbest_cost = cost;
                gbest.clone_from(&particle.position);
            }
        }
        history.push(gbest_cost);
        observer(step, &swarm, gbest_cost);
    }

    Ok(OptimizerRun {
        best_params: gbest,
        best_cost: gbest_cost,
        history,
        evaluations,
        seed: config.seed,
    })
}

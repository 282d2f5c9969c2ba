use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{check_bounds_dim, checked_eval, rng_from_seed, Objective, OptimizeError, OptimizerRun};
use crate::bounds::Bounds;

/// Simulated annealing settings.
///
/// The temperature is held for `schedule_scale × dim` proposals per stage and
/// then multiplied by `cooling`; a run is frozen once the temperature falls
/// to `frozen_ratio × T₀`. With the defaults and 12 parameters a run costs
/// 50 temperature samples + 132 stages × 48 proposals + 1 = 6387 evaluations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaConfig {
    /// Starting temperature in cost units. `None` uses the standard deviation
    /// of the cost over `temperature_samples` uniform random points.
    pub initial_temperature: Option<f64>,
    pub temperature_samples: usize,
    /// Geometric cooling factor per stage, in (0, 1).
    pub cooling: f64,
    /// Stage-length multiplier: proposals per temperature = scale × dimension.
    pub schedule_scale: usize,
    /// Final temperature as a fraction of the starting one.
    pub frozen_ratio: f64,
    /// Independent annealing runs; the best result over all runs is kept.
    pub n_runs: usize,
    /// Gaussian proposal standard deviation as a fraction of each bound width.
    pub step_scale: f64,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            initial_temperature: None,
            temperature_samples: 50,
            cooling: 0.9,
            schedule_scale: 4,
            frozen_ratio: 1e-6,
            n_runs: 3,
            step_scale: 0.05,
            seed: 0,
        }
    }
}

impl SaConfig {
    fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |message: &str| {
            Err(OptimizeError::Config {
                algorithm: "sa",
                message: message.into(),
            })
        };
        if let Some(t) = self.initial_temperature {
            if !(t > 0.0 && t.is_finite()) {
                return bad("initial_temperature must be finite and > 0");
            }
        } else if self.temperature_samples < 2 {
            return bad("temperature_samples must be >= 2");
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return bad("cooling must lie in (0, 1)");
        }
        if !(self.frozen_ratio > 0.0 && self.frozen_ratio < 1.0) {
            return bad("frozen_ratio must lie in (0, 1)");
        }
        if self.schedule_scale < 1 || self.n_runs < 1 {
            return bad("schedule_scale and n_runs must be >= 1");
        }
        if !(self.step_scale > 0.0 && self.step_scale.is_finite()) {
            return bad("step_scale must be finite and > 0");
        }
        Ok(())
    }

    /// Number of temperature stages before the frozen state.
    pub fn stages(&self) -> usize {
        (self.frozen_ratio.ln() / self.cooling.ln()).ceil() as usize
    }
}

/// Metropolis rule: improving moves are always accepted, a worsening move by
/// `delta` is accepted when `u < exp(−delta / T)` for `u ~ U(0, 1)`.
pub fn metropolis_accept(delta: f64, temperature: f64, u: f64) -> bool {
    delta < 0.0 || u < (-delta / temperature).exp()
}

pub fn sa_minimize<O: Objective + ?Sized>(
    objective: &O,
    bounds: &Bounds,
    config: &SaConfig,
) -> Result<OptimizerRun, OptimizeError> {
    config.validate()?;
    check_bounds_dim(bounds, "sa")?;
    let dim = bounds.dim();
    let mut evaluations = 0;

    let t0 = match config.initial_temperature {
        Some(t) => t,
        None => {
            let mut rng = rng_from_seed(config.seed);
            let mut costs = Vec::with_capacity(config.temperature_samples);
            for i in 0..config.temperature_samples {
                let x = bounds.sample_uniform(&mut rng);
                costs.push(checked_eval(objective, &x, || {
                    format!("temperature sample {i}")
                })?);
            }
            evaluations += costs.len();
            let mean = costs.iter().sum::<f64>() / costs.len() as f64;
            let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (costs.len() - 1) as f64;
            let sd = var.sqrt();
            if sd > 0.0 {
                sd
            } else {
                1.0
            }
        }
    };

    let stage_len = config.schedule_scale * dim;
    let stages = config.stages();
    let sigma: Vec<f64> = (0..dim).map(|j| config.step_scale * bounds.width(j)).collect();

    let mut best_params = Vec::new();
    let mut best_cost = f64::INFINITY;
    let mut history = Vec::with_capacity(config.n_runs * (stages + 1));

    for run in 0..config.n_runs {
        let mut rng = rng_from_seed(config.seed);
        rng.set_stream(run as u64 + 1);

        let mut current = bounds.sample_uniform(&mut rng);
        let mut current_cost = checked_eval(objective, &current, || format!("run {run} start"))?;
        evaluations += 1;
        if current_cost < best_cost {
            best_cost = current_cost;
            best_params.clone_from(&current);
        }
        history.push(best_cost);

        let mut temperature = t0;
        let mut candidate = vec![0.0; dim];
        for stage in 0..stages {
            for _ in 0..stage_len {
                for j in 0..dim {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    candidate[j] = current[j] + sigma[j] * z;
                }
                bounds.clip_in_place(&mut candidate);
                let cost = checked_eval(objective, &candidate, || {
                    format!("run {run} stage {stage}")
                })?;
                evaluations += 1;
                let u: f64 = rng.random();
                if metropolis_accept(cost - current_cost, temperature, u) {
                    current.copy_from_slice(&candidate);
                    current_cost = cost;
                    if cost < best_cost {
                        best_cost = cost;
                        best_params.clone_from(&current);
                    }
                }
            }
            history.push(best_cost);
            temperature *= config.cooling;
        }
    }

    Ok(OptimizerRun {
        best_params,
        best_cost,
        history,
        evaluations,
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::test_support::{assert_non_increasing, sphere};

    #[test]
    fn improving_moves_always_accepted() {
        for t in [1e-12, 1e-3, 1.0, 1e6] {
            for u in [0.0, 0.5, 0.999_999] {
                assert!(metropolis_accept(-1e-9, t, u));
                assert!(metropolis_accept(-5.0, t, u));
            }
        }
    }

    #[test]
    fn frozen_temperature_rejects_worsening_moves() {
        let mut rng = rng_from_seed(1);
        let accepted = (0..10_000)
            .filter(|_| metropolis_accept(1e-3, 1e-12, rng.random()))
            .count();
        assert_eq!(accepted, 0);
    }

    #[test]
    fn acceptance_rate_at_unit_ratio_is_inverse_e() {
        let mut rng = rng_from_seed(2);
        let n = 100_000;
        let accepted = (0..n)
            .filter(|_| metropolis_accept(0.7, 0.7, rng.random()))
            .count();
        let rate = accepted as f64 / n as f64;
        assert!((rate - (-1.0f64).exp()).abs() < 0.02, "rate {rate}");
    }

    #[test]
    fn default_schedule_evaluation_count() {
        let cfg = SaConfig {
            n_runs: 1,
            ..Default::default()
        };
        assert_eq!(cfg.stages(), 132);
        let b = Bounds::uniform(12, -1.0, 1.0).unwrap();
        let run = sa_minimize(&sphere, &b, &cfg).unwrap();
        assert_eq!(run.evaluations, 50 + 132 * 48 + 1);
    }

    #[test]
    fn sphere_improves_and_history_monotone() {
        let b = Bounds::uniform(4, -1.0, 1.0).unwrap();
        let cfg = SaConfig {
            seed: 4,
            ..Default::default()
        };
        let run = sa_minimize(&sphere, &b, &cfg).unwrap();
        assert_non_increasing(&run.history);
        assert_eq!(run.best_cost, *run.history.last().unwrap());
        assert!(run.best_cost < 1e-2, "best {}", run.best_cost);
        assert!(b.contains(&run.best_params));
    }

    #[test]
    fn proposals_stay_in_bounds() {
        let b = Bounds::new(vec![0.0, 5.0], vec![0.1, 5.5]).unwrap();
        let guarded = |x: &[f64]| if b.contains(x) { sphere(x) } else { f64::NAN };
        let cfg = SaConfig {
            step_scale: 3.0,
            n_runs: 1,
            ..Default::default()
        };
        sa_minimize(&guarded, &b, &cfg).unwrap();
    }

    #[test]
    fn deterministic_per_seed() {
        let b = Bounds::uniform(3, -2.0, 2.0).unwrap();
        let cfg = SaConfig {
            seed: 99,
            frozen_ratio: 1e-2,
            ..Default::default()
        };
        assert_eq!(sa_minimize(&sphere, &b, &cfg).unwrap(), sa_minimize(&sphere, &b, &cfg).unwrap());
    }

    #[test]
    fn non_finite_objective_aborts() {
        let b = Bounds::uniform(2, -1.0, 1.0).unwrap();
        let bad = |_: &[f64]| f64::INFINITY;
        let cfg = SaConfig {
            initial_temperature: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(
            sa_minimize(&bad, &b, &cfg),
            Err(OptimizeError::NonFinite { .. })
        ));
    }

    #[test]
    fn invalid_configs() {
        let b = Bounds::uniform(2, -1.0, 1.0).unwrap();
        for cfg in [
            SaConfig { cooling: 1.0, ..Default::default() },
            SaConfig { n_runs: 0, ..Default::default() },
            SaConfig { initial_temperature: Some(0.0), ..Default::default() },
        ] {
            assert!(matches!(sa_minimize(&sphere, &b, &cfg), Err(OptimizeError::Config { .. })));
        }
    }
}

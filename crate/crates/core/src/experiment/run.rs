use std::time::Instant;

use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};

use super::config::{ExperimentConfig, OptimizerChoice, TargetSpec, TargetsFile};
use super::report::{ComacReport, Comparison, ComparisonRow, FrequencyRow, ModulusRow, RunReport};
use super::ExperimentError;
use crate::bounds::Bounds;
use crate::fe::StructureModel;
use crate::modal::{average_comac, comac, select_measured, solve_modes};
use crate::optimize::{ga_minimize, pso_minimize, rng_from_seed, sa_minimize};
use crate::surrogate::surrogate_optimize;
use crate::updating::{frequency_error_table, UpdatingProblem};

/// Target data after files are read and synthetic targets generated.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedTargets {
    pub frequencies: Vec<f64>,
    /// Measured-DOF × mode matrix, when available.
    pub mode_shapes: Option<DMatrix<f64>>,
    /// Moduli that generated synthetic targets.
    pub truth_moduli: Option<Vec<f64>>,
}

fn field(field: &str, message: impl Into<String>) -> ExperimentError {
    ExperimentError::Field {
        field: field.into(),
        message: message.into(),
    }
}

fn shapes_from_rows(rows: &[Vec<f64>], n_measured: usize, n_modes: usize) -> Result<DMatrix<f64>, ExperimentError> {
    if rows.len() != n_measured || rows.iter().any(|r| r.len() < n_modes) {
        return Err(field(
            "targets.mode_shapes",
            format!("need {n_measured} rows (measured dofs) with at least {n_modes} columns"),
        ));
    }
    Ok(DMatrix::from_fn(n_measured, n_modes, |i, j| rows[i][j]))
}

fn resolve_targets(config: &ExperimentConfig, model: &StructureModel) -> Result<ResolvedTargets, ExperimentError> {
    let n_measured = model.measured_dofs().len();
    let (frequencies, shape_rows) = match &config.targets {
        TargetSpec::File { path } => {
            let file = TargetsFile::load(path)?;
            (file.frequencies, file.mode_shapes)
        }
        TargetSpec::Inline {
            frequencies,
            mode_shapes,
        } => (frequencies.clone(), mode_shapes.clone()),
        TargetSpec::Synthetic {
            moduli,
            scale,
            noise_percent,
        } => return synthetic_targets(config, model, moduli.as_deref(), scale, *noise_percent),
    };
    let n_modes = config.n_modes.unwrap_or(frequencies.len());
    if n_modes > frequencies.len() {
        return Err(field(
            "n_modes",
            format!("{n_modes} modes requested but only {} target frequencies", frequencies.len()),
        ));
    }
    let mode_shapes = shape_rows
        .map(|rows| shapes_from_rows(&rows, n_measured, n_modes))
        .transpose()?;
    Ok(ResolvedTargets {
        frequencies: frequencies[..n_modes].to_vec(),
        mode_shapes,
        truth_moduli: None,
    })
}

fn synthetic_targets(
    config: &ExperimentConfig,
    model: &StructureModel,
    moduli: Option<&[f64]>,
    scale: &[super::ElementScale],
    noise_percent: f64,
) -> Result<ResolvedTargets, ExperimentError> {
    let mut truth = match moduli {
        Some(m) if m.len() != model.n_elements() => {
            return Err(field(
                "targets.moduli",
                format!("expected {} values, got {}", model.n_elements(), m.len()),
            ))
        }
        Some(m) => m.to_vec(),
        None => model.moduli(),
    };
    for s in scale {
        let index = model
            .elements()
            .iter()
            .position(|e| e.id == s.element)
            .ok_or_else(|| field("targets.scale", format!("no element with id {}", s.element)))?;
        truth[index] *= s.factor;
    }
    let n_modes = config.n_modes.unwrap_or(5);
    let solution = solve_modes(&model.apply_parameters(&truth)?.assemble()?, n_modes)?;
    let mut frequencies = solution.frequencies.clone();
    if noise_percent > 0.0 {
        let mut rng = rng_from_seed(config.seed);
        // Separate stream so noise draws never alias optimizer draws.
        rng.set_stream(u64::MAX);
        let normal = Normal::new(0.0, noise_percent / 100.0).expect("validated noise level");
        for f in &mut frequencies {
            *f *= 1.0 + normal.sample(&mut rng);
        }
    }
    let mode_shapes = if model.measured_dofs().is_empty() {
        None
    } else {
        Some(select_measured(&solution, model.measured_dofs())?)
    };
    Ok(ResolvedTargets {
        frequencies,
        mode_shapes,
        truth_moduli: Some(truth),
    })
}

/// Builds the updating problem a config describes.
pub fn build_problem(config: &ExperimentConfig) -> Result<(UpdatingProblem, ResolvedTargets), ExperimentError> {
    config.validate()?;
    let model = config.structure_model()?;
    let targets = resolve_targets(config, &model)?;
    let bounds = Bounds::uniform(model.n_elements(), config.bounds.lower, config.bounds.upper)
        .map_err(|e| field("bounds", e.to_string()))?;
    let problem = UpdatingProblem::with_weight_rule(model, targets.frequencies.clone(), config.weights, bounds)?;
    Ok((problem, targets))
}

/// Runs the config's optimizer on its problem and builds the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport, ExperimentError> {
    let (problem, targets) = build_problem(config)?;
    run_problem(config, &problem, &targets)
}

/// [`run_experiment`] on an already-built problem.
pub fn run_problem(
    config: &ExperimentConfig,
    problem: &UpdatingProblem,
    targets: &ResolvedTargets,
) -> Result<RunReport, ExperimentError> {
    let start = Instant::now();
    let choice = config.optimizer();
    let name = choice.name();
    let wrap = |source| ExperimentError::Optimize {
        optimizer: name,
        source,
    };
    let bounds = problem.bounds();
    let (run, surrogate) = match &choice {
        OptimizerChoice::Pso(c) => (pso_minimize(problem, bounds, c).map_err(wrap)?, None),
        OptimizerChoice::Sa(c) => (sa_minimize(problem, bounds, c).map_err(wrap)?, None),
        OptimizerChoice::Ga(c) => (ga_minimize(problem, bounds, c).map_err(wrap)?, None),
        OptimizerChoice::Surrogate(c) => {
            let out = surrogate_optimize(problem, c)?;
            (out.run, Some(out.model))
        }
    };

    let base = problem.base_model();
    let initial_moduli = base.moduli();
    let n_modes = problem.n_modes();
    let initial = problem.solve(&initial_moduli, n_modes)?;
    let updated = problem.solve(&run.best_params, n_modes)?;
    let initial_cost = problem.evaluate_cost(&initial_moduli)?.cost;
    let target_f = problem.target_frequencies();
    let initial_errors = frequency_error_table(target_f, &initial.frequencies);
    let updated_errors = frequency_error_table(target_f, &updated.frequencies);

    let frequencies = (0..n_modes)
        .map(|i| FrequencyRow {
            mode: i + 1,
            target_hz: target_f[i],
            initial_hz: initial.frequencies[i],
            updated_hz: updated.frequencies[i],
            initial_error_percent: initial_errors.per_mode_percent[i],
            updated_error_percent: updated_errors.per_mode_percent[i],
        })
        .collect();

    let moduli = base
        .elements()
        .iter()
        .enumerate()
        .map(|(i, e)| ModulusRow {
            element: e.id,
            initial_pa: initial_moduli[i],
            updated_pa: run.best_params[i],
            truth_pa: targets.truth_moduli.as_ref().map(|t| t[i]),
        })
        .collect();

    let comac_report = match &targets.mode_shapes {
        Some(target_shapes) => {
            let dofs = base.measured_dofs();
            let c_initial = comac(&select_measured(&initial, dofs)?, target_shapes)?;
            let c_updated = comac(&select_measured(&updated, dofs)?, target_shapes)?;
            Some(ComacReport {
                measured_dofs: dofs.to_vec(),
                initial_average: average_comac(&c_initial)?,
                updated_average: average_comac(&c_updated)?,
                initial: c_initial,
                updated: c_updated,
            })
        }
        None => None,
    };

    Ok(RunReport {
        name: config.name.clone(),
        optimizer: name.to_string(),
        seed: config.seed,
        n_modes,
        weight_rule: config.weights,
        weights: problem.weights().to_vec(),
        frequencies,
        initial_mean_error_percent: initial_errors.mean_percent,
        updated_mean_error_percent: updated_errors.mean_percent,
        moduli,
        comac: comac_report,
        initial_cost,
        best_cost: run.best_cost,
        evaluations: run.evaluations,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        history: run.history,
        config: config.clone(),
        surrogate,
    })
}

/// Runs every config on what must be one shared updating problem.
pub fn compare_optimizers(configs: &[ExperimentConfig]) -> Result<Comparison, ExperimentError> {
    if configs.len() < 2 {
        return Err(ExperimentError::TooFewConfigs(configs.len()));
    }
    let (problem, targets) = build_problem(&configs[0])?;
    for (index, config) in configs.iter().enumerate().skip(1) {
        let (p, t) = build_problem(config)?;
        if p != problem || t != targets {
            return Err(ExperimentError::ProblemMismatch { index });
        }
    }
    let runs = configs
        .iter()
        .map(|c| run_problem(c, &problem, &targets))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = runs.iter().map(ComparisonRow::from_report).collect();
    Ok(Comparison { rows, runs })
}

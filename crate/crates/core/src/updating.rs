//! The model-updating problem: match the model's lowest elastic natural
//! frequencies to target frequencies by tuning per-element moduli.
//!
//! The cost is the weighted sum of squared relative frequency errors,
//! `Σᵢ γᵢ ((fᵢᵐ − fᵢᶜ) / fᵢᵐ)²`, with model mode `i` paired to target `i` by
//! ascending frequency.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{Bounds, BoundsError};
use crate::fe::{FeError, StructureModel};
use crate::modal::{solve_modes, ModalError, ModalSolution};
use crate::optimize::{Objective, ObjectiveError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UpdatingError {
    #[error(transparent)]
    Fe(#[from] FeError),
    #[error(transparent)]
    Modal(#[from] ModalError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("target frequencies must be non-empty, positive and strictly ascending")]
    Targets,
    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("target frequency {index} is zero")]
    ZeroTarget { index: usize },
    #[error("weights must be finite and non-negative")]
    NegativeWeight,
    #[error("all weights are zero: the objective is identically zero")]
    AllZeroWeights,
}

/// How mode weights γ are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightRule {
    /// γᵢ = squared relative error of the initial model in mode i.
    PaperRule,
    /// γᵢ = 1.
    Uniform,
}

/// γᵢ = ((fᵢᵐ − fᵢ⁰) / fᵢᵐ)².
pub fn default_weights(targets: &[f64], initial: &[f64]) -> Result<Vec<f64>, UpdatingError> {
    if targets.len() != initial.len() {
        return Err(UpdatingError::Length {
            what: "initial frequencies",
            expected: targets.len(),
            got: initial.len(),
        });
    }
    targets
        .iter()
        .zip(initial)
        .enumerate()
        .map(|(index, (&fm, &f0))| {
            if fm == 0.0 {
                return Err(UpdatingError::ZeroTarget { index });
            }
            Ok(((fm - f0) / fm).powi(2))
        })
        .collect()
}

/// Weighted sum of squared relative errors.
pub fn weighted_cost(targets: &[f64], weights: &[f64], calculated: &[f64]) -> f64 {
    targets
        .iter()
        .zip(weights)
        .zip(calculated)
        .map(|((fm, g), fc)| g * ((fm - fc) / fm).powi(2))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdatingProblem {
    base_model: StructureModel,
    target_frequencies: Vec<f64>,
    weights: Vec<f64>,
    bounds: Bounds,
}

impl UpdatingProblem {
    pub fn new(
        base_model: StructureModel,
        target_frequencies: Vec<f64>,
        weights: Vec<f64>,
        bounds: Bounds,
    ) -> Result<Self, UpdatingError> {
        if target_frequencies.is_empty()
            || target_frequencies.iter().any(|f| !(f.is_finite() && *f > 0.0))
            || target_frequencies.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(UpdatingError::Targets);
        }
        if weights.len() != target_frequencies.len() {
            return Err(UpdatingError::Length {
                what: "weights",
                expected: target_frequencies.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(UpdatingError::NegativeWeight);
        }
        if weights.iter().all(|&g| g == 0.0) {
            return Err(UpdatingError::AllZeroWeights);
        }
        if bounds.dim() != base_model.n_elements() {
            return Err(UpdatingError::Length {
                what: "bounds",
                expected: base_model.n_elements(),
                got: bounds.dim(),
            });
        }
        Ok(Self {
            base_model,
            target_frequencies,
            weights,
            bounds,
        })
    }

    /// Builds the problem with weights chosen by `rule`; the paper rule
    /// compares the targets with the base model's own frequencies.
    pub fn with_weight_rule(
        base_model: StructureModel,
        target_frequencies: Vec<f64>,
        rule: WeightRule,
        bounds: Bounds,
    ) -> Result<Self, UpdatingError> {
        let weights = match rule {
            WeightRule::Uniform => vec![1.0; target_frequencies.len()],
            WeightRule::PaperRule => {
                let initial = model_frequencies(&base_model, target_frequencies.len())?;
                default_weights(&target_frequencies, &initial)?
            }
        };
        Self::new(base_model, target_frequencies, weights, bounds)
    }

    pub fn base_model(&self) -> &StructureModel {
        &self.base_model
    }

    pub fn target_frequencies(&self) -> &[f64] {
        &self.target_frequencies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn n_modes(&self) -> usize {
        self.target_frequencies.len()
    }

    /// Modal solution of the base model with `params` applied.
    pub fn solve(&self, params: &[f64], n_modes: usize) -> Result<ModalSolution, UpdatingError> {
        let model = self.base_model.apply_parameters(params)?;
        Ok(solve_modes(&model.assemble()?, n_modes)?)
    }

    /// Runs FE assembly and the eigen-solve for `params` and scores the
    /// first `n_modes` frequencies. Parameters are not clipped.
    pub fn evaluate_cost(&self, params: &[f64]) -> Result<CostEvaluation, UpdatingError> {
        let frequencies = self.solve(params, self.n_modes())?.frequencies;
        let cost = weighted_cost(&self.target_frequencies, &self.weights, &frequencies);
        Ok(CostEvaluation {
            params: params.to_vec(),
            frequencies,
            cost,
        })
    }

    pub fn frequency_error_table(&self, evaluation: &CostEvaluation) -> FrequencyErrorTable {
        frequency_error_table(&self.target_frequencies, &evaluation.frequencies)
    }
}

impl Objective for UpdatingProblem {
    fn evaluate(&self, params: &[f64]) -> Result<f64, ObjectiveError> {
        Ok(self.evaluate_cost(params)?.cost)
    }
}

/// Lowest `n_modes` elastic frequencies of a model.
pub fn model_frequencies(model: &StructureModel, n_modes: usize) -> Result<Vec<f64>, UpdatingError> {
    Ok(solve_modes(&model.assemble()?, n_modes)?.frequencies)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostEvaluation {
    pub params: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub cost: f64,
}

/// Per-mode absolute relative errors in percent and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyErrorTable {
    pub per_mode_percent: Vec<f64>,
    pub mean_percent: f64,
}

pub fn frequency_error_table(targets: &[f64], calculated: &[f64]) -> FrequencyErrorTable {
    let per_mode_percent: Vec<f64> = targets
        .iter()
        .zip(calculated)
        .map(|(fm, fc)| 100.0 * (fm - fc).abs() / fm)
        .collect();
    let mean_percent = if per_mode_percent.is_empty() {
        0.0
    } else {
        per_mode_percent.iter().sum::<f64>() / per_mode_percent.len() as f64
    };
    FrequencyErrorTable {
        per_mode_percent,
        mean_percent,
    }
}

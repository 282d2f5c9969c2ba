//! Experiment configuration files (TOML, `schema_version = 1`).
//!
//! ```toml
//! schema_version = 1
//! name = "synthetic-recovery"
//! seed = 0                 # master seed; overrides any optimizer-block seed
//! n_modes = 5              # matched elastic modes
//! weights = "uniform"      # or "paper-rule"
//!
//! [structure]              # omit for the bundled H-structure
//! path = "h_structure.toml"
//!
//! [bounds]                 # per-element modulus limits, Pa
//! lower = 6.0e10
//! upper = 8.0e10
//!
//! [targets]                # "file", "inline" or "synthetic"
//! source = "synthetic"
//! scale = [{ element = 3, factor = 0.85 }]   # element ids from the structure file
//! noise_percent = 0.0      # Gaussian, std as % of each frequency
//!
//! [ga]                     # exactly one of [pso], [sa], [ga], [surrogate]
//! population_size = 60
//!
//! [output]
//! dir = "out/synthetic"
//! ```
//!
//! Relative paths are resolved against the directory holding the config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::fe::{StructureConfig, StructureModel};
use crate::optimize::{GaConfig, PsoConfig, SaConfig};
use crate::surrogate::SurrogateLoopConfig;
use crate::updating::WeightRule;

pub const EXPERIMENT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the number of target frequencies.
    #[serde(default)]
    pub n_modes: Option<usize>,
    #[serde(default = "default_weight_rule")]
    pub weights: WeightRule,
    #[serde(default)]
    pub structure: StructureSource,
    #[serde(default)]
    pub bounds: BoundsSpec,
    pub targets: TargetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pso: Option<PsoConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sa: Option<SaConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga: Option<GaConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surrogate: Option<SurrogateLoopConfig>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_weight_rule() -> WeightRule {
    WeightRule::PaperRule
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSource {
    /// Structure TOML; the bundled H-structure when absent.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub lower: f64,
    pub upper: f64,
}

impl Default for BoundsSpec {
    fn default() -> Self {
        Self {
            lower: 6.0e10,
            upper: 8.0e10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetSpec {
    /// A targets TOML with `frequencies` and optional `mode_shapes`.
    File { path: PathBuf },
    Inline {
        frequencies: Vec<f64>,
        /// One row per measured DOF, one column per mode.
        #[serde(default)]
        mode_shapes: Option<Vec<Vec<f64>>>,
    },
    /// Targets computed from the structure with altered moduli.
    Synthetic {
        /// Full true modulus vector; the structure's own moduli when absent.
        #[serde(default)]
        moduli: Option<Vec<f64>>,
        /// Multiplicative changes applied on top of `moduli`.
        #[serde(default)]
        scale: Vec<ElementScale>,
        #[serde(default)]
        noise_percent: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementScale {
    /// Element id as written in the structure file.
    pub element: usize,
    pub factor: f64,
}

/// Contents of a targets file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsFile {
    pub schema_version: u32,
    pub frequencies: Vec<f64>,
    #[serde(default)]
    pub mode_shapes: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

/// The optimizer block of a config, seed already applied.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerChoice {
    Pso(PsoConfig),
    Sa(SaConfig),
    Ga(GaConfig),
    Surrogate(SurrogateLoopConfig),
}

impl OptimizerChoice {
    pub fn name(&self) -> &'static str {
        match self {
            OptimizerChoice::Pso(_) => "pso",
            OptimizerChoice::Sa(_) => "sa",
            OptimizerChoice::Ga(_) => "ga",
            OptimizerChoice::Surrogate(_) => "surrogate",
        }
    }

    /// Default settings for an optimizer named `pso`, `sa`, `ga` or
    /// `surrogate`.
    pub fn default_for(name: &str) -> Option<Self> {
        Some(match name {
            "pso" => OptimizerChoice::Pso(PsoConfig::default()),
            "sa" => OptimizerChoice::Sa(SaConfig::default()),
            "ga" => OptimizerChoice::Ga(GaConfig::default()),
            "surrogate" => OptimizerChoice::Surrogate(SurrogateLoopConfig::default()),
            _ => return None,
        })
    }
}

fn field_error(field: &str, message: impl Into<String>) -> ExperimentError {
    ExperimentError::Field {
        field: field.to_string(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Parses and validates a config; relative paths are resolved against
    /// `base_dir` and must exist.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, ExperimentError> {
        let mut config: Self = toml::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
        config.resolve_paths(base_dir);
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.structure.path.as_mut() {
            resolve(p);
        }
        if let TargetSpec::File { path } = &mut self.targets {
            resolve(path);
        }
        if let Some(p) = self.output.dir.as_mut() {
            resolve(p);
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.schema_version != EXPERIMENT_SCHEMA_VERSION {
            return Err(field_error(
                "schema_version",
                format!("unsupported version {} (expected {EXPERIMENT_SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let blocks = [
            self.pso.is_some(),
            self.sa.is_some(),
            self.ga.is_some(),
            self.surrogate.is_some(),
        ];
        if blocks.iter().filter(|&&b| b).count() != 1 {
            return Err(field_error(
                "optimizer",
                "exactly one of [pso], [sa], [ga], [surrogate] is required",
            ));
        }
        if self.n_modes == Some(0) {
            return Err(field_error("n_modes", "must be >= 1"));
        }
        let b = self.bounds;
        if !(b.lower.is_finite() && b.upper.is_finite() && b.lower > 0.0 && b.lower < b.upper) {
            return Err(field_error("bounds", "need 0 < lower < upper, both finite"));
        }
        if let Some(p) = &self.structure.path {
            if !p.is_file() {
                return Err(field_error("structure.path", format!("{} does not exist", p.display())));
            }
        }
        match &self.targets {
            TargetSpec::File { path } if !path.is_file() => {
                return Err(field_error("targets.path", format!("{} does not exist", path.display())));
            }
            TargetSpec::Inline { frequencies, .. } if frequencies.is_empty() => {
                return Err(field_error("targets.frequencies", "must not be empty"));
            }
            TargetSpec::Synthetic {
                noise_percent, scale, ..
            } => {
                if !(noise_percent.is_finite() && *noise_percent >= 0.0) {
                    return Err(field_error("targets.noise_percent", "must be finite and >= 0"));
                }
                if scale.iter().any(|s| !(s.factor.is_finite() && s.factor > 0.0)) {
                    return Err(field_error("targets.scale", "factors must be finite and > 0"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The single optimizer block with the master seed applied.
    pub fn optimizer(&self) -> OptimizerChoice {
        let seed = self.seed;
        if let Some(c) = &self.pso {
            OptimizerChoice::Pso(PsoConfig { seed, ..c.clone() })
        } else if let Some(c) = &self.sa {
            OptimizerChoice::Sa(SaConfig { seed, ..c.clone() })
        } else if let Some(c) = &self.ga {
            OptimizerChoice::Ga(GaConfig { seed, ..c.clone() })
        } else {
            let c = self.surrogate.clone().unwrap_or_default();
            OptimizerChoice::Surrogate(SurrogateLoopConfig { seed, ..c })
        }
    }

    /// Replaces the optimizer block.
    pub fn with_optimizer(&self, choice: OptimizerChoice) -> Self {
        let mut out = Self {
            pso: None,
            sa: None,
            ga: None,
            surrogate: None,
            ..self.clone()
        };
        match choice {
            OptimizerChoice::Pso(c) => out.pso = Some(c),
            OptimizerChoice::Sa(c) => out.sa = Some(c),
            OptimizerChoice::Ga(c) => out.ga = Some(c),
            OptimizerChoice::Surrogate(c) => out.surrogate = Some(c),
        }
        out
    }

    pub fn structure_model(&self) -> Result<StructureModel, ExperimentError> {
        let config = match &self.structure.path {
            Some(p) => StructureConfig::load(p)?,
            None => StructureConfig::h_structure_default(),
        };
        Ok(config.build()?)
    }
}

impl TargetsFile {
    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let file: Self = toml::from_str(&text).map_err(|e| ExperimentError::Parse(format!("{}: {e}", path.display())))?;
        if file.schema_version != EXPERIMENT_SCHEMA_VERSION {
            return Err(field_error("targets.schema_version", format!("unsupported version {}", file.schema_version)));
        }
        Ok(file)
    }
}

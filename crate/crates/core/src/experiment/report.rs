//! Run reports and their on-disk form.
//!
//! `emit_report` writes into one directory:
//!
//! | file              | contents                                                     |
//! |-------------------|--------------------------------------------------------------|
//! | `frequencies.csv` | mode, target/initial/updated frequency (Hz), errors (%)      |
//! | `moduli.csv`      | element id, initial/updated/true modulus (Pa)                |
//! | `comac.csv`       | measured dof, initial and updated COMAC (only with shapes)   |
//! | `history.csv`     | step, best-so-far cost                                       |
//! | `summary.json`    | the full report, config echo and timing included             |
//! | `report.txt`      | human-readable tables                                        |
//!
//! Surrogate runs add `training_set.csv` and `training_log.csv`. The CSV
//! files contain no timing and are byte-identical across reruns with the
//! same config and seed.

use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::ExperimentError;
use crate::surrogate::SurrogateModel;
use crate::updating::WeightRule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub mode: usize,
    pub target_hz: f64,
    pub initial_hz: f64,
    pub updated_hz: f64,
    pub initial_error_percent: f64,
    pub updated_error_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusRow {
    pub element: usize,
    pub initial_pa: f64,
    pub updated_pa: f64,
    pub truth_pa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComacReport {
    pub measured_dofs: Vec<usize>,
    pub initial: Vec<f64>,
    pub updated: Vec<f64>,
    pub initial_average: f64,
    pub updated_average: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub name: String,
    pub optimizer: String,
    pub seed: u64,
    pub n_modes: usize,
    pub weight_rule: WeightRule,
    pub weights: Vec<f64>,
    pub frequencies: Vec<FrequencyRow>,
    pub initial_mean_error_percent: f64,
    pub updated_mean_error_percent: f64,
    pub moduli: Vec<ModulusRow>,
    /// Present when target mode shapes are known.
    pub comac: Option<ComacReport>,
    pub initial_cost: f64,
    pub best_cost: f64,
    /// True objective evaluations.
    pub evaluations: usize,
    pub wall_clock_seconds: f64,
    pub history: Vec<f64>,
    pub config: ExperimentConfig,
    #[serde(skip)]
    pub surrogate: Option<SurrogateModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub optimizer: String,
    pub seed: u64,
    pub initial_mean_error_percent: f64,
    pub updated_mean_error_percent: f64,
    pub initial_average_comac: Option<f64>,
    pub updated_average_comac: Option<f64>,
    pub best_cost: f64,
    pub evaluations: usize,
    pub wall_clock_seconds: f64,
}

impl ComparisonRow {
    pub fn from_report(r: &RunReport) -> Self {
        Self {
            label: if r.name.is_empty() {
                r.optimizer.clone()
            } else {
                r.name.clone()
            },
            optimizer: r.optimizer.clone(),
            seed: r.seed,
            initial_mean_error_percent: r.initial_mean_error_percent,
            updated_mean_error_percent: r.updated_mean_error_percent,
            initial_average_comac: r.comac.as_ref().map(|c| c.initial_average),
            updated_average_comac: r.comac.as_ref().map(|c| c.updated_average),
            best_cost: r.best_cost,
            evaluations: r.evaluations,
            wall_clock_seconds: r.wall_clock_seconds,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub runs: Vec<RunReport>,
}

fn out_err(path: &Path, e: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn create(path: &Path) -> Result<File, ExperimentError> {
    File::create(path).map_err(|e| out_err(path, e))
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row).map_err(|e| out_err(path, e))?;
    }
    w.flush().map_err(|e| out_err(path, e))
}

#[derive(Serialize)]
struct ComacCsvRow {
    dof: usize,
    initial: f64,
    updated: f64,
}

#[derive(Serialize)]
struct HistoryCsvRow {
    step: usize,
    best_cost: f64,
}

/// Writes a run's files into `dir` (created if needed); returns the paths.
pub fn emit_report(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|e| out_err(dir, e))?;
    let mut written = Vec::new();

    let path = dir.join("frequencies.csv");
    write_csv(&path, &report.frequencies)?;
    written.push(path);

    let path = dir.join("moduli.csv");
    write_csv(&path, &report.moduli)?;
    written.push(path);

    if let Some(c) = &report.comac {
        let path = dir.join("comac.csv");
        let rows = c
            .measured_dofs
            .iter()
            .zip(c.initial.iter().zip(&c.updated))
            .map(|(&dof, (&initial, &updated))| ComacCsvRow { dof, initial, updated });
        write_csv(&path, rows)?;
        written.push(path);
    }

    let path = dir.join("history.csv");
    let rows = report
        .history
        .iter()
        .enumerate()
        .map(|(step, &best_cost)| HistoryCsvRow { step, best_cost });
    write_csv(&path, rows)?;
    written.push(path);

    if let Some(model) = &report.surrogate {
        let path = dir.join("training_set.csv");
        model
            .write_training_set_csv(create(&path)?)
            .map_err(|e| out_err(&path, e))?;
        written.push(path);
        let path = dir.join("training_log.csv");
        model
            .write_training_log_csv(create(&path)?)
            .map_err(|e| out_err(&path, e))?;
        written.push(path);
    }

    let path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(report).map_err(|e| out_err(&path, e))?;
    std::fs::write(&path, json + "\n").map_err(|e| out_err(&path, e))?;
    written.push(path);

    let path = dir.join("report.txt");
    std::fs::write(&path, format_report(report)).map_err(|e| out_err(&path, e))?;
    written.push(path);

    Ok(written)
}

/// Writes `comparison.csv`, `comparison.txt` and one subdirectory per run.
pub fn emit_comparison(comparison: &Comparison, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|e| out_err(dir, e))?;
    let mut written = Vec::new();
    let path = dir.join("comparison.csv");
    // Timing varies between reruns; it is kept out of the CSV.
    let rows = comparison.rows.iter().map(|r| {
        (
            &r.label,
            &r.optimizer,
            r.seed,
            r.initial_mean_error_percent,
            r.updated_mean_error_percent,
            r.initial_average_comac,
            r.updated_average_comac,
            r.best_cost,
            r.evaluations,
        )
    });
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record([
        "label",
        "optimizer",
        "seed",
        "initial_mean_error_percent",
        "updated_mean_error_percent",
        "initial_average_comac",
        "updated_average_comac",
        "best_cost",
        "evaluations",
    ])
    .map_err(|e| out_err(&path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| out_err(&path, e))?;
    }
    w.flush().map_err(|e| out_err(&path, e))?;
    written.push(path);

    let path = dir.join("comparison.txt");
    std::fs::write(&path, format_comparison(comparison)).map_err(|e| out_err(&path, e))?;
    written.push(path);

    for (i, run) in comparison.runs.iter().enumerate() {
        written.extend(emit_report(run, &dir.join(format!("{i:02}-{}", run.optimizer)))?);
    }
    Ok(written)
}

/// Frequency, moduli and COMAC tables as plain text.
pub fn format_report(r: &RunReport) -> String {
    let mut s = String::new();
    let title = if r.name.is_empty() { "experiment" } else { &r.name };
    let _ = writeln!(s, "{title}: optimizer {}, seed {}, weights {:?}", r.optimizer, r.seed, r.weight_rule);
    let _ = writeln!(
        s,
        "evaluations {}, wall clock {:.2} s, cost {:.4e} -> {:.4e}\n",
        r.evaluations, r.wall_clock_seconds, r.initial_cost, r.best_cost
    );
    let _ = writeln!(
        s,
        "{:>4}  {:>10}  {:>10}  {:>7}  {:>10}  {:>7}",
        "mode", "target Hz", "initial Hz", "err %", "updated Hz", "err %"
    );
    for f in &r.frequencies {
        let _ = writeln!(
            s,
            "{:>4}  {:>10.2}  {:>10.2}  {:>7.2}  {:>10.2}  {:>7.2}",
            f.mode, f.target_hz, f.initial_hz, f.initial_error_percent, f.updated_hz, f.updated_error_percent
        );
    }
    let _ = writeln!(
        s,
        "{:>4}  {:>10}  {:>10}  {:>7.2}  {:>10}  {:>7.2}\n",
        "mean", "", "", r.initial_mean_error_percent, "", r.updated_mean_error_percent
    );

    let has_truth = r.moduli.iter().any(|m| m.truth_pa.is_some());
    let _ = write!(s, "{:>7}  {:>11}  {:>11}", "element", "initial GPa", "updated GPa");
    let _ = writeln!(s, "{}", if has_truth { format!("  {:>11}", "true GPa") } else { String::new() });
    for m in &r.moduli {
        let _ = write!(s, "{:>7}  {:>11.3}  {:>11.3}", m.element, m.initial_pa / 1e9, m.updated_pa / 1e9);
        match m.truth_pa {
            Some(t) => {
                let _ = writeln!(s, "  {:>11.3}", t / 1e9);
            }
            None => s.push('\n'),
        }
    }
    s.push('\n');
    match &r.comac {
        Some(c) => {
            let _ = writeln!(
                s,
                "average COMAC: initial {:.4}, updated {:.4}",
                c.initial_average, c.updated_average
            );
        }
        None => s.push_str("average COMAC: no target mode shapes\n"),
    }
    s
}

pub fn format_comparison(c: &Comparison) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<20}  {:>10}  {:>9}  {:>9}  {:>8}  {:>11}  {:>9}",
        "run", "optimizer", "init err%", "upd err%", "COMAC", "evaluations", "seconds"
    );
    for r in &c.rows {
        let comac = r
            .updated_average_comac
            .map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(
            s,
            "{:<20}  {:>10}  {:>9.3}  {:>9.3}  {:>8}  {:>11}  {:>9.2}",
            r.label,
            r.optimizer,
            r.initial_mean_error_percent,
            r.updated_mean_error_percent,
            comac,
            r.evaluations,
            r.wall_clock_seconds
        );
    }
    s
}

//! `feupdate`: run, compare and validate model-updating experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, LevelFilter};

use feupdate::experiment::{
    compare_optimizers, emit_comparison, emit_report, format_comparison, format_report, run_experiment,
    ExperimentConfig, OptimizerChoice,
};
use feupdate::fe::{DofKind, StructureConfig, DOFS_PER_NODE};
use feupdate::modal::{frf_inertance, solve_modes, FrfSpec};

#[derive(Parser)]
#[command(name = "feupdate", version, about = "Finite-element model updating with PSO, SA, GA and a neural surrogate")]
struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and print its report.
    Run(RunArgs),
    /// Run several optimizers on one updating problem, side by side.
    Compare(CompareArgs),
    /// Parse and check a config without running it.
    ValidateConfig {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Write the inertance FRF of a structure as CSV.
    Frf(FrfArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(short, long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `[output] dir`.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Experiment configs sharing one problem; with `--optimizers`, only
    /// the first is used and its optimizer block is replaced.
    #[arg(short, long, required = true)]
    config: Vec<PathBuf>,
    /// Comma-separated list from pso, sa, ga, surrogate.
    #[arg(long, value_delimiter = ',')]
    optimizers: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FrfArgs {
    /// Structure TOML; the bundled H-structure when omitted.
    #[arg(long)]
    structure: Option<PathBuf>,
    /// Force location as NODE:DOF, DOF one of u, v, theta.
    #[arg(long, value_parser = parse_dof)]
    excite: usize,
    /// Response location as NODE:DOF.
    #[arg(long, value_parser = parse_dof)]
    response: usize,
    /// Modal damping ratio applied to every mode.
    #[arg(long, default_value_t = 0.01)]
    damping: f64,
    #[arg(long, default_value_t = 10)]
    modes: usize,
    /// Grid start, Hz.
    #[arg(long, default_value_t = 1.0)]
    fmin: f64,
    /// Grid end, Hz.
    #[arg(long, default_value_t = 500.0)]
    fmax: f64,
    #[arg(long, default_value_t = 500)]
    points: usize,
    /// CSV destination; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn parse_dof(s: &str) -> Result<usize, String> {
    let (node, dof) = s.split_once(':').ok_or("expected NODE:DOF, e.g. 12:u")?;
    let node: usize = node.parse().map_err(|_| format!("bad node index {node:?}"))?;
    let kind = match dof {
        "u" => DofKind::U,
        "v" => DofKind::V,
        "theta" => DofKind::Theta,
        _ => return Err(format!("bad dof {dof:?} (u, v or theta)")),
    };
    Ok(node * DOFS_PER_NODE + kind.offset())
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn run(args: RunArgs) -> Result<()> {
    let config = load_config(&args.config, args.seed)?;
    info!("running {} with seed {}", config.optimizer().name(), config.seed);
    let report = run_experiment(&config).with_context(|| format!("running {}", args.config.display()))?;
    print!("{}", format_report(&report));
    if let Some(dir) = args.out.or(config.output.dir.clone()) {
        for path in emit_report(&report, &dir)? {
            info!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let configs = if args.optimizers.is_empty() {
        args.config
            .iter()
            .map(|p| load_config(p, args.seed))
            .collect::<Result<Vec<_>>>()?
    } else {
        let base = load_config(&args.config[0], args.seed)?;
        args.optimizers
            .iter()
            .map(|name| {
                let choice = OptimizerChoice::default_for(name)
                    .with_context(|| format!("unknown optimizer {name:?} (pso, sa, ga, surrogate)"))?;
                let mut c = base.with_optimizer(choice);
                c.name = name.clone();
                Ok(c)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let comparison = compare_optimizers(&configs)?;
    print!("{}", format_comparison(&comparison));
    if let Some(dir) = args.out.or(configs[0].output.dir.clone()) {
        for path in emit_comparison(&comparison, &dir)? {
            info!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn validate(path: &Path) -> Result<()> {
    let config = load_config(path, None)?;
    let (problem, targets) = feupdate::experiment::build_problem(&config)?;
    println!(
        "{}: ok ({} elements, {} modes, optimizer {}, mode shapes {})",
        path.display(),
        problem.base_model().n_elements(),
        problem.n_modes(),
        config.optimizer().name(),
        if targets.mode_shapes.is_some() { "yes" } else { "no" }
    );
    Ok(())
}

fn frf(args: FrfArgs) -> Result<()> {
    if !(args.fmin >= 0.0 && args.fmax > args.fmin && args.points >= 2) {
        bail!("need 0 <= fmin < fmax and at least 2 points");
    }
    let structure = match &args.structure {
        Some(p) => StructureConfig::load(p)?,
        None => StructureConfig::h_structure_default(),
    };
    let solution = solve_modes(&structure.build()?.assemble()?, args.modes)?;
    let hz: Vec<f64> = (0..args.points)
        .map(|i| args.fmin + (args.fmax - args.fmin) * i as f64 / (args.points - 1) as f64)
        .collect();
    let spec = FrfSpec {
        excitation_dof: args.excite,
        response_dof: args.response,
        damping_ratios: vec![args.damping; args.modes],
        frequency_grid: hz.iter().map(|f| 2.0 * std::f64::consts::PI * f).collect(),
    };
    let h = frf_inertance(&solution, &spec)?;

    let sink: Box<dyn std::io::Write> = match &args.out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["frequency_hz", "re", "im", "magnitude", "phase_deg"])?;
    for (f, v) in hz.iter().zip(&h) {
        w.serialize((f, v.re, v.im, v.norm(), v.arg().to_degrees()))?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Compare(args) => compare(args),
        Command::ValidateConfig { config } => validate(&config),
        Command::Frf(args) => frf(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

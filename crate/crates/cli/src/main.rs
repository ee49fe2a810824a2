//! `tdsopt`: run, compare, check and plot identified time-delay models.

mod config;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tdsopt::bench::{export_results, run_experiment, write_dataset_plots, write_model_plots, AlgorithmResult, StatsSummary};
use tdsopt::model::{feasibility, penalized_cost, ConstraintGroup, ModelParameters, PlotGrid};
use tdsopt::socio::Algorithm;

use config::{CliConfig, Overrides};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, bad input, or an infeasible model: exit 1.
    Validation(String),
    /// I/O or evaluation failure: exit 2.
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<tdsopt::Error> for CliError {
    fn from(e: tdsopt::Error) -> Self {
        use tdsopt::Error as E;
        match e {
            E::Io { .. } | E::DegenerateDenominator { .. } | E::ZeroMagnitude { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "tdsopt", version, about = "Identify a time-delay transfer-function model with evolutionary search")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed; repetition i uses seed + i.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    repetitions: Option<usize>,
    /// Evaluation budget per run.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Maximum number of concurrent runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// genetic, caste, separated or topsis.
    #[arg(long, global = true)]
    algorithm: Option<Algorithm>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one algorithm and export its results.
    Run,
    /// Run all four algorithms on shared seeds.
    Compare,
    /// Report feasibility, static gain and cost of a parameter file.
    Check { params: PathBuf },
    /// Write Bode and Nyquist data for a parameter file.
    PlotData {
        params: PathBuf,
        #[arg(long)]
        omega_min: Option<f64>,
        #[arg(long)]
        omega_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
}

fn resolve(global: &GlobalArgs) -> Result<CliConfig, CliError> {
    let mut cfg = match &global.config {
        Some(path) => CliConfig::load(path)?,
        None => CliConfig::default(),
    };
    cfg.apply(&Overrides {
        out: global.out.clone(),
        seed: global.seed,
        repetitions: global.repetitions,
        budget: global.budget,
        jobs: global.jobs,
        algorithm: global.algorithm,
    });
    Ok(cfg)
}

fn print_summaries(rows: &[StatsSummary]) {
    println!("algorithm,average,minimum,std");
    for s in rows {
        println!("{},{},{},{}", s.algorithm, s.average, s.minimum, s.std);
    }
}

fn run_algorithms(cfg: &CliConfig, algorithms: &[Algorithm]) -> Result<(), CliError> {
    let mut results = Vec::with_capacity(algorithms.len());
    for &alg in algorithms {
        let experiment = cfg.experiment(alg)?;
        let traces = run_experiment(&experiment)?;
        results.push(AlgorithmResult::new(alg, traces, cfg.experiment.convergence_stride)?);
    }
    let dir = &cfg.experiment.output_dir;
    let data = cfg.model.dataset()?;
    cfg.plot.omegas()?;
    export_results(&results, &data, &cfg.plot, dir)?;
    cfg.write_echo(dir)?;
    print_summaries(&results.iter().map(|r| r.summary.clone()).collect::<Vec<_>>());
    Ok(())
}

fn load_parameters(path: &Path) -> Result<ModelParameters, CliError> {
    ModelParameters::load(path).map_err(|e| match e {
        tdsopt::Error::Io { .. } => CliError::Runtime(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    })
}

fn check(cfg: &CliConfig, path: &Path) -> Result<(), CliError> {
    let p = load_parameters(path)?;
    let data = cfg.model.dataset()?;
    let report = feasibility(&p, cfg.model.eps);
    println!("{:<30} {:<6} violation", "constraint", "status");
    for group in ConstraintGroup::ALL {
        let v = report.violation(group);
        println!("{:<30} {:<6} {v:e}", group.label(), if v > 0.0 { "FAIL" } else { "pass" });
    }
    println!("feasible: {}", report.feasible);
    match p.static_gain() {
        Ok(k) => println!("static_gain: {k}"),
        Err(e) => println!("static_gain: undefined ({e})"),
    }
    match p.cost(&data) {
        Ok(c) => println!("cost: {c:e}"),
        Err(e) => println!("cost: undefined ({e})"),
    }
    println!("penalized_cost: {:e}", penalized_cost(&p, &data, &cfg.model.penalty()));
    if report.feasible {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{} is infeasible", path.display())))
    }
}

fn plot_data(cfg: &CliConfig, path: &Path, grid: PlotGrid) -> Result<(), CliError> {
    let p = load_parameters(path)?;
    let data = cfg.model.dataset()?;
    let dir = &cfg.experiment.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    let mut written = write_model_plots(&p, &grid, dir, "model")?;
    written.extend(write_dataset_plots(&data, dir)?);
    let mut echoed = cfg.clone();
    echoed.plot = grid;
    written.push(echoed.write_echo(dir)?);
    for w in written {
        println!("{}", w.display());
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve(&cli.global)?;
    match cli.command {
        Command::Run => run_algorithms(&cfg, &[cfg.experiment.algorithm]),
        Command::Compare => run_algorithms(&cfg, &Algorithm::ALL),
        Command::Check { params } => check(&cfg, &params),
        Command::PlotData { params, omega_min, omega_max, points } => {
            let grid = PlotGrid {
                omega_min: omega_min.unwrap_or(cfg.plot.omega_min),
                omega_max: omega_max.unwrap_or(cfg.plot.omega_max),
                points: points.unwrap_or(cfg.plot.points),
            };
            plot_data(&cfg, &params, grid)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

//! Command-line runner: `analyze`, `moments`, `solve` and `experiment`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

pub mod config;
pub mod experiment;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::moments::ModifiedMoments;
use crate::mz::{mz_constant, MzOptions};

pub use config::{Command, ExactSolution, FSelector, KSelector, RunConfig, Sweep};
pub use experiment::{run_experiment, ResultRecord, RunOutcome};
pub use output::{emit_results, results_csv};

#[derive(Debug, Parser)]
#[command(name = "sphint", version, about = "Product-integration solvers for integral equations on the sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Marcinkiewicz–Zygmund constant, exactness degree and mesh norm of a point set
    Analyze(Flags),
    /// Modified moments of a singular kernel
    Moments(Flags),
    /// Solve an integral equation with built-in K and constant f
    Solve(Flags),
    /// Run one of the four reference experiments
    Experiment(Flags),
}

/// Every flag is optional; unset flags fall back to the config file and
/// then to the defaults.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// key = value configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// <path> | file:<path> | equal_area:<m|auto> | random:<m|auto>:<seed> | designs:<dir>
    #[arg(long)]
    pub points: Option<String>,
    /// equal | file
    #[arg(long)]
    pub weights: Option<String>,
    /// one | algebraic:<nu> | log | mixed:<nu1>:<nu2>
    #[arg(long)]
    pub kernel: Option<String>,
    /// const:<c> | sin:<c> | cos:<c>
    #[arg(long = "K")]
    pub k: Option<String>,
    /// const:<c> | const:auto
    #[arg(long)]
    pub f: Option<String>,
    /// Reference solution for the uniform error: one | none
    #[arg(long)]
    pub exact: Option<String>,
    /// Hyperinterpolation degree
    #[arg(long)]
    pub n: Option<String>,
    /// Size of the random evaluation grid
    #[arg(long)]
    pub grid: Option<String>,
    /// Seed of the evaluation grid (and of the mesh-norm probe)
    #[arg(long)]
    pub seed: Option<String>,
    /// CSV output path; a JSON mirror is written alongside
    #[arg(long)]
    pub out: Option<String>,
    /// n=<start>:<step>:<end>
    #[arg(long)]
    pub sweep: Option<String>,
    /// Experiment id (1-4)
    #[arg(long)]
    pub id: Option<String>,
}

impl Sub {
    fn parts(&self) -> (Command, &Flags) {
        match self {
            Sub::Analyze(f) => (Command::Analyze, f),
            Sub::Moments(f) => (Command::Moments, f),
            Sub::Solve(f) => (Command::Solve, f),
            Sub::Experiment(f) => (Command::Experiment, f),
        }
    }
}

/// Defaults, then the config file, then flags.
pub fn build_config(command: Command, flags: &Flags) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(command);
    if let Some(path) = &flags.config {
        cfg.apply_file(path)?;
        cfg.command = command;
    }
    let pairs = [
        ("points", &flags.points),
        ("weights", &flags.weights),
        ("kernel", &flags.kernel),
        ("K", &flags.k),
        ("f", &flags.f),
        ("exact", &flags.exact),
        ("n", &flags.n),
        ("grid", &flags.grid),
        ("seed", &flags.seed),
        ("out", &flags.out),
        ("sweep", &flags.sweep),
        ("experiment", &flags.id),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn deliver(cfg: &RunConfig, csv: &str, write: impl FnOnce(&std::path::Path) -> Result<()>) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            write(path)?;
            eprintln!("wrote {} and {}", path.display(), output::json_path(path).display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(csv.as_bytes());
        }
    }
    Ok(())
}

/// Executes a validated configuration.
pub fn execute(cfg: &RunConfig) -> Result<()> {
    match cfg.command {
        Command::Analyze => {
            let opts = MzOptions {
                probe_seed: cfg.seed,
                ..Default::default()
            };
            let mut reports = Vec::new();
            for n in cfg.degrees() {
                let rule = cfg.points.resolve(cfg.strength_for(n), cfg.weights)?;
                let report = mz_constant(&rule, n, &opts)?;
                eprintln!("n = {n}, m = {}: {}", rule.len(), report.status());
                reports.push(report);
            }
            let csv = output::mz_csv(&reports);
            deliver(cfg, &csv, |path| {
                let mirror = output::JsonMirror {
                    config: cfg.clone(),
                    records: reports.clone(),
                    warnings: Vec::new(),
                };
                output::emit(path, &csv, &mirror)
            })
        }
        Command::Moments => {
            let moments = ModifiedMoments::compute(cfg.kernel, cfg.n)?;
            let csv = output::moments_csv(&moments);
            deliver(cfg, &csv, |path| {
                let mirror = output::JsonMirror {
                    config: cfg.clone(),
                    records: vec![moments.clone()],
                    warnings: Vec::new(),
                };
                output::emit(path, &csv, &mirror)
            })
        }
        Command::Solve | Command::Experiment => {
            let resolved = experiment::resolve_config(cfg)?;
            let report = experiment::run_solves(&resolved)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let csv = results_csv(&report.records);
            deliver(&resolved, &csv, |path| {
                emit_results(&report.records, &resolved, &report.warnings, path)
            })
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit
/// code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (command, flags) = cli.command.parts();
    match build_config(command, flags).and_then(|cfg| execute(&cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! `dgdrf`: simulate decentralized gradient descent with random features.
//!
//! Subcommands: `run` (one experiment into a self-contained directory),
//! `figure` (fig1/fig2/fig3 sweeps as plot-ready CSV), `theory`
//! (prescriptions, leading-order terms, lemma suites), `sweep` (cartesian
//! parameter sweeps), `eval` (re-evaluate stored traces).
//!
//! Exit codes: 0 ok, 2 configuration error, 3 lemma violation, 4 I/O error.

// `!(x > 0.0)` rejects NaN along with nonpositive values; keep the idiom.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod eval;
mod figures;
mod runner;
mod sweep;
mod theory_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dgdrf::error::Error;

use crate::config::ExperimentConfig;
use crate::figures::{Figure, FigureOptions, Scale};
use crate::theory_cmd::TheoryArgs;

#[derive(Parser)]
#[command(name = "dgdrf", version, about = "decentralized gradient descent with random features")]
struct Cli {
    /// Worker threads for parallel sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train, evaluate, and write a self-contained run directory.
    Run(RunArgs),
    /// Run one of the canned figure sweeps into tidy CSV.
    Figure(FigureArgs),
    /// Print prescriptions and run the lemma verification suites.
    Theory(TheoryCliArgs),
    /// Sweep the axes configured under [sweep] into one CSV.
    Sweep(RunArgs),
    /// Re-evaluate a finished run directory without re-training.
    Eval(EvalArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML). Missing sections take defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (overrides [output].dir).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Base seed (overrides [seeds].base).
    #[arg(long)]
    seed: Option<u64>,

    /// Drop the sqrt(2) cosine normalization.
    #[arg(long)]
    legacy_experiment_scaling: bool,

    /// Print the canonicalized config and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Paper,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Args)]
struct FigureArgs {
    /// Which figure sweep to run.
    #[arg(value_enum)]
    which: FigureArg,

    /// desk: synthetic, minutes on a laptop. paper: best-effort over a CSV.
    #[arg(long, value_enum, default_value_t = ScaleArg::Desk)]
    scale: ScaleArg,

    #[arg(long, default_value = "figures")]
    out: PathBuf,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Repetitions per cell (default 5).
    #[arg(long)]
    reps: Option<usize>,

    /// Total sample budget nm (fig1).
    #[arg(long)]
    nm: Option<usize>,

    /// Iteration budget per run.
    #[arg(long)]
    iters: Option<usize>,

    #[arg(long)]
    test_size: Option<usize>,

    /// Network sizes to sweep (grid cells skip non-squares).
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<usize>>,

    /// Feature counts: the fig1 sweep axis, or the fixed count elsewhere.
    #[arg(long, value_delimiter = ',')]
    m_values: Option<Vec<usize>>,

    /// Total-sample ladder for fig2/fig3.
    #[arg(long, value_delimiter = ',')]
    nm_values: Option<Vec<usize>>,

    /// Dataset for paper scale.
    #[arg(long)]
    csv: Option<PathBuf>,

    #[arg(long, default_value_t = 0)]
    label_column: usize,

    #[arg(long)]
    has_header: bool,
}

#[derive(Args)]
struct TheoryCliArgs {
    #[arg(long, default_value_t = 4)]
    n: u64,

    /// Samples per agent.
    #[arg(long, default_value_t = 100)]
    m: u64,

    #[arg(long, default_value_t = 0.0)]
    sigma2: f64,

    /// Source exponent in [1/2, 1].
    #[arg(long, default_value_t = 0.5)]
    r: f64,

    /// Capacity exponent in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,

    #[arg(long, default_value_t = 0.5)]
    eta: f64,

    /// Feature count for the leading-terms table (default: prescribed M).
    #[arg(long)]
    num_features: Option<u64>,

    /// Iterations for the leading-terms table (default: prescribed t).
    #[arg(long)]
    iters: Option<u64>,

    /// Also write the full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// A directory previously produced by `dgdrf run`.
    #[arg(long)]
    run_dir: PathBuf,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Csv(_) => 4,
        _ => 2,
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seeds.base = seed;
    }
    if let Some(out) = &args.out {
        cfg.output.dir = Some(out.clone());
    }
    if args.legacy_experiment_scaling {
        cfg.features.legacy_experiment_scaling = true;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // ignore failure if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Run(args) => {
            let cfg = load_config(&args)?;
            if args.print_config {
                cfg.validate()?;
                print!("{}", cfg.to_canonical_toml());
                return Ok(ExitCode::SUCCESS);
            }
            let out_dir = cfg
                .output
                .dir
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("runs/run-{}", &cfg.hash()[..8])));
            let files = runner::run_experiment(&cfg, &out_dir)?;
            println!("wrote {} files to {}", files.len(), out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(args) => {
            let cfg = load_config(&args)?;
            if args.print_config {
                cfg.validate()?;
                print!("{}", cfg.to_canonical_toml());
                return Ok(ExitCode::SUCCESS);
            }
            let out_dir = cfg
                .output
                .dir
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("runs/sweep-{}", &cfg.hash()[..8])));
            let files = sweep::run_sweep(&cfg, &out_dir)?;
            println!("wrote {} to {}", files[0].display(), out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Figure(args) => {
            let figure = match args.which {
                FigureArg::Fig1 => Figure::Fig1,
                FigureArg::Fig2 => Figure::Fig2,
                FigureArg::Fig3 => Figure::Fig3,
            };
            let opts = FigureOptions {
                scale: match args.scale {
                    ScaleArg::Desk => Scale::Desk,
                    ScaleArg::Paper => Scale::Paper,
                },
                out_dir: args.out,
                base_seed: args.seed,
                reps: args.reps,
                nm: args.nm,
                iters: args.iters,
                test_size: args.test_size,
                n_values: args.n_values,
                m_values: args.m_values,
                nm_values: args.nm_values,
                csv_path: args.csv,
                label_column: args.label_column,
                has_header: args.has_header,
            };
            let files = figures::run_figure(figure, &opts)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Theory(args) => {
            let theory_args = TheoryArgs {
                n: args.n,
                m: args.m,
                sigma2: args.sigma2,
                r: args.r,
                gamma: args.gamma,
                eta: args.eta,
                num_features: args.num_features,
                iters: args.iters,
                json_out: args.json,
            };
            match theory_cmd::run_theory(&theory_args)? {
                Ok(()) => Ok(ExitCode::SUCCESS),
                Err(violation) => {
                    eprintln!("lemma violation: {}", violation.0);
                    Ok(ExitCode::from(3))
                }
            }
        }
        Command::Eval(args) => {
            eval::run_eval(&args.run_dir)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ltsim::config::{Mode, RunConfig};
use ltsim::run::{self, Elements};
use ltsim::Error;

#[derive(Parser)]
#[command(
    name = "ltsim",
    version,
    about = "Time-dependent Hamiltonian simulation by product formulas"
)]
struct Cli {
    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the exponential plan and cost report without executing it.
    Plan(RunArgs),
    /// Plan, execute with oracle-discretized elements and measure the error.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Matrix elements fed to the executor.
        #[arg(long, value_enum, default_value_t = ElementsArg::Discretized)]
        elements: ElementsArg,
    },
    /// Exponential counts of the adaptive and constant-step planners over Gaussian widths.
    SweepGaussian {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Widths; defaults to 10 log-spaced points on [0.02, 1].
        #[arg(long = "a", value_delimiter = ',')]
        widths: Vec<f64>,
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Cost of switching from k = 1 to k = 2 at t′ on t⁵ sin(1/t) e^{−t}.
    OptimizeK {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        /// End of the time interval.
        #[arg(long, default_value_t = run::SINGULAR_END)]
        end: f64,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides `simulation.mode` from the config.
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ElementsArg {
    Exact,
    Discretized,
}

enum Failure {
    Config(String),
    Violation(Vec<String>),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Config(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(format!("i/o error: {e}"))
    }
}

fn load(args: &RunArgs) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config = RunConfig::parse(&text)?;
    if let Some(mode) = &args.mode {
        config.mode = mode.parse::<Mode>()?;
    }
    fs::create_dir_all(&args.out)?;
    Ok(config)
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Plan(args) => {
            let config = load(&args)?;
            let planned = run::plan(&config)?;
            output::write_text(&args.out, "plan.txt", &planned.plan.to_text())?;
            if let Some(schedule) = &planned.schedule {
                output::write_text(&args.out, "schedule.txt", &schedule.to_text())?;
            }
            output::write_cost(&args.out, &planned.report)?;
        }
        Command::Simulate { run: args, elements } => {
            let config = load(&args)?;
            let planned = run::plan(&config)?;
            let elements = match elements {
                ElementsArg::Exact => Elements::Exact,
                ElementsArg::Discretized => Elements::Discretized,
            };
            let outcome = run::simulate(&planned, elements)?;
            output::write_result(&args.out, config.epsilon, &outcome)?;
            output::write_cost(&args.out, &outcome.report)?;
            output::write_timing(&args.out, outcome.seconds)?;
            log::info!("operator error {:e} for ε = {:e}", outcome.error, config.epsilon);
            if !outcome.violations.is_empty() {
                return Err(Failure::Violation(outcome.violations));
            }
        }
        Command::SweepGaussian {
            out,
            widths,
            epsilon,
            k,
        } => {
            ensure_dir(&out)?;
            let widths = if widths.is_empty() {
                run::log_grid(0.02, 1.0, 10)
            } else {
                widths
            };
            if let Some(a) = widths.iter().find(|a| a.is_nan() || **a <= 0.0) {
                return Err(Failure::Config(format!("--a: widths must be positive, got {a}")));
            }
            let rows = run::sweep_gaussian(&widths, epsilon, k)?;
            output::write_sweep(&out, &rows)?;
        }
        Command::OptimizeK { out, epsilon, end } => {
            ensure_dir(&out)?;
            let study = run::optimize_singular(end, epsilon)?;
            output::write_split(&out, &study.optimum)?;
            log::info!(
                "split at t′ = {} costs {} exponentials (k = 1 alone: {:?}, k = 2 alone: {:?})",
                study.optimum.split,
                study.optimum.cost,
                study.single_k1,
                study.single_k2
            );
            if study.optimum.multimodal {
                log::warn!("the split cost curve has several local minima");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet {
        log::LevelFilter::Error
    } else {
        log::LevelFilter::Info
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_target(false)
        .init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            log::error!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(list)) => {
            for v in list {
                log::error!("verification failed: {v}");
            }
            ExitCode::from(3)
        }
        Err(Failure::Other(msg)) => {
            log::error!("{msg}");
            ExitCode::FAILURE
        }
    }
}

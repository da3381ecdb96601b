//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{self, Flow, IntegrateOptions, VerifyOptions, DEFAULT_TRIALS};
use crate::problem::{InputError, Problem};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(
    name = "polaris",
    version,
    about = "Polarized Poisson, k-symplectic and Nambu checks on problem files"
)]
pub struct Cli {
    /// Emit the report as JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Random seed (default: the file's tasks.seed, else 42).
    #[arg(long, global = true, env = "POLARIS_SEED")]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlowArg {
    Hamiltonian,
    Nambu,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse the file and decompose every map.
    Validate { file: PathBuf },
    /// Bracket of two named maps.
    Bracket { file: PathBuf, h: String, k: String },
    /// Hamiltonian vector field of a named map.
    Field { file: PathBuf, h: String },
    /// Nambu vector field of a named map.
    Nambu { file: PathBuf, h: String },
    /// Run the invariant suite.
    Verify {
        file: PathBuf,
        /// Random trials per property (default: tasks.trials, else 100).
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Integrate a flow with RK4 and report conservation drift.
    #[command(allow_negative_numbers = true)]
    Integrate {
        file: PathBuf,
        h_name: String,
        #[arg(long, value_enum, default_value_t = FlowArg::Hamiltonian)]
        flow: FlowArg,
        /// Initial state, comma separated.
        #[arg(long, value_delimiter = ',')]
        x0: Option<Vec<f64>>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t1: Option<f64>,
        /// Step size.
        #[arg(long = "h")]
        step: Option<f64>,
        /// Write the trajectory as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail when a drift exceeds this bound.
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// Rendered report and exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

fn file_of(command: &Command) -> &PathBuf {
    match command {
        Command::Validate { file }
        | Command::Bracket { file, .. }
        | Command::Field { file, .. }
        | Command::Nambu { file, .. }
        | Command::Verify { file, .. }
        | Command::Integrate { file, .. } => file,
    }
}

fn report_for(cli: &Cli) -> Result<Report, InputError> {
    let problem = Problem::load(file_of(&cli.command))?;
    let seed = commands::resolve_seed(cli.seed, &problem);
    match &cli.command {
        Command::Validate { .. } => Ok(commands::validate(&problem, seed)),
        Command::Bracket { h, k, .. } => commands::bracket_cmd(&problem, seed, h, k),
        Command::Field { h, .. } => commands::field_cmd(&problem, seed, h),
        Command::Nambu { h, .. } => commands::nambu_cmd(&problem, seed, h),
        Command::Verify { trials, .. } => {
            let trials = trials.or(problem.tasks.trials).unwrap_or(DEFAULT_TRIALS);
            Ok(commands::verify(&problem, &VerifyOptions { seed, trials }))
        }
        Command::Integrate {
            h_name,
            flow,
            x0,
            t0,
            t1,
            step,
            out,
            tol,
            ..
        } => commands::integrate(
            &problem,
            &IntegrateOptions {
                seed,
                map: h_name.clone(),
                flow: match flow {
                    FlowArg::Hamiltonian => Flow::Hamiltonian,
                    FlowArg::Nambu => Flow::Nambu,
                },
                x0: x0.clone(),
                t0: *t0,
                t1: *t1,
                h: *step,
                out: out.clone(),
                tol: *tol,
            },
        ),
    }
}

/// Runs a parsed command line. Input errors become exit code 2 with the
/// message in `Err`.
pub fn execute(cli: &Cli) -> Result<Outcome, InputError> {
    let report = report_for(cli)?;
    let stdout = if cli.json { report.to_json() } else { report.to_text() };
    Ok(Outcome {
        stdout,
        code: report.exit_code(),
    })
}

//! `sympreg`: tableaux, structure-preservation regions and logistic dynamics
//! from the command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 numerical failure
//! (whatever was computed before the failure is still written).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sympreg", version, about = "Structure-preservation regions of symplectic Runge-Kutta methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the coefficients of a catalog method.
    Tableau {
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Scan for the step sizes that keep the equilibrium type.
    Region {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 10.0)]
        zmax: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Elliptic endpoints of the Lobatto IIIA-IIIB pairs against reference values.
    Table1 {
        #[command(flatten)]
        out: OutArgs,
    },
    /// Lobatto pair endpoints for s = 2..=stages and their distance to pi.
    Conjecture {
        #[arg(long, default_value_t = 10)]
        stages: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Iterate a step map and write the trajectory.
    Simulate {
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 0.2)]
        p0: f64,
        #[arg(long, default_value_t = 1.0)]
        q0: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Classify every equilibrium before and after discretization.
    Classify {
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        h: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Print the substep fractions of a triple-jump composition.
    Compose {
        #[command(flatten)]
        method: MethodArgs,
        /// Also report the principal endpoint for this structure.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, default_value_t = 10.0)]
        zmax: f64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
struct MethodArgs {
    /// Catalog name: midpoint, symplectic-euler, gauss, lobatto, lobatto-iiia, lobatto-iiib.
    #[arg(long, default_value = "midpoint")]
    method: String,
    #[arg(long)]
    stages: Option<usize>,
    /// Raise the order by recursive triple jumps.
    #[arg(long, value_parser = PossibleValuesParser::new(["2", "4", "6"]).map(|s| s.parse::<usize>().unwrap()))]
    compose: Option<usize>,
}

#[derive(Debug, Args)]
struct ProblemArgs {
    #[arg(long, value_enum, default_value_t = ProblemArg::Logistic)]
    problem: ProblemArg,
    /// Growth rate of the logistic problem.
    #[arg(long)]
    alpha: Option<f64>,
    /// Frequency of the linear problems.
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Elliptic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    Elliptic,
    Hyperbolic,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug)]
enum CliError {
    Io(std::io::Error),
    Usage(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<sympreg::Error> for CliError {
    fn from(e: sympreg::Error) -> Self {
        use sympreg::Error as E;
        match e {
            E::Argument(_) | E::Parse { .. } | E::Dimension(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sympreg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod reproduce;
mod settings;
mod table;

use settings::CommonOpts;

#[derive(Parser, Debug)]
#[command(
    name = "sicorr",
    version,
    about = "Entanglement tests from SIC and GSIC correlation matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a POVM against completeness, positivity and its symmetry relations.
    ValidatePovm {
        /// sic2, gsic2:<t>, gsic3:<t> or file:<path>.
        povm: String,
    },
    /// Evaluate the criterion on a state file. Exit 2 if entangled, 0 if inconclusive.
    Detect {
        /// JSON state document.
        state: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Evaluate a named state family over a parameter grid and emit CSV.
    Sweep {
        /// Named state family, e.g. varrho_prime, sigma, noisy_phi.
        #[arg(long)]
        family: String,
        /// name=lo:hi:step; repeat for a Cartesian grid. Names may also appear
        /// in --povm as {name}.
        #[arg(long = "param", required = true)]
        params: Vec<String>,
        /// name=value held fixed for every row.
        #[arg(long = "set")]
        fixed: Vec<String>,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Regenerate the data behind one of the four worked examples.
    ReproduceExample {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        example: u8,
        /// Output directory for the CSV files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Grid points per parameter axis (examples 2 and 4; zero is dropped).
        #[arg(long)]
        points: Option<usize>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(sicorr::Error),
    Context {
        path: PathBuf,
        message: String,
    },
    Csv(csv::Error),
    /// Headline assertions of a reproduced example that did not hold.
    Claims(Vec<String>),
}

impl CliError {
    pub fn at(path: &Path, err: impl fmt::Display) -> Self {
        CliError::Context {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Context { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Csv(e) => write!(f, "csv: {e}"),
            CliError::Claims(failed) => write!(
                f,
                "{} claim(s) failed:\n  {}",
                failed.len(),
                failed.join("\n  ")
            ),
        }
    }
}

impl From<sicorr::Error> for CliError {
    fn from(e: sicorr::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

/// Exit status for a finished command.
pub enum Outcome {
    /// Exit 0: inconclusive verdict, or a check that passed.
    Clear,
    Entangled,
}

fn main() -> ExitCode {
    // clap exits with 2 on bad usage, which would read as "entangled"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::ValidatePovm { povm } => commands::validate_povm(&povm),
        Command::Detect { state, opts } => commands::detect(&state, &opts),
        Command::Sweep {
            family,
            params,
            fixed,
            opts,
        } => commands::sweep(&family, &params, &fixed, &opts),
        Command::ReproduceExample {
            example,
            out,
            points,
        } => reproduce::run(example, &out, points),
    };
    match result {
        Ok(Outcome::Clear) => ExitCode::from(0),
        Ok(Outcome::Entangled) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

mod commands;
mod output;


use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};


#[derive(Parser, Debug)]
#[command(name = "cubic-genus", version, about = "Genus expansion of the cubic Hermitian matrix model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact coefficients f^(2g)_{2j} and F-series coefficients.
    Expand {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        max_j: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Exact ĝ₂ₖ(w), b̂₂ₖ(w) coefficients of the string hierarchy.
    Hierarchy {
        #[arg(long)]
        max_k: usize,
        #[arg(long)]
        horizon: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Endpoints, normalization and the φ-inequalities at one u (`uc` for the critical value).
    Equilibrium {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, env = "CUBIC_GENUS_PRECISION", default_value_t = 40)]
        precision: u32,
        /// Sample points per region for the φ-inequality scan.
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Critical constants C₂g, D₂g, K₂g and the Painlevé I check.
    Critical {
        #[arg(long, default_value_t = 8)]
        max_genus: usize,
        #[arg(long, env = "CUBIC_GENUS_PRECISION", default_value_t = 40)]
        precision: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive Wick pairing count for p cubic vertices.
    Oracle {
        #[arg(long)]
        vertices: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Finite-N orthogonal polynomial validation.
    Validate {
        #[arg(long = "N", alias = "n")]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, env = "CUBIC_GENUS_PRECISION", default_value_t = 80)]
        precision: u32,
        /// Contour weight α as `re,im`.
        #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
        alpha: String,
        /// Add the Toda residual at step h.
        #[arg(long)]
        toda: bool,
        #[arg(long, default_value_t = 1e-3)]
        toda_step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Runs every acceptance criterion and reports pass/fail with timings.
    Reproduce {
        /// Criterion keys to skip, e.g. `oracle6` or `asymptotics`.
        #[arg(long, value_delimiter = ',')]
        skip: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
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
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.to_json());
            ExitCode::from(failure.code())
        }
    }
}

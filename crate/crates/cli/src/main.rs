mod commands;
mod report;
mod sweeps;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use report::{CliError, CommandReport};

#[derive(Parser, Debug)]
#[command(name = "minors", version, about = "Identification minors, cs/ofo invariants and permutation patterns")]
pub struct Cli {
    /// Emit a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test whether all identification minors of a function are similar.
    Uim { file: PathBuf },
    /// Report class memberships (UIM, OFO, CS, 2ST, SYMM, SUPP).
    Classify { file: PathBuf },
    /// Compute the invariance group of a function.
    Invgroup { file: PathBuf },
    /// Identification minors up to similarity.
    Deck { file: PathBuf },
    /// Canonical forms and invariants of a tuple.
    Canon {
        /// Symbols 1..k separated by spaces, or a word of letters.
        #[arg(required = true, num_args = 1..)]
        tuple: Vec<String>,
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
        /// Alphabet size (defaults to the largest symbol, or 26 for letters).
        #[arg(long)]
        k: Option<usize>,
    },
    /// The ℓ-patterns of a permutation.
    Pat {
        #[arg(required = true, num_args = 1..)]
        perm: Vec<String>,
        #[arg(long = "l")]
        ell: usize,
    },
    /// Comp^(n) of a permutation group read from a group file.
    Comp {
        #[arg(long)]
        n: usize,
        group_file: PathBuf,
    },
    /// Per-level equalizing/differentiating verdicts for a permutation.
    Equalizing {
        #[arg(required = true, num_args = 1..)]
        perm: Vec<String>,
    },
    /// The cs-determined function with trivial invariance group.
    WitnessNew {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Write the function file here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write its cs spec file.
        #[arg(long)]
        spec_out: Option<PathBuf>,
    },
    /// Distinct cs-determined functions f, g with g = f∘σ̂.
    WitnessPair {
        #[arg(required = true, num_args = 1..)]
        perm: Vec<String>,
        #[arg(long = "l")]
        ell: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out_f: Option<PathBuf>,
        #[arg(long)]
        out_g: Option<PathBuf>,
    },
    /// Compare closure classes of a step relation with invariant fibers.
    Oracle {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        relation: OracleRelation,
    },
    /// Exhaustive experiments.
    Sweep {
        #[command(subcommand)]
        sweep: Sweep,
    },
}

#[derive(Subcommand, Debug)]
pub enum Sweep {
    /// Classify every n-permutation at level ℓ.
    LDiff {
        #[arg(long)]
        n: usize,
        #[arg(long = "l")]
        ell: usize,
        /// List differentiating permutations outside the known families.
        #[arg(long)]
        report_unlisted: bool,
    },
    /// Class sizes and inclusions over all functions {1..k}^n -> {1..m}.
    Classes {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    /// Comp^(n) G for every subgroup G of S_ℓ, matched against named groups.
    Compn {
        #[arg(long = "l")]
        ell: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    All,
    Ms,
    Singles,
    Cs,
    Ofo,
    Supp,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleRelation {
    /// `~` against ofo fibers.
    Ofo,
    /// `~₂` against cs fibers.
    Cs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let outcome = commands::run(&cli);
    match outcome {
        Ok(out) => {
            let report = CommandReport::new(&cli.command, out, start.elapsed());
            report.emit(cli.json);
            ExitCode::from(report.exit_code())
        }
        Err(err) => {
            report::emit_error(&err, cli.json);
            ExitCode::from(match err {
                CliError::Refused(_) => 1,
                _ => 2,
            })
        }
    }
}

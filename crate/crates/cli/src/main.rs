use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lnd_core::corpus::{self, RunOptions};

/// Checks corpora of locally nilpotent derivation identities with exact arithmetic.
#[derive(Parser)]
#[command(name = "lnd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every directive and print one verdict line per directive.
    Check(RunArgs),
    /// Like `check`, with full details and witnesses.
    Report(RunArgs),
    /// Syntax check only; prints the canonical form on success.
    Parse { file: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    /// Seed for randomized directives.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cases per randomized directive.
    #[arg(long, default_value_t = 200)]
    budget: usize,
    /// Degree bound of random polynomials.
    #[arg(long = "deg-max", default_value_t = 3, value_parser = clap::value_parser!(u32).range(0..=8))]
    deg_max: u32,
}

fn load(path: &Path) -> Result<corpus::Corpus, String> {
    let src = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    corpus::parse(&src).map_err(|e| format!("{}:{e}", path.display()))
}

fn main() -> ExitCode {
    // Directive panics are caught and reported as ERROR lines.
    std::panic::set_hook(Box::new(|_| {}));
    let cli = Cli::parse();
    let (args, full) = match cli.command {
        Command::Parse { file } => {
            return match load(&file) {
                Ok(c) => {
                    print!("{c}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            };
        }
        Command::Check(a) => (a, false),
        Command::Report(a) => (a, true),
    };
    let c = match load(&args.file) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        seed: args.seed,
        budget: args.budget,
        degree: args.deg_max,
    };
    let report = corpus::run(&c, &opts);
    print!("{}", report.render(full));
    if report.success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

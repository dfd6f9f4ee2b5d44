//! `bellhide`: build hiding states, certify their security, and simulate
//! preparation, attacks and unlocking from the command line.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "bellhide", version, about = "Hide classical bits in mixtures of Bell states")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Output file ("-" for stdout). Relative paths resolve against
    /// $BELLHIDE_OUTPUT_DIR when it is set.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum StateMethod {
    Direct,
    Recurrence,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CertifyMode {
    Reduced,
    Full,
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PathChoice {
    Auto,
    Recursive,
    ParityDraw,
    Clifford,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AverageChoice {
    Exact,
    Sampled,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the hiding state for one bit with exact weights.
    States {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bit: u8,
        #[arg(long, value_enum, default_value_t = StateMethod::Direct)]
        method: StateMethod,
    },
    /// Solve the certifying LP for n = 1..=n-max.
    Certify {
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = CertifyMode::Reduced)]
        mode: CertifyMode,
    },
    /// Score local measurement strategies by exact enumeration.
    Attack {
        /// Strategy name, or "all" for every built-in strategy.
        #[arg(long, default_value = "all")]
        strategy: String,
        #[arg(long)]
        n: usize,
        /// P(B = 0) as p/q or a decimal.
        #[arg(long, default_value = "1/2")]
        prior: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Stream prepared samples followed by a verification summary.
    Prep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bit: u8,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = PathChoice::Auto)]
        path: PathChoice,
        /// Include each sample's coin flips.
        #[arg(long)]
        trace: bool,
    },
    /// Compare the Clifford-prepared average with the target state.
    VerifyClifford {
        #[arg(long)]
        n: usize,
        /// Defaults to exact when the group can be enumerated.
        #[arg(long, value_enum)]
        mode: Option<AverageChoice>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recover bits from Bell-measurement strings (prep output, CSV or one string per line).
    Unlock {
        /// Input file, "-" for stdin.
        #[arg(long)]
        input: PathBuf,
    },
    /// Block size for k bits and, optionally, an encoding round trip.
    Multibit {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        epsilon: f64,
        /// Bits to encode, e.g. 0110.
        #[arg(long)]
        bits: Option<String>,
        /// Block size to use instead of the computed one.
        #[arg(long)]
        n: Option<usize>,
        /// Draw strings for each block and unlock them.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Dense-matrix spot checks of the hiding states and the LP witness.
    Oracle {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Write both dense matrices as JSON to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<(), CliError> {
    let report = match cli.command {
        Command::States { n, bit, method } => commands::states(n, bit, method)?,
        Command::Certify { n_max, mode } => commands::certify(n_max, mode)?,
        Command::Attack { strategy, n, prior, seed } => commands::attack(&strategy, n, &prior, seed)?,
        Command::Prep { n, bit, samples, seed, path, trace } => commands::prep(n, bit, samples, seed, path, trace)?,
        Command::VerifyClifford { n, mode, samples, seed } => commands::verify_clifford(n, mode, samples, seed)?,
        Command::Unlock { input } => commands::unlock(&input)?,
        Command::Multibit { k, epsilon, bits, n, seed } => commands::multibit(k, epsilon, bits.as_deref(), n, seed)?,
        Command::Oracle { n, dump } => commands::oracle(n, dump.as_deref())?,
    };
    let bytes = report.render(cli.common.format)?;
    let dest = output::destination(cli.common.output.as_deref(), report.command, cli.common.format);
    output::write_bytes(dest.as_deref(), &bytes)?;
    if report.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(report.failures.join("; ")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {}", one_line(first.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", one_line(&e.to_string()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::io::Write;
use std::panic;
use std::path::PathBuf;
use std::process::ExitCode;

use behmm_cli::{exit, load_model, load_query, run_query, CliError, CliResult, Options, QueryFile, QueryKind};
use behmm_core::ChannelKind;
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_CODES: &str = "Exit codes:
  0  success
  2  unreadable or malformed file, bad arguments
  3  invalid model or query, or a failed check
  4  oracle summand budget exceeded
  5  degenerate or undefined quantity (e.g. phi(e) = 0)
  6  internal error";

#[derive(Parser)]
#[command(name = "behmm", version, about = "Bi-entangled hidden quantum Markov model toolkit", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check complete positivity and unitality of the model's three channels
    Validate(Args),
    /// Joint expectations of operator words under the bi-entangled state
    Joint(Args),
    /// Expectations of hidden words under a single channel
    Hidden(Args),
    /// Recurrence and accessibility diagnostics for projections
    Recurrence(Args),
    /// Compare diagonal words with the classical Markov chain
    Diagonal(Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Structured,
}

#[derive(clap::Args)]
struct Args {
    /// Model file (JSON)
    #[arg(long)]
    model: PathBuf,
    /// Query file (JSON); optional for `validate`
    #[arg(long)]
    query: Option<PathBuf>,
    /// Also evaluate joint expectations by explicit index summation
    #[arg(long)]
    oracle: bool,
    /// Truncation horizon N for recurrence diagnostics [default: 20]
    #[arg(long)]
    horizon: Option<usize>,
    /// Tolerance for recurrence and diagonal checks [default: 1e-8]
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Evaluate independent words or projections on K threads
    #[arg(long, value_name = "K")]
    jobs: Option<usize>,
    /// Rescale π and the rows of Π and Q to sum to one
    #[arg(long)]
    renormalize: bool,
    /// Channel for `validate` or `hidden`: H, HO or underlying
    #[arg(long, value_parser = parse_channel)]
    channel: Option<ChannelKind>,
}

fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    ChannelKind::ALL
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown channel `{s}` (expected H, HO or underlying)"))
}

fn execute(kind: QueryKind, args: &Args) -> CliResult<(String, bool)> {
    let model = load_model(&args.model, args.renormalize)?;
    let query = match &args.query {
        Some(path) => load_query(path)?,
        None if kind == QueryKind::Validate => QueryFile::default(),
        None => {
            return Err(CliError::Parse {
                context: "arguments".into(),
                message: format!("`{}` needs --query", kind.as_str()),
            })
        }
    };
    let opts = Options {
        oracle: args.oracle,
        horizon: args.horizon,
        tol: args.tol,
        channel: args.channel,
        jobs: args.jobs,
    };
    let report = run_query(&model, kind, &query, &opts)?;
    let text = match args.format {
        Format::Table => report.to_table(),
        Format::Structured => report.to_structured(),
    };
    Ok((text, report.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Validate(a) => (QueryKind::Validate, a),
        Command::Joint(a) => (QueryKind::Joint, a),
        Command::Hidden(a) => (QueryKind::Hidden, a),
        Command::Recurrence(a) => (QueryKind::Recurrence, a),
        Command::Diagonal(a) => (QueryKind::Diagonal, a),
    };
    let code = match panic::catch_unwind(|| execute(kind, args)) {
        Ok(Ok((text, passed))) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                exit::INTERNAL
            } else if passed {
                exit::OK
            } else {
                exit::VALIDATION
            }
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => exit::INTERNAL,
    };
    ExitCode::from(code as u8)
}

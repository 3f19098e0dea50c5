mod commands;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use commands::Outcome;

const EXIT_VERIFICATION_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Plain,
    Json,
    Latex,
}

#[derive(Debug, Parser)]
#[command(
    name = "polybridge",
    version,
    about = "Exact covariances, Green functions and simulation for bridges of integrated Brownian motion"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Plain, global = true)]
    format: OutputFormat,

    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Translate between conditioning sets J and differentiating sets I.
    Map(MapArgs),
    /// Green function of the boundary value problem selected by I.
    Green(GreenArgs),
    /// Drift polynomials and covariance of the bridge conditioned on J.
    Bridge(BridgeArgs),
    /// Prediction decomposition of the bridge at time t0.
    Predict(PredictArgs),
    /// Monte Carlo check of the bridge covariance.
    Simulate(SimulateArgs),
    /// Solve v^(2n) = (-1)^n u with the boundary conditions selected by I and check the result.
    Verify(VerifyArgs),
    /// List differentiating sets.
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("set").required(true).args(["j", "i"])))]
pub struct MapArgs {
    /// Process order.
    pub n: usize,
    /// Conditioning set, e.g. "1,2".
    #[arg(long)]
    pub j: Option<String>,
    /// Differentiating set, e.g. "0,3".
    #[arg(long)]
    pub i: Option<String>,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    pub n: usize,
    #[arg(long)]
    pub i: String,
    /// Print the full comparison with the dual set.
    #[arg(long)]
    pub report: bool,
}

#[derive(Debug, Args)]
pub struct BridgeArgs {
    pub n: usize,
    #[arg(long, default_value = "")]
    pub j: String,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    pub n: usize,
    #[arg(long, default_value = "")]
    pub j: String,
    /// Present time, an integer or "p/q" in [0, 1).
    #[arg(long)]
    pub t0: String,
    /// Express the polynomials in absolute time t + t0.
    #[arg(long)]
    pub absolute: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "")]
    pub j: String,
    #[arg(long, default_value_t = 200_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Overridden by POLYBRIDGE_SEED when set.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Keep every stride-th time step.
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
    /// Use every grid-stride-th recorded interior time in the comparison.
    #[arg(long, default_value_t = 1)]
    pub grid_stride: usize,
    /// Also write the comparison grid as CSV to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub n: usize,
    #[arg(long)]
    pub i: String,
    /// Right-hand side polynomial in t, e.g. "3/2*t^2 - t + 1".
    #[arg(long)]
    pub u: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Filter {
    All,
    Admissible,
    Pairs,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Filter::All)]
    pub filter: Filter,
}

fn run(cli: &Cli) -> polybridge_core::Result<Outcome> {
    let format = cli.format;
    match &cli.command {
        Command::Map(args) => commands::map(args, format),
        Command::Green(args) => commands::green(args, format),
        Command::Bridge(args) => commands::bridge(args, format),
        Command::Predict(args) => commands::predict(args, format),
        Command::Simulate(args) => commands::simulate(args, format),
        Command::Verify(args) => commands::verify(args, format),
        Command::Enumerate(args) => commands::enumerate(args, format),
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> std::io::Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(outcome) => outcome,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Err(err) = emit(&outcome.text, cli.output.as_ref()) {
        eprintln!("error: cannot write output: {err}");
        return ExitCode::from(EXIT_USAGE);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFICATION_FAILED)
    }
}

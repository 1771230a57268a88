use std::path::PathBuf;
use std::process::ExitCode;

use chebycert::{Recursion, ShiftVariant};
use chebycert_cli::grid::GridSpec;
use chebycert_cli::{run, Command, RunConfig, Source, StrategyChoice};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Best uniform polynomial approximation on finite point sets, with
/// optimality certificates.
///
/// Exit status: 0 = optimal / check passed, 2 = not optimal / check failed,
/// 1 = error.
#[derive(Parser)]
#[command(name = "chebycert", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// More log output on stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit a minimax polynomial and report its extreme points.
    Fit(Common),
    /// Check optimality with the hull-intersection certificate.
    Verify(Common),
    /// Run the point-reduction necessary condition.
    Reduce(Common),
    /// Run the hyperplane enumeration test.
    Alternate(Common),
    /// Run every check; the exit status follows the certificate.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// CSV file with header x1,...,xd,f.
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    input: Option<PathBuf>,

    /// Generated grid "bounds;resolution;nodes;expr", e.g. "-1:1;1001;uniform;x1^3".
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,

    /// Polynomial degree.
    #[arg(long)]
    degree: u32,

    /// Relative tolerance for extreme points.
    #[arg(long, default_value_t = chebycert::DEFAULT_REL_TOL)]
    rel_tol: f64,

    #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
    strategy: StrategyArg,

    /// Shift used by the single strategy.
    #[arg(long, value_enum, default_value_t = VariantArg::Min)]
    variant: VariantArg,

    /// Hyperplane test: certificate LP at degree m-1 (one) or recursive (full).
    #[arg(long, value_enum, default_value_t = RecursionArg::One)]
    recursion: RecursionArg,

    /// Exact rational arithmetic.
    #[arg(long)]
    exact: bool,

    /// JSON file with coefficients to check instead of fitting.
    #[arg(long)]
    coeffs: Option<PathBuf>,

    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Single,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Min,
    Max,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecursionArg {
    One,
    Full,
}

fn config(command: Command, args: Common) -> anyhow::Result<RunConfig> {
    let source = match (args.input, args.grid) {
        (Some(path), _) => Source::Csv(path),
        (None, Some(spec)) => Source::Grid(spec.parse::<GridSpec>()?),
        (None, None) => anyhow::bail!("either --input or --grid is required"),
    };
    let variant = match args.variant {
        VariantArg::Min => ShiftVariant::Min,
        VariantArg::Max => ShiftVariant::Max,
    };
    let strategy = match args.strategy {
        StrategyArg::Exhaustive => StrategyChoice::Exhaustive,
        StrategyArg::Single => StrategyChoice::Single(variant),
    };
    Ok(RunConfig {
        command,
        source,
        degree: args.degree,
        rel_tol: args.rel_tol,
        strategy,
        recursion: match args.recursion {
            RecursionArg::One => Recursion::One,
            RecursionArg::Full => Recursion::Full,
        },
        exact: args.exact,
        coeffs: args.coeffs,
        out: args.out,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors exit with 1, not clap's 2, which means "not optimal" here
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();

    let (command, args) = match cli.command {
        Cmd::Fit(a) => (Command::Fit, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Reduce(a) => (Command::Reduce, a),
        Cmd::Alternate(a) => (Command::Alternate, a),
        Cmd::Report(a) => (Command::Report, a),
    };
    let result = config(command, args).and_then(|c| run(&c));
    match result {
        Ok((_, status)) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

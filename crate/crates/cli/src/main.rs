use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use geolin_cli::{run_text, Command, Format, Options, INPUT_ERROR};
use geolin_expr::ZeroTestConfig;

#[derive(Parser)]
#[command(name = "geolin", version, about = "Linearizability checks for second-order ODE systems")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Sample points per zero test.
    #[arg(long, global = true, default_value_t = 16)]
    zero_test_points: usize,
    /// Working precision of numeric evaluation.
    #[arg(long, global = true, default_value_t = 256)]
    precision_bits: usize,
    /// Relative magnitude below which a sample counts as zero.
    #[arg(long, global = true, default_value_t = 1e-30)]
    tolerance: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Gauge entry `name=expr`; overrides the [gauge] block.
    #[arg(long, global = true, value_name = "NAME=EXPR")]
    gauge: Vec<String>,
    /// Report wall-clock time (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the linearizability conditions for the document's kind.
    Check { file: PathBuf },
    /// Project a geodesic connection to its cubic equation or pair.
    Project { file: PathBuf },
    /// Lift a cubic equation or pair to a connection.
    Lift { file: PathBuf },
    /// Check that the [transformation] block maps the system to free particles.
    VerifyTransform { file: PathBuf },
    /// Check that the [metric] block is compatible with the connection.
    VerifyMetric { file: PathBuf },
    /// Curvature components of the (lifted) connection.
    Riemann { file: PathBuf },
    /// Shared-cubic coefficients of an implicit system or of a map's system.
    NormalForm { file: PathBuf },
    /// Flatness of the lift under the supplied gauge, line by line.
    Appendix { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, file) = match cli.command {
        Cmd::Check { file } => (Command::Check, file),
        Cmd::Project { file } => (Command::Project, file),
        Cmd::Lift { file } => (Command::Lift, file),
        Cmd::VerifyTransform { file } => (Command::VerifyTransform, file),
        Cmd::VerifyMetric { file } => (Command::VerifyMetric, file),
        Cmd::Riemann { file } => (Command::Riemann, file),
        Cmd::NormalForm { file } => (Command::NormalForm, file),
        Cmd::Appendix { file } => (Command::Appendix, file),
    };
    let opts = Options {
        zero_test: ZeroTestConfig {
            points: cli.zero_test_points,
            precision_bits: cli.precision_bits,
            tolerance: cli.tolerance,
            seed: cli.seed,
            ..ZeroTestConfig::default()
        },
        gauge: cli.gauge,
        timing: cli.timing,
    };
    let format = match cli.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Json => Format::Json,
    };
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            return ExitCode::from(INPUT_ERROR as u8);
        }
    };
    let (code, out) = run_text(command, &text, &opts, format);
    if code == INPUT_ERROR {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    ExitCode::from(code as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use willmore_cli::{run, Command, Overrides, EXIT_ERROR};

/// Verify comparison lemmas and Willmore-type inequalities on rotationally
/// symmetric models.
#[derive(Debug, Parser)]
#[command(name = "willmore", version)]
struct Cli {
    /// Verification to run.
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the CSV report and plot data.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative pass/fail tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Comma-separated ε values.
    #[arg(long, value_delimiter = ',')]
    eps_grid: Option<Vec<f64>>,
    /// Comma-separated b values.
    #[arg(long, value_delimiter = ',')]
    b_grid: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides =
        Overrides { out: cli.out, tol: cli.tol, p: cli.p, q: cli.q, eps_grid: cli.eps_grid, b_grid: cli.b_grid };
    let code = match run(cli.command, &cli.config, overrides) {
        Ok(summary) => {
            println!(
                "{}: {} rows, {} failing -> {}",
                cli.command,
                summary.rows,
                summary.failures,
                summary.csv.display()
            );
            summary.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    };
    ExitCode::from(code as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blockade_cli::{execute, Task};

#[derive(Parser)]
#[command(name = "blockade", version, about = "Photon-blockade sweeps written as CSV")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// g²(0) along one axis (default: Δ over [−1, 2], 101 points)
    Sweep(Common),
    /// g²(τ) at one parameter point
    Tau(Common),
    /// log10 g²(0) on a two-axis grid (default: Δ × U, 61 × 61)
    Contour(Common),
    /// g²(0) against the bath phonon number (default: n_th over [0, 1])
    Thermal(Common),
    /// g²(0) along Δ for several dephasing rates
    Dephasing(Common),
    /// Closed-form optimum and its g²(0) for each coupling
    Optimal(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file; defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// `key=value` taking precedence over the file (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (task, args) = match cli.command {
        Command::Sweep(a) => (Task::DeltaSweep, a),
        Command::Tau(a) => (Task::TauSeries, a),
        Command::Contour(a) => (Task::Contour, a),
        Command::Thermal(a) => (Task::ThermalSweep, a),
        Command::Dephasing(a) => (Task::DephasingSweep, a),
        Command::Optimal(a) => (Task::OptimalTable, a),
    };
    match execute(task, args.config.as_deref(), &args.out, &args.overrides) {
        Ok(report) => {
            let s = &report.summary;
            println!(
                "{task}: {} rows ({} failed) -> {}",
                s.rows,
                s.failed_rows,
                args.out.display()
            );
            if let (Some(v), Some(at)) = (s.min_value, &s.min_at) {
                println!("min {} = {v} at {at:?}", s.column);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

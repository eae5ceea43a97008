use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gaugelab::cli::{execute, list_scenarios, Overrides, GRID_ENV};

#[derive(Parser)]
#[command(name = "gaugelab", version, about = "Gauge-function solver and AB-phase verification runner")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks described by a TOML spec file.
    Run {
        spec: PathBuf,
        /// Grid points per axis (overrides the spec file and the environment).
        #[arg(long)]
        grid_n: Option<usize>,
        /// Residual and route-agreement tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the solution table here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the report here as well as to stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List the builtin scenarios and their parameters.
    ListScenarios,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.command {
        Command::ListScenarios => {
            print!("{}", list_scenarios());
            ExitCode::SUCCESS
        }
        Command::Run { spec, grid_n, tol, csv, report } => {
            let ov = Overrides { grid_n, tolerance: tol, csv, report };
            let env = std::env::var(GRID_ENV).ok();
            match execute(&spec, &ov, env.as_deref()) {
                Ok(out) => {
                    print!("{}", out.report.render());
                    if out.exit_code != 0 {
                        eprintln!("failing checks: {}", out.report.failing().join(", "));
                    }
                    ExitCode::from(out.exit_code as u8)
                }
                Err(e) => {
                    eprintln!("gaugelab: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}

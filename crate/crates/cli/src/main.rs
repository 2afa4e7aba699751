use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use leadcons::commands;
use leadcons::config::Mode;
use leadcons::CliError;

/// Leader-following consensus with delays: stability analysis and simulation.
///
/// CONFIG is a JSON scenario file or `builtin:<name>` with name one of
/// fig1, fig2, switched.
#[derive(Parser)]
#[command(name = "leadcons", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the stability report as JSON.
    Analyze {
        config: String,
        /// Defaults to fixed when the schedule visits a single graph.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Integrate the scenario and write the trajectory CSV.
    Simulate {
        config: String,
        #[arg(long)]
        out: PathBuf,
        /// Replaces the config's initial condition by a seeded spread.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a built-in scenario config.
    Scenario { name: String },
    /// Print PASS or FAIL for reachability, the gain threshold and the delay bound.
    Check {
        config: String,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { config, mode } => {
            let doc = commands::analyze(&commands::load(&config)?, mode)?;
            println!("{}", doc.to_json());
        }
        Command::Simulate { config, out, seed } => {
            let mut cfg = commands::load(&config)?;
            if let Some(seed) = seed {
                cfg = cfg.with_seed(seed);
            }
            let s = commands::simulate(&cfg, &out)?;
            let settle = s.settle_time.map_or("none".to_owned(), |t| format!("{t}"));
            eprintln!(
                "wrote {} rows to {}; final |err_x| = {:.3e}, |err_v| = {:.3e}, settle time {settle}",
                s.rows,
                out.display(),
                s.final_err_x,
                s.final_err_v
            );
        }
        Command::Scenario { name } => println!("{}", commands::scenario(&name)?),
        Command::Check { config, mode } => {
            let report = commands::check(&commands::load(&config)?, mode)?;
            print!("{report}");
            if !report.passed() {
                return Err(CliError::CheckFailed(report.failures()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dsm_cli::demo::{default_demo_dir, run_demo, DEMO_LENGTH};
use dsm_cli::error::EXIT_OK;
use dsm_cli::run::record_setup_failure;
use dsm_cli::{compare_runs, run_case, CaseConfig, CliError};

/// Discontinuous strain damage model: benchmark runs and comparisons.
#[derive(Debug, Parser)]
#[command(name = "dsm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a case configuration (TOML or JSON).
    Run { config: PathBuf },
    /// One-dimensional two-cycle demonstration with the center-notched beam material.
    Demo1d {
        /// Let plastic strain keep accumulating after failure.
        #[arg(long)]
        no_discontinuity: bool,
        /// Characteristic length (mm).
        #[arg(long, default_value_t = DEMO_LENGTH)]
        ell: f64,
    },
    /// Compare two run directories that used the same load program.
    Compare {
        dir_a: PathBuf,
        dir_b: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Check a case configuration and its mesh without running it.
    Validate { config: PathBuf },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config } => {
            let config = CaseConfig::load(&config)?;
            let dir = config.output_dir();
            let outcome = run_case(&config).inspect_err(|e| {
                if !matches!(e, CliError::Solver(_)) {
                    let _ = record_setup_failure(&dir, e);
                }
            })?;
            let t = &outcome.meta.totals;
            println!(
                "{}: {} increments, {} Newton iterations, {} cut-backs, peak reaction {:.4}, {:.1} s -> {}",
                config.name,
                t.increments,
                t.newton_iterations,
                t.cutbacks,
                t.peak_reaction,
                outcome.meta.wall_time_s,
                outcome.dir.display()
            );
        }
        Command::Demo1d { no_discontinuity, ell } => {
            let dir = default_demo_dir(!no_discontinuity);
            let meta = run_demo(!no_discontinuity, ell, &dir)?;
            let residual = meta.residual_strain.map_or("none".to_string(), |e| format!("{e:.6e}"));
            println!(
                "demo1d (discontinuity {}, ell {} mm): alpha {:.2}, k_c {:.4e}, residual strain at zero stress {} -> {}",
                meta.discontinuity,
                meta.length,
                meta.alpha,
                meta.k_crit,
                residual,
                dir.display()
            );
        }
        Command::Compare { dir_a, dir_b, json } => {
            let report = compare_runs(&dir_a, &dir_b)?;
            if json {
                let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Compare(e.to_string()))?;
                println!("{text}");
            } else {
                println!("{report}");
            }
        }
        Command::Validate { config } => {
            let config = CaseConfig::load(&config)?;
            let model = config.model()?;
            println!(
                "{}: valid ({} nodes, {} elements, characteristic length {:.4}..{:.4} mm, bound {:.4} mm)",
                config.name,
                model.mesh.nodes.len(),
                model.mesh.elements.len(),
                model.length_range()[0],
                model.length_range()[1],
                model.params.length_bound()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

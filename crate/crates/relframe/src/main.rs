use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relframe::{parse_scenario_with, render, run_scenario, Overrides, ReportFormat, TOLERANCE_ENV};

/// Verify relativization scenarios.
#[derive(Parser)]
#[command(name = "relframe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and resolve a scenario without running its tasks.
    Validate { file: PathBuf },
    /// Run every task of a scenario and print a report.
    Run {
        file: PathBuf,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "human", value_parser = parse_format)]
        report: ReportFormat,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print per-task wall times to standard error.
        #[arg(long)]
        timings: bool,
    },
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse()
        .map_err(|e: relframe::UnknownFormat| e.to_string())
}

const EXIT_ERROR: u8 = 2;

fn default_tolerance() -> Result<Option<f64>, String> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| format!("{TOLERANCE_ENV}={v:?} is not a number")),
        Err(_) => Ok(None),
    }
}

fn load(path: &Path, overrides: Overrides) -> Result<relframe::ScenarioSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let overrides = Overrides {
        default_tolerance: default_tolerance()?,
        ..overrides
    };
    parse_scenario_with(&text, &overrides).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { file } => match load(&file, Overrides::default()) {
            Ok(spec) => {
                println!("{}: ok, {} tasks", file.display(), spec.tasks.len());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_ERROR)
            }
        },
        Command::Run {
            file,
            tolerance,
            seed,
            report,
            out,
            timings,
        } => {
            let overrides = Overrides {
                tolerance,
                seed,
                ..Overrides::default()
            };
            let spec = match load(&file, overrides) {
                Ok(spec) => spec,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_ERROR);
                }
            };
            let result = run_scenario(&spec);
            let text = render(&result, report);
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(EXIT_ERROR);
                    }
                }
                None => print!("{text}"),
            }
            if timings {
                for e in &result.entries {
                    eprintln!("{}\t{:.3} ms", e.id, e.wall_time.as_secs_f64() * 1e3);
                }
            }
            ExitCode::from(result.exit_code() as u8)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use cpdq_lab::{load_config, run_suite, schema_json, CliError, EXIT_CHECK, EXIT_COMPUTE, EXIT_OK};

#[derive(Parser)]
#[command(
    name = "cpdq-lab",
    version,
    about = "Run cpdq-core scenarios and the acceptance suite"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario config and write report.json plus CSV series.
    Run {
        config: PathBuf,
        /// Output directory (default: the config's `output`, else out/<config stem>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance criteria and print a table.
    Suite {
        /// Criterion id (C01..C12) or module tag.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Move one tolerance to 0: `ID/check` or a whole criterion `ID`.
        #[arg(long, hide = true)]
        tighten: Option<String>,
    },
    /// Print the JSON schema of scenario configs.
    Schema,
}

fn default_out(config: &Path) -> PathBuf {
    let stem = config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    PathBuf::from("out").join(stem)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Schema => {
            println!("{}", schema_json());
            Ok(EXIT_OK)
        }
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let dir = out
                .or_else(|| cfg.raw.output.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| default_out(&config));
            let rep = cpdq_lab::scenario::run(&cfg, &dir)?;
            for c in &rep.checks {
                println!("{}", c.describe());
            }
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            println!("report: {}", dir.join("report.json").display());
            Ok(if rep.passed { EXIT_OK } else { EXIT_CHECK })
        }
        Command::Suite { filter, out, tighten } => {
            let start = Instant::now();
            let summary = run_suite(filter.as_deref(), tighten.as_deref(), out.as_deref())?;
            print!("{}", summary.table());
            println!();
            for row in &summary.rows {
                println!("{}", row.line());
            }
            let failed: Vec<&str> = summary
                .rows
                .iter()
                .filter(|r| !r.passed)
                .map(|r| r.id.as_str())
                .collect();
            println!(
                "{} of {} criteria passed in {:.2} s",
                summary.rows.len() - failed.len(),
                summary.rows.len(),
                start.elapsed().as_secs_f64()
            );
            if failed.is_empty() {
                Ok(EXIT_OK)
            } else {
                for row in summary.rows.iter().filter(|r| !r.passed) {
                    for c in row.failing() {
                        println!("failing: {}/{}", row.id, c.name);
                    }
                }
                let errored = summary.rows.iter().any(|r| r.error.is_some());
                Ok(if errored { EXIT_COMPUTE } else { EXIT_CHECK })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

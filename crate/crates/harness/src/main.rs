use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use perminv_harness::parallel::{env_threads, with_threads};
use perminv_harness::selftest::{ensure_passed, run_selftest};
use perminv_harness::{emit_plot_data, registry, run_experiment, write_jsonl, ExperimentConfig, HarnessResult};

#[derive(Parser)]
#[command(name = "perminv", about = "Seeded permutation-inversion experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// JSON lines output (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV plot data output; needs --columns.
        #[arg(long, requires = "columns")]
        csv: Option<PathBuf>,
        /// Comma-separated CSV columns.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
    },
    /// List registered experiments.
    ListExperiments,
    /// Run the built-in invariant suite.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the version.
    Version,
}

fn write_rows(rows: &[perminv_harness::ResultRow], out: Option<&PathBuf>) -> HarnessResult<()> {
    match out {
        Some(path) => write_jsonl(rows, std::fs::File::create(path)?),
        None => write_jsonl(rows, std::io::stdout().lock()),
    }
}

fn real_main(cli: Cli) -> HarnessResult<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            csv,
            columns,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let threads = env_threads()?;
            let start = Instant::now();
            let rows = with_threads(threads, || run_experiment(&cfg))??;
            eprintln!(
                "{}: {} rows in {:.2}s",
                cfg.experiment,
                rows.len(),
                start.elapsed().as_secs_f64()
            );
            write_rows(&rows, out.as_ref())?;
            if let Some(path) = csv {
                emit_plot_data(&rows, &columns, &path)?;
            }
            ensure_passed(&rows)
        }
        Command::ListExperiments => {
            for e in registry() {
                println!("{:<24} {}", e.name, e.summary);
            }
            Ok(())
        }
        Command::Selftest { seed, out } => {
            let threads = env_threads()?;
            let start = Instant::now();
            let rows = with_threads(threads, || run_selftest(seed))??;
            eprintln!("selftest: {} rows in {:.2}s", rows.len(), start.elapsed().as_secs_f64());
            write_rows(&rows, out.as_ref())?;
            ensure_passed(&rows)
        }
        Command::Version => {
            println!("perminv {}", perminv_harness::version());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

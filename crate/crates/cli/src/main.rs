use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use photodet::config::load_config;
use photodet::error::{CliError, Result};
use photodet::plot::{plot_csv, DEFAULT_COLUMNS};
use photodet::run::oracle_report;
use photodet::sweep::{figure_grid, load_sweep, run_sweep};

#[derive(Parser)]
#[command(
    version,
    about = "Instrument maps, outcome probabilities and information gain for a dissipative photodetector"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write its CSV (and SVG).
    Run {
        config: PathBuf,
        /// Also compare against the full joint model and print the residual.
        #[arg(long)]
        oracle: bool,
    },
    /// Run a batch of variations in parallel.
    Sweep {
        /// Sweep document (TOML).
        #[arg(required_unless_present = "figures")]
        config: Option<PathBuf>,
        /// Run the built-in strong/weak figure grid into this directory instead.
        #[arg(long, conflicts_with = "config")]
        figures: Option<PathBuf>,
        /// Interaction time for --figures.
        #[arg(long, default_value_t = 20.0, requires = "figures")]
        t_max: f64,
    },
    /// Render CSV columns against t as SVG.
    Plot {
        csv: PathBuf,
        /// Comma-separated column names.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_COLUMNS.map(String::from))]
        columns: Vec<String>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Parse and check a configuration without running it.
    Validate { config: PathBuf },
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn warn(cfg: &photodet::RunConfig) {
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, oracle } => {
            let cfg = load_config(&config)?;
            warn(&cfg);
            photodet::run(&cfg)?;
            eprintln!("wrote {}", cfg.csv_out.display());
            if oracle {
                let (grid, r) = oracle_report(&cfg)?;
                println!(
                    "secular_residual d={} prep={} t_max={} dt={:e}: g={:.6e} e={:.6e}",
                    cfg.d,
                    cfg.prep.name(),
                    grid.t_max,
                    grid.dt,
                    r.g,
                    r.e
                );
            }
        }
        Command::Sweep {
            config,
            figures,
            t_max,
        } => {
            let plan = match (config, figures) {
                (_, Some(dir)) => figure_grid(&dir, t_max)?,
                (Some(path), None) => load_sweep(&path)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            if let Some((_, first)) = plan.runs.first() {
                warn(first);
            }
            let manifest = run_sweep(&plan)?;
            eprintln!(
                "wrote {} runs to {}",
                manifest.runs.len(),
                plan.out_dir.display()
            );
        }
        Command::Plot { csv, columns, out } => {
            let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
            write(&out, &plot_csv(&read(&csv)?, &cols)?)?;
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            warn(&cfg);
            println!("ok");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

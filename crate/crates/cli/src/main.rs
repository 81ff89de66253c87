use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stlsq_cli::records::{read_csv_file, select};
use stlsq_cli::{fit_order, run, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "stlsq", version, about = "Space-time least-squares experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Apply the config's `paper_scale` overrides (N = 64 by default).
        #[arg(long)]
        paper_scale: bool,
    },
    /// Print the observed order of one method in an experiment CSV.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        method: String,
    },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            paper_scale,
        } => {
            let mut config = ExperimentConfig::load(&config)?;
            if paper_scale {
                config = config.into_paper_scale()?;
            }
            if out.is_some() {
                config.output_dir = out;
            }
            let records = run(&config)?;
            for r in &records {
                let iters = r.iterations.map(|i| i.to_string()).unwrap_or_default();
                println!(
                    "{:<24} {:>7} {:>12.3e} {:>6} {:>10.4}s",
                    r.method, r.param, r.error, iters, r.wall_time_s
                );
            }
        }
        Command::Fit { csv, method } => {
            let records = read_csv_file(&csv)?;
            let order = fit_order(select(&records, &method))?;
            println!("{order:.4}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use lab_cli::{list_experiments, run_to_dir, ExperimentConfig, Verdict};

#[derive(Parser)]
#[command(name = "lab", version, about = "Run Neumann-Laplacian harmonic analysis experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write report.json plus CSV tables.
    Run {
        experiment: String,
        /// JSON file overriding the shipped defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (default: out/<experiment>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List registered experiments.
    List,
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for name in list_experiments() {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { experiment, config, out, seed } => {
            let mut cfg = ExperimentConfig::load(&experiment, config.as_deref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let dir = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out").join(&experiment));
            cfg.output = Some(dir.clone());
            let rep = run_to_dir(&cfg, &dir).with_context(|| format!("experiment {experiment} failed"))?;
            for row in &rep.rows {
                match row.criterion {
                    Some(c) => println!("[{c:02}] {row}"),
                    None => println!("     {row}"),
                }
            }
            for (k, v) in &rep.fitted {
                println!("     fitted {k} = {v:.6e}");
            }
            println!("wrote {} ({:.1} s)", dir.display(), rep.wall_time_s);
            let ok = rep.rows.iter().all(|r| r.verdict != Verdict::Fail);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

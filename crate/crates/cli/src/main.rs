mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use prodcf::Error as CoreError;

const EXIT_CONFIG: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "prodcf",
    about = "Product-construction lattice constellations and compute-and-forward rate experiments",
    version
)]
struct Cli {
    /// Worker threads for Monte-Carlo blocks (outputs are identical for any
    /// value; default: hardware parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a constellation + labeling, dump the point/label table, and
    /// verify the homomorphism exhaustively.
    Constellation {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Run a Monte-Carlo achievable-rate sweep and write the CSV table.
    Rates {
        #[arg(long)]
        config: PathBuf,
        /// Master seed (mandatory: no wall-clock seeding).
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Replay the worked integer example (or a configured lattice): encode,
    /// combine with integer gains, decompose, and measure the second moment.
    LatticeDemo {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Run all golden worked examples and write a pass/fail report.
    Verify {
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
}

fn load_config<T: serde::de::DeserializeOwned>(path: &PathBuf) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<CoreError>() {
            return match core {
                CoreError::BudgetExceeded { .. } => EXIT_BUDGET,
                _ => EXIT_CONFIG,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some()
            || cause.downcast_ref::<std::io::Error>().is_some()
        {
            return EXIT_CONFIG;
        }
    }
    EXIT_CONFIG
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match &cli.command {
        Command::Constellation { config, out_dir } => {
            let cfg = load_config::<config::ConstellationConfig>(config)?;
            let ok = commands::cmd_constellation(&cfg, out_dir)?;
            Ok(if ok { 0 } else { EXIT_VERIFY })
        }
        Command::Rates {
            config,
            seed,
            out_dir,
        } => {
            let cfg = load_config::<config::RatesConfig>(config)?;
            commands::cmd_rates(&cfg, *seed, out_dir)?;
            Ok(0)
        }
        Command::LatticeDemo {
            config,
            seed,
            out_dir,
        } => {
            let cfg = match config {
                Some(path) => load_config::<config::LatticeDemoConfig>(path)?,
                None => config::LatticeDemoConfig::worked_example(),
            };
            commands::cmd_lattice_demo(&cfg, *seed, out_dir)?;
            Ok(0)
        }
        Command::Verify { out_dir } => {
            let ok = commands::cmd_verify(out_dir)?;
            Ok(if ok { 0 } else { EXIT_VERIFY })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use fockleak::config::{RawConfig, RunConfig};
use fockleak::pipeline::{run, RunError, Task};

/// Tunneling decay of trapped fermionic atom-number states.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// Configuration file (`key = value` lines, `#` comments). Defaults apply
    /// to every key left out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for the CSV files and the manifest.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Log progress (repeat for more detail).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Initial-well eigenstates (bound_states.csv; orbitals.csv with dump_orbitals).
    BoundStates,
    /// Full run for the configured N: timeseries, counting statistics, summary.
    Evolve,
    /// Short-time head only: Zeno times, parabolic fits and t_q (zeno.csv).
    Zeno,
    /// Semiclassical level rates and Γ (rates.csv).
    Rates,
    /// Full run for every N in the range (default 1..C), sharing one evolution.
    Sweep,
    /// Counting statistics p(n, t) (fcs.csv).
    Fcs,
}

fn load(cli: &Cli) -> Result<RunConfig, RunError> {
    let mut raw = match &cli.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    if matches!(cli.command, Command::Sweep) && !raw.has("n") {
        let c = RunConfig::resolve(&raw)?.trap.capacity;
        raw.set("n", format!("1..{c}"));
    }
    Ok(RunConfig::resolve(&raw)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let task = match cli.command {
        Command::BoundStates => Task::BoundStates,
        Command::Evolve => Task::Evolve,
        Command::Zeno => Task::Zeno,
        Command::Rates => Task::Rates,
        Command::Sweep => Task::Sweep,
        Command::Fcs => Task::Fcs,
    };
    let result = load(&cli).and_then(|cfg| {
        if cfg.workers > 0 {
            // Only fails if a pool already exists, which cannot happen here.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global();
        }
        run(task, &cfg, &cli.out_dir)
    });
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

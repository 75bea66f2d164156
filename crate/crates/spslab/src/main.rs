use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spslab::{Scenario, ScenarioConfig};

/// Run one spslab scenario.
#[derive(Debug, Parser)]
#[command(name = "spslab", version)]
struct Cli {
    /// Scenario name, e.g. tent-sweep or ball-symmetry.
    scenario: String,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: out/<scenario>).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; SPSLAB_WORKERS takes precedence.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> spslab::Result<u8> {
    let scenario: Scenario = cli.scenario.parse()?;
    let mut cfg = ScenarioConfig::load(&cli.config)?;
    if let Some(named) = &cfg.scenario {
        if named != scenario.name() {
            eprintln!("note: config names scenario {named:?}; running {scenario}");
        }
    }
    cfg.scenario = Some(scenario.name().to_string());
    if cli.out.is_some() {
        cfg.out = cli.out;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    if let Ok(w) = std::env::var("SPSLAB_WORKERS") {
        let w = w
            .parse::<usize>()
            .map_err(|_| spslab::Error::InvalidConfig(format!("SPSLAB_WORKERS must be a positive integer, got {w:?}")))?;
        cfg.workers = Some(w);
    }
    let report = spslab::run(&cfg)?;
    for v in &report.verdicts {
        println!("{:<13} {}: {}", format!("{:?}", v.outcome).to_lowercase(), v.name, v.detail);
    }
    Ok(report.exit_code())
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use inelastic::config::{Scenario, ScenarioConfig};
use inelastic::scenario::{exit_code, run_scenario};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    /// Classical trajectories, one CSV per speed.
    Classical,
    /// Driven-oscillator Schrödinger run: P0/P1/<y> time series.
    Partial,
    /// Entangled post-collision state and two-branch density.
    Full,
    /// Conditional probabilities and Monte Carlo measurement tallies.
    Measure,
    /// Summary table over v_list x alpha_list.
    Sweep,
    /// Cross-approach comparison report.
    Compare,
}

impl From<Command> for Scenario {
    fn from(c: Command) -> Self {
        match c {
            Command::Classical => Scenario::Classical,
            Command::Partial => Scenario::Partial,
            Command::Full => Scenario::Full,
            Command::Measure => Scenario::Measure,
            Command::Sweep => Scenario::Sweep,
            Command::Compare => Scenario::Compare,
        }
    }
}

/// Inelastic scattering of a beam particle off a harmonic oscillator.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[arg(value_enum)]
    scenario: Command,
    /// TOML configuration file; defaults apply when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// RNG seed (overrides `numerics.seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let config = match &cli.config {
        Some(path) => ScenarioConfig::from_path(path),
        None => Ok(ScenarioConfig::default()),
    };
    let outcome = config.and_then(|mut config| {
        if let Some(dir) = cli.output {
            config.output.dir = dir;
        }
        if let Some(seed) = cli.seed {
            config.numerics.seed = seed;
        }
        run_scenario(&config, Some(cli.scenario.into()))
    });
    match &outcome {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            for f in &report.failures {
                eprintln!("failed: {f}");
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&outcome) as u8)
}

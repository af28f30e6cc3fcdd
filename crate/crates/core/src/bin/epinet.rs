use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use epinet::harness::{self, ExperimentConfig, ExperimentKind, FigureName, FigureOptions};
use epinet::{Error, Result};

#[derive(Parser)]
#[command(name = "epinet", version, about = "Epidemics on weighted networks: simulation, pairwise ODEs and thresholds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the ensemble seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: the config's `output`, else `.`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a weighted network and write its edge list.
    Generate,
    /// Run a simulation ensemble.
    Simulate,
    /// Integrate the pairwise ODE system.
    Pairwise,
    /// Compare ensemble means with the pairwise ODE.
    Compare,
    /// Evaluate a threshold quantity and print one CSV line.
    R0,
    /// Sweep the endemic steady state over a range of tau.
    Steady,
    /// Reproduce a figure preset (fig1..fig7).
    Figure {
        name: Option<String>,
        /// Simulation runs per curve.
        #[arg(long)]
        runs: Option<usize>,
    },
}

fn load(cli: &Cli, kind: ExperimentKind) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None if kind == ExperimentKind::FigurePreset => ExperimentConfig::new(kind),
        None => {
            return Err(Error::Config { path: "--config".into(), reason: "a configuration file is required".into() });
        }
    };
    if let Some(declared) = cfg.kind {
        if declared != kind {
            return Err(Error::Config {
                path: "kind".into(),
                reason: format!("config declares `{}` but `{}` was requested", declared.name(), kind.name()),
            });
        }
    }
    if let Some(seed) = cli.seed {
        cfg.ensemble.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let kind = match cli.command {
        Command::Generate => ExperimentKind::Generate,
        Command::Simulate => ExperimentKind::Simulate,
        Command::Pairwise => ExperimentKind::Pairwise,
        Command::Compare => ExperimentKind::Compare,
        Command::R0 => ExperimentKind::R0,
        Command::Steady => ExperimentKind::SteadySweep,
        Command::Figure { .. } => ExperimentKind::FigurePreset,
    };
    let mut cfg = load(cli, kind)?;
    let out = cli.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    let summary = if let Command::Figure { name, runs } = &cli.command {
        if let Some(name) = name {
            cfg.figure = Some(name.clone());
        }
        if let Some(runs) = runs {
            cfg.ensemble.runs = *runs;
        }
        cfg.validate(kind)?;
        let figure = FigureName::parse(cfg.figure.as_deref().unwrap_or_default())?;
        let opts = FigureOptions { runs: cfg.ensemble.runs, seed: cfg.ensemble.seed, ..FigureOptions::default() };
        harness::reproduce_figure(figure, &out, &opts)?
    } else {
        harness::run_experiment(&cfg, kind, &out)?
    };
    if let Some(line) = &summary.headline {
        println!("{line}");
    }
    log::info!("wrote {} files and {}", summary.files.len(), summary.manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}

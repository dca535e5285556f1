use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use qdlab_cli::run::{execute, Command, Settings};
use qdlab_cli::scenario::{Scenario, PRESETS};

#[derive(Parser)]
#[command(name = "qdlab", version, about = "Quadrature domains, droplets and Hele-Shaw chains")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Boundary samples, quadrature data and univalence of the scenario's domains.
    Domain(Common),
    /// Quadrature and Schwarz identity checks.
    Check(Common),
    /// Hele-Shaw chains and perturbed droplets.
    Chain(Common),
    /// Topology reports and connectivity bounds.
    Topo(Common),
    /// Fixed points, critical orbits and model maps.
    Dyn(Common),
    /// SVG figures.
    Render(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in preset, as NAME or NAME:PARAM.
    #[arg(long)]
    preset: Option<String>,
    /// Cells per unit length (h = 1/N).
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Tolerance for quadrature identity checks.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "qdlab-out")]
    out: PathBuf,
    /// RNG seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<bool> {
    let (cmd, c) = match cli.command {
        Cmd::Domain(c) => (Command::Domain, c),
        Cmd::Check(c) => (Command::Check, c),
        Cmd::Chain(c) => (Command::Chain, c),
        Cmd::Topo(c) => (Command::Topo, c),
        Cmd::Dyn(c) => (Command::Dyn, c),
        Cmd::Render(c) => (Command::Render, c),
    };
    let sc = match (&c.scenario, &c.preset) {
        (Some(path), _) => Scenario::load(path)?,
        (None, Some(p)) => Scenario::from_preset(p)?,
        (None, None) => bail!("one of --scenario or --preset is required; presets: {}", PRESETS.join(", ")),
    };
    let settings = Settings::resolve(&sc, c.grid, c.tol, c.seed)?;
    let m = execute(cmd, &sc, settings, &c.out)?;
    for v in &m.verdicts {
        println!("{} {}", if v.pass { "PASS" } else { "FAIL" }, v.name);
    }
    println!("manifest: {}", c.out.join("manifest.json").display());
    Ok(m.pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

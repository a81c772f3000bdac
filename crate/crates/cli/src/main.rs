//! `qrg`: block renormalization group flows, concurrence curves and
//! scaling fits for the spin-1/2 XY model in one to three dimensions.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use config::{require_odd_grid, resolve_dimension, Common, FileConfig, Format};

const DEFAULT_GRID: usize = qrg_core::entanglement::DEFAULT_GRID;
const DEFAULT_J_VALUES: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];

#[derive(Debug, Parser)]
#[command(name = "qrg", version, about = "Quantum renormalization group for the spin-1/2 XY model")]
struct Cli {
    /// TOML file with defaults; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for grid sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Lattice dimension (1, 2 or 3).
    #[arg(long, global = true)]
    dim: Option<u32>,
    /// Initial exchange coupling J > 0 (default 1).
    #[arg(long, global = true, allow_negative_numbers = true)]
    j: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// RG trajectory of (gamma, J) as CSV `dim,step,gamma,j`.
    Flow {
        #[arg(long, allow_negative_numbers = true)]
        gamma0: Option<f64>,
        /// Number of RG steps (default 2).
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Concurrence and |dC/dgamma| over a uniform gamma grid.
    Concurrence {
        /// Comma-separated RG steps (default 0,1,2).
        #[arg(long, value_delimiter = ',')]
        steps: Option<Vec<usize>>,
        /// Odd number of grid points on [-1, 1] (default 2001).
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Peak scaling fits and the entanglement exponent, as JSON.
    Scaling {
        /// Comma-separated RG steps (default depends on --dim).
        #[arg(long, value_delimiter = ',')]
        steps: Option<Vec<usize>>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Ground doublet amplitudes of one block.
    Groundstate {
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
    },
    /// Roots of gamma' = gamma with their stability, as JSON.
    FixedPoints {
        #[arg(long)]
        grid: Option<usize>,
        /// Also write the gamma'(gamma) curve as CSV here.
        #[arg(long)]
        curve_out: Option<PathBuf>,
    },
    /// Concurrence over a (gamma, J) grid.
    Jsweep {
        /// Odd number of gamma points on [-1, 1] (default 21).
        #[arg(long)]
        gamma_points: Option<usize>,
        /// Comma-separated J values (default 0.1,0.5,1,2,10).
        #[arg(long, value_delimiter = ',')]
        j_values: Option<Vec<f64>>,
        /// RG steps applied before measuring (default 0).
        #[arg(long)]
        step: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("qrg-error: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qrg-error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 3 for numerical contract violations, 2 for everything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    let numerical = e
        .chain()
        .filter_map(|c| c.downcast_ref::<qrg_core::Error>())
        .any(qrg_core::Error::is_numerical_contract);
    if numerical {
        3
    } else {
        2
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let threads = cli.threads.or(file.threads);
    if threads == Some(0) {
        bail!("invalid `threads`: must be >= 1");
    }
    let common = Common {
        dimension: resolve_dimension(cli.dim, file.dim)?,
        j: cli.j.or(file.j).unwrap_or(1.0),
        out: cli.out.clone().or_else(|| file.out.clone()),
        format: cli.format.or(file.format),
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("starting thread pool")?;
    let rendered = pool.install(|| dispatch(&cli.command, &file, &common))?;

    match &common.out {
        Some(path) => std::fs::write(path, &rendered.text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(rendered.text.as_bytes())?;
            stdout.flush()?;
        }
    }
    match rendered.error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn dispatch(command: &Command, file: &FileConfig, c: &Common) -> anyhow::Result<commands::Rendered> {
    let csv_default = c.format.unwrap_or(Format::Csv);
    let json_default = c.format.unwrap_or(Format::Json);
    let dim = c.dimension;
    match command {
        Command::Flow { gamma0, steps } => {
            let Some(gamma0) = gamma0.or(file.flow.gamma0) else {
                bail!("missing required field `gamma0`");
            };
            let steps = steps.or(file.flow.steps).unwrap_or(2);
            commands::flow(dim, c.j, gamma0, steps, csv_default)
        }
        Command::Concurrence { steps, grid } => {
            let steps = steps
                .clone()
                .or_else(|| file.concurrence.steps.clone())
                .unwrap_or_else(|| vec![0, 1, 2]);
            let grid = grid.or(file.concurrence.grid).unwrap_or(DEFAULT_GRID);
            let grid = require_odd_grid("grid", grid, 5)?;
            commands::concurrence(dim, &steps, grid, csv_default)
        }
        Command::Scaling { steps, grid } => {
            let steps = steps.clone().or_else(|| file.scaling.steps.clone());
            let grid = grid.or(file.scaling.grid).unwrap_or(DEFAULT_GRID);
            let grid = require_odd_grid("grid", grid, 5)?;
            commands::scaling(dim, steps, grid, json_default)
        }
        Command::Groundstate { gamma } => {
            let Some(gamma) = gamma.or(file.groundstate.gamma) else {
                bail!("missing required field `gamma`");
            };
            commands::groundstate(dim, c.j, gamma, csv_default)
        }
        Command::FixedPoints { grid, curve_out } => {
            let grid = grid.or(file.fixed_points.grid).unwrap_or(DEFAULT_GRID);
            let curve_out = curve_out.clone().or_else(|| file.fixed_points.curve_out.clone());
            commands::fixed_points_cmd(dim, grid, curve_out.as_ref(), json_default)
        }
        Command::Jsweep { gamma_points, j_values, step } => {
            let points = gamma_points.or(file.jsweep.gamma_points).unwrap_or(21);
            let points = require_odd_grid("gamma_points", points, 3)?;
            let j_values = j_values
                .clone()
                .or_else(|| file.jsweep.j_values.clone())
                .unwrap_or_else(|| DEFAULT_J_VALUES.to_vec());
            if j_values.is_empty() {
                bail!("invalid `j_values`: at least one value required");
            }
            let step = step.or(file.jsweep.step).unwrap_or(0);
            commands::jsweep(dim, points, &j_values, step, csv_default)
        }
    }
}

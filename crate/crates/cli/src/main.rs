use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use invduel_cli::batch::run_experiment_batch;
use invduel_cli::config::parse_config;
use invduel_cli::csvio::read_trajectory;
use invduel_cli::report::{analyze_trajectories, collect_trajectory_files};
use invduel_cli::svg::{render_plot, PlotKind};
use invduel_core::equilibrium::nash_solve;

/// Two-player inventory competition: equilibrium solving and repeated-game
/// learning experiments.
#[derive(Parser)]
#[command(name = "invduel", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Nash equilibrium for a configuration
    Nash {
        #[arg(long)]
        config: PathBuf,
        /// convergence tolerance (defaults to delta/2)
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the learning simulation for every configured seed
    Run {
        #[arg(long)]
        config: PathBuf,
        /// run a single seed instead of the configured list
        #[arg(long)]
        seed: Option<u64>,
        /// override the configured stage count
        #[arg(long)]
        stages: Option<usize>,
        /// override the configured output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyze stored trajectories: rationality regions, interval
    /// contraction, and log-likelihood profiles
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// a trajectory CSV or a directory of trajectory_seed*.csv files
        #[arg(long)]
        traj: PathBuf,
        /// contraction depth
        #[arg(long, default_value_t = 50)]
        depth: usize,
        /// output directory (defaults next to the trajectories)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a trajectory CSV as an SVG chart
    Plot {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        traj: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Actions,
    Beliefs,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Nash { config, tol } => {
            let resolved = parse_config(&config)?;
            let params = &resolved.params;
            let tol = tol.unwrap_or(params.delta() / 2.0);
            let (y1, y2) = nash_solve(params, tol, 500)?;
            println!("nash: y1* = {y1:.6}, y2* = {y2:.6}");
        }
        Command::Run {
            config,
            seed,
            stages,
            out,
        } => {
            let mut resolved = parse_config(&config)?;
            if let Some(seed) = seed {
                resolved.seeds = vec![seed];
                resolved.config.seeds = Some(vec![seed]);
            }
            if let Some(stages) = stages {
                resolved.config.n_stages = stages;
                resolved.config.window = resolved.config.window.map(|w| w.min(stages));
            }
            if let Some(out) = out {
                resolved.config.out_dir = out;
            }
            let outcome = run_experiment_batch(&resolved)?;
            println!(
                "ran {} seed(s), {} stage(s) each; nash = ({:.4}, {:.4}); outputs in {}",
                outcome.summary.len(),
                resolved.config.n_stages,
                outcome.nash.0,
                outcome.nash.1,
                outcome.out_dir.display()
            );
            for (seed, err) in &outcome.failures {
                eprintln!("error: seed {seed} failed: {err}");
            }
            if !outcome.failures.is_empty() {
                anyhow::bail!("{} seed(s) failed", outcome.failures.len());
            }
        }
        Command::Analyze {
            config,
            traj,
            depth,
            out,
        } => {
            let resolved = parse_config(&config)?;
            let files = collect_trajectory_files(&traj)?;
            let out_dir = out.unwrap_or_else(|| {
                if traj.is_dir() {
                    traj.clone()
                } else {
                    traj.parent()
                        .map(PathBuf::from)
                        .unwrap_or_else(|| PathBuf::from("."))
                }
            });
            let outcome = analyze_trajectories(&resolved.params, &files, depth, &out_dir)?;
            println!(
                "analyzed {} trajectory file(s); forbidden-region hits: {}; report: {}",
                files.len(),
                outcome.violations,
                outcome.report_path.display()
            );
        }
        Command::Plot {
            config,
            traj,
            kind,
            out,
        } => {
            let resolved = parse_config(&config)?;
            let params = &resolved.params;
            let nash = nash_solve(params, params.delta() / 2.0, 500)?;
            let rows = read_trajectory(&traj)?;
            let kind = match kind {
                KindArg::Actions => PlotKind::Actions,
                KindArg::Beliefs => PlotKind::Beliefs,
            };
            let title = match kind {
                PlotKind::Actions => "actions per stage",
                PlotKind::Beliefs => "belief modes per stage",
            };
            let svg = render_plot(&rows, kind, nash, title);
            std::fs::write(&out, svg)
                .with_context(|| format!("cannot write SVG to {}", out.display()))?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

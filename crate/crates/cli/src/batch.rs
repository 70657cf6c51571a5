//! Batch execution: one simulation per seed, CSV outputs, and the
//! contraction / forbidden-region report.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};

use invduel_core::equilibrium::{contraction_report, forbidden_region, nash_solve, Interval};
use invduel_core::params::Player;
use invduel_core::sim::{convergence_metric, run_simulation, SimConfig, Trajectory};

use crate::config::{resolved_config_toml, ResolvedExperiment};
use crate::csvio::{belief_csv, summary_csv, write_trajectory, SummaryRow};
use crate::report;

#[derive(Debug)]
pub struct BatchOutcome {
    pub out_dir: PathBuf,
    pub nash: (f64, f64),
    pub summary: Vec<SummaryRow>,
    /// seeds whose simulation failed, with the error text
    pub failures: Vec<(u64, String)>,
}

pub fn trajectory_path(out_dir: &Path, seed: u64) -> PathBuf {
    out_dir.join(format!("trajectory_seed{seed}.csv"))
}

/// Runs every configured seed, writing per-seed trajectory CSVs, belief
/// snapshot CSVs (when configured), a summary CSV, the resolved config
/// echo, and the equilibrium report. Per-seed failures are collected, not
/// fatal.
pub fn run_experiment_batch(resolved: &ResolvedExperiment) -> Result<BatchOutcome> {
    let out_dir = resolved.config.out_dir.clone();
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;

    fs::write(
        out_dir.join("resolved_config.toml"),
        resolved_config_toml(resolved)?,
    )
    .context("cannot write resolved_config.toml")?;

    let params = &resolved.params;
    let nash = nash_solve(params, params.delta() / 2.0, 500)?;

    let mut summary = Vec::new();
    let mut failures = Vec::new();
    for &seed in &resolved.seeds {
        let started = Instant::now();
        let sim_config = SimConfig {
            seed,
            n_stages: resolved.config.n_stages,
            snapshot_stages: resolved.config.snapshot_stages.clone(),
            pin: None,
        };
        let trajectory = match run_simulation(params, &sim_config) {
            Ok(t) => t,
            Err(e) => {
                failures.push((seed, e.to_string()));
                continue;
            }
        };
        write_trajectory(&trajectory_path(&out_dir, seed), &trajectory)?;
        if !resolved.config.snapshot_stages.is_empty() {
            for player in [Player::One, Player::Two] {
                let path = out_dir.join(format!("belief{}_seed{seed}.csv", player.index() + 1));
                fs::write(&path, belief_csv(&trajectory, player))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
        let window = resolved.config.window.unwrap_or(50);
        summary.push(summarize(&trajectory, window, nash, started));
    }

    fs::write(out_dir.join("summary.csv"), summary_csv(&summary))
        .context("cannot write summary.csv")?;

    // equilibrium-structure report over the full prior supports
    let b1 = Interval::new(0.0, params.action_upper(Player::Two))?;
    let b2 = Interval::new(0.0, params.action_upper(Player::One))?;
    let contraction = contraction_report(params, &b1, &b2, 50)?;
    let regions = forbidden_region(params, &b1, &b2)?;
    let text = report::equilibrium_report_text(params, nash, &contraction, &regions);
    fs::write(out_dir.join("report.txt"), text).context("cannot write report.txt")?;

    Ok(BatchOutcome {
        out_dir,
        nash,
        summary,
        failures,
    })
}

fn summarize(
    trajectory: &Trajectory,
    window: usize,
    nash: (f64, f64),
    started: Instant,
) -> SummaryRow {
    let window = window.min(trajectory.records.len()).max(1);
    let tail = &trajectory.records[trajectory.records.len() - window..];
    let mean = |f: &dyn Fn(&invduel_core::sim::StageRecord) -> f64| -> f64 {
        tail.iter().map(f).sum::<f64>() / window as f64
    };
    let (mean_dev, max_dev) = convergence_metric(trajectory, window);
    SummaryRow {
        seed: trajectory.seed,
        n_stages: trajectory.records.len(),
        nash_y1: nash.0,
        nash_y2: nash.1,
        trail_mean_y1: mean(&|r| r.y1),
        trail_mean_y2: mean(&|r| r.y2),
        trail_mean_map1: mean(&|r| r.map1),
        trail_mean_map2: mean(&|r| r.map2),
        mean_dev,
        max_dev,
        belief_max_sum_dev: trajectory.hygiene.max_sum_deviation,
        belief_min_weight: trajectory.hygiene.min_weight,
        runtime_ms: started.elapsed().as_millis(),
    }
}

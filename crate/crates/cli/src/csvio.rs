//! CSV emission and parsing for trajectories, summaries, and beliefs.
//!
//! Values are written with 12 fixed decimals so re-emission is
//! byte-identical and round-trip parsing is exact at the emitted precision.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use invduel_core::params::Player;
use invduel_core::sim::Trajectory;

pub const TRAJECTORY_HEADER: &str = "stage,y1,y2,map1,map2,s1,s2,dist_to_nash";

fn fmt(v: f64) -> String {
    format!("{v:.12}")
}

/// Renders a trajectory as CSV text (header, one row per stage, trailing
/// newline).
pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * (t.records.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in &t.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.stage,
            fmt(r.y1),
            fmt(r.y2),
            fmt(r.map1),
            fmt(r.map2),
            fmt(r.s1),
            fmt(r.s2),
            fmt(r.dist_to_nash),
        ));
    }
    out
}

pub fn write_trajectory(path: &Path, t: &Trajectory) -> Result<()> {
    fs::write(path, trajectory_csv(t))
        .with_context(|| format!("cannot write trajectory to {}", path.display()))
}

/// One parsed trajectory row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub stage: usize,
    pub y1: f64,
    pub y2: f64,
    pub map1: f64,
    pub map2: f64,
    pub s1: f64,
    pub s2: f64,
    pub dist_to_nash: f64,
}

pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRAJECTORY_HEADER => {}
        other => bail!("unexpected trajectory header: {other:?}"),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            bail!("row {}: expected 8 fields, got {}", i + 2, fields.len());
        }
        let num = |j: usize| -> Result<f64> {
            fields[j]
                .parse::<f64>()
                .with_context(|| format!("row {}: bad number {:?}", i + 2, fields[j]))
        };
        rows.push(TrajectoryRow {
            stage: fields[0]
                .parse::<usize>()
                .with_context(|| format!("row {}: bad stage {:?}", i + 2, fields[0]))?,
            y1: num(1)?,
            y2: num(2)?,
            map1: num(3)?,
            map2: num(4)?,
            s1: num(5)?,
            s2: num(6)?,
            dist_to_nash: num(7)?,
        });
    }
    Ok(rows)
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read trajectory {}", path.display()))?;
    parse_trajectory_csv(&text)
}

/// Per-seed batch statistics.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub seed: u64,
    pub n_stages: usize,
    pub nash_y1: f64,
    pub nash_y2: f64,
    pub trail_mean_y1: f64,
    pub trail_mean_y2: f64,
    pub trail_mean_map1: f64,
    pub trail_mean_map2: f64,
    pub mean_dev: f64,
    pub max_dev: f64,
    pub belief_max_sum_dev: f64,
    pub belief_min_weight: f64,
    pub runtime_ms: u128,
}

pub const SUMMARY_HEADER: &str = "seed,n_stages,nash_y1,nash_y2,trail_mean_y1,trail_mean_y2,\
trail_mean_map1,trail_mean_map2,mean_dev,max_dev,belief_max_sum_dev,belief_min_weight,runtime_ms";

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let sum_dev = format!("{:e}", r.belief_max_sum_dev);
        let min_weight = format!("{:e}", r.belief_min_weight);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.seed,
            r.n_stages,
            fmt(r.nash_y1),
            fmt(r.nash_y2),
            fmt(r.trail_mean_y1),
            fmt(r.trail_mean_y2),
            fmt(r.trail_mean_map1),
            fmt(r.trail_mean_map2),
            fmt(r.mean_dev),
            fmt(r.max_dev),
            sum_dev,
            min_weight,
            r.runtime_ms,
        ));
    }
    out
}

/// Belief snapshots for one player as `stage,cell,weight` rows.
pub fn belief_csv(t: &Trajectory, player: Player) -> String {
    let mut out = String::from("stage,cell,weight\n");
    for snap in t.snapshots.iter().filter(|s| s.player == player) {
        for (i, &w) in snap.weights.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", snap.stage, i + 1, fmt(w)));
        }
    }
    out
}

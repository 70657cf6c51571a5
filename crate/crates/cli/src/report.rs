//! Text reports: equilibrium structure after a run, and post-hoc analysis
//! of stored trajectories (rationality regions, belief-mode exit, average
//! log-likelihood profiles).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use invduel_core::belief::loglik_profile;
use invduel_core::equilibrium::{
    best_response, stages_are_nested, ContractionReport, ForbiddenRegions, Interval,
};
use invduel_core::params::{GameParams, Player};

use crate::csvio::{read_trajectory, TrajectoryRow};

pub fn equilibrium_report_text(
    params: &GameParams,
    nash: (f64, f64),
    contraction: &ContractionReport,
    regions: &ForbiddenRegions,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "equilibrium report");
    let _ = writeln!(out, "==================");
    let _ = writeln!(out, "nash: y1* = {:.4}, y2* = {:.4}", nash.0, nash.1);
    let _ = writeln!(out, "grid step: {}", params.delta());
    let _ = writeln!(out);

    let _ = writeln!(
        out,
        "forbidden regions (never played, from full prior supports):"
    );
    let describe = |r: &invduel_core::equilibrium::ForbiddenRegion| -> String {
        format!(
            "{}{:.4}, {:.4}{}",
            if r.lo_open { "(" } else { "[" },
            r.lo,
            r.hi,
            if r.hi_open { ")" } else { "]" }
        )
    };
    for r in &regions.p1_actions {
        let _ = writeln!(out, "  player 1 actions: {}", describe(r));
    }
    for r in &regions.p2_actions {
        let _ = writeln!(out, "  player 2 actions: {}", describe(r));
    }
    let _ = writeln!(out);

    let _ = writeln!(
        out,
        "interval contraction (depth {}, nested: {}, converged: {}, final gap {:.6}):",
        contraction.stages.len(),
        stages_are_nested(contraction),
        contraction.converged,
        contraction.final_gap
    );
    for stage in &contraction.stages {
        let _ = writeln!(
            out,
            "  n={:<3} b1=[{:.4}, {:.4}]  b2=[{:.4}, {:.4}]  br2(b2.lo)={:.4}  br1(b1.hi)={:.4}",
            stage.n, stage.b1.lo, stage.b1.hi, stage.b2.lo, stage.b2.hi, stage.phi_hi, stage.phi_lo
        );
    }
    out
}

/// Analysis of stored trajectories against the game's rationality structure.
pub struct AnalysisOutcome {
    pub report_path: PathBuf,
    pub violations: usize,
}

/// Collects trajectory files: a single CSV, or every `trajectory_seed*.csv`
/// inside a directory.
pub fn collect_trajectory_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .with_context(|| format!("cannot read directory {}", path.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .map(|n| n.starts_with("trajectory_seed") && n.ends_with(".csv"))
                    .unwrap_or(false)
            })
            .collect();
        files.sort();
        if files.is_empty() {
            bail!("no trajectory_seed*.csv files in {}", path.display());
        }
        return Ok(files);
    }
    bail!("{} is neither a file nor a directory", path.display());
}

pub fn analyze_trajectories(
    params: &GameParams,
    trajectory_files: &[PathBuf],
    depth: usize,
    out_dir: &Path,
) -> Result<AnalysisOutcome> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;

    let nash = invduel_core::equilibrium::nash_solve(params, params.delta() / 2.0, 500)?;
    let b1 = Interval::new(0.0, params.action_upper(Player::Two))?;
    let b2 = Interval::new(0.0, params.action_upper(Player::One))?;
    let contraction = invduel_core::equilibrium::contraction_report(params, &b1, &b2, depth)?;
    let regions = invduel_core::equilibrium::forbidden_region(params, &b1, &b2)?;

    let mut out = equilibrium_report_text(params, nash, &contraction, &regions);
    let _ = writeln!(out);
    let _ = writeln!(out, "trajectory checks");
    let _ = writeln!(out, "-----------------");

    // the belief-mode exit bound: the upper cap on player 2's rational play
    let beta_bar = best_response(params, Player::Two, 0.0);
    let epsilon = 2.0 * params.delta();

    let mut violations = 0;
    for path in trajectory_files {
        let rows = read_trajectory(path)?;
        let n = rows.len();

        let mut region_hits = 0usize;
        for r in &rows {
            if regions.p2_actions.iter().any(|u| u.contains(r.y2))
                || regions.p1_actions.iter().any(|u| u.contains(r.y1))
            {
                region_hits += 1;
            }
        }
        violations += region_hits;

        // last stage at which player 1's belief mode still sat above the
        // exit bound
        let last_inside = rows
            .iter()
            .rev()
            .find(|r| r.map1 > beta_bar + epsilon)
            .map(|r| r.stage);

        let name = path.file_name().unwrap_or_default().to_string_lossy();
        let _ = writeln!(
            out,
            "  {name}: stages={n}, forbidden-region hits={region_hits}, \
             belief-mode above {beta_bar:.4}+{epsilon:.2} last at stage {}",
            last_inside.map_or("never".to_string(), |s| s.to_string()),
        );

        // average log-likelihood profiles from each player's own history
        let hist1: Vec<(f64, f64)> = rows.iter().map(|r| (r.s1, r.y1)).collect();
        let hist2: Vec<(f64, f64)> = rows.iter().map(|r| (r.s2, r.y2)).collect();
        let prof1 = loglik_profile(params, Player::One, &hist1)?;
        let prof2 = loglik_profile(params, Player::Two, &hist2)?;
        let argmax = |prof: &[f64]| -> (usize, f64) {
            let mut best = 0;
            for (i, &v) in prof.iter().enumerate() {
                if v > prof[best] {
                    best = i;
                }
            }
            (best + 1, (best as f64 + 0.5) * params.delta())
        };
        let (c1, a1) = argmax(&prof1);
        let (c2, a2) = argmax(&prof2);
        let _ = writeln!(
            out,
            "    loglik argmax: p1-about-p2 cell {c1} (action {a1:.3}), \
             p2-about-p1 cell {c2} (action {a2:.3})"
        );

        let stem = path
            .file_stem()
            .unwrap_or_default()
            .to_string_lossy()
            .replace("trajectory_", "");
        let mut csv = String::from("cell,midpoint,avg_loglik_p1_about_p2,avg_loglik_p2_about_p1\n");
        let cells = prof1.len().max(prof2.len());
        for k in 0..cells {
            let v1 = prof1.get(k).copied().unwrap_or(f64::NEG_INFINITY);
            let v2 = prof2.get(k).copied().unwrap_or(f64::NEG_INFINITY);
            let _ = writeln!(
                csv,
                "{},{:.6},{},{}",
                k + 1,
                (k as f64 + 0.5) * params.delta(),
                fmt_loglik(v1),
                fmt_loglik(v2)
            );
        }
        fs::write(out_dir.join(format!("loglik_{stem}.csv")), csv)?;
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "total forbidden-region hits: {violations}");
    let report_path = out_dir.join("analysis.txt");
    fs::write(&report_path, out).context("cannot write analysis.txt")?;
    Ok(AnalysisOutcome {
        report_path,
        violations,
    })
}

fn fmt_loglik(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.8}")
    }
}

/// Trailing means recomputed from parsed CSV rows; used to cross-check the
/// summary file.
pub fn trailing_means(rows: &[TrajectoryRow], window: usize) -> (f64, f64, f64, f64) {
    let window = window.min(rows.len()).max(1);
    let tail = &rows[rows.len() - window..];
    let n = window as f64;
    (
        tail.iter().map(|r| r.y1).sum::<f64>() / n,
        tail.iter().map(|r| r.y2).sum::<f64>() / n,
        tail.iter().map(|r| r.map1).sum::<f64>() / n,
        tail.iter().map(|r| r.map2).sum::<f64>() / n,
    )
}

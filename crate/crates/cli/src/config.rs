//! Experiment configuration: a TOML document (JSON is accepted as an
//! alternative encoding) describing the game, the grid, and the batch.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use invduel_core::demand::DemandGrid;
use invduel_core::params::{GameParams, PlayerParams};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// grid step shared by demands, actions, and beliefs
    pub delta: f64,
    pub n_stages: usize,
    /// explicit seed list; alternative to `n_seeds`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    /// shorthand for `seeds = [1, 2, .., n_seeds]`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_seeds: Option<u64>,
    /// trailing window for convergence statistics; defaults to
    /// `min(50, n_stages)`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    /// per-player action bound; defaults to the largest conceivable total
    /// demand for each player
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_upper: Option<[f64; 2]>,
    /// stages at which belief vectors are written out
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshot_stages: Vec<usize>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    pub player1: PlayerSection,
    pub player2: PlayerSection,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("runs/out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerSection {
    pub price: f64,
    pub holding_cost: f64,
    pub unit_cost: f64,
    pub spillover: f64,
    pub demand: DemandSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DemandSection {
    /// uniform on `[0, max]`
    Uniform { max: f64 },
    /// explicit cell probabilities on the `delta` grid
    Cells { probs: Vec<f64> },
}

/// A parsed configuration with every default filled in, plus the validated
/// game parameters built from it.
#[derive(Debug, Clone)]
pub struct ResolvedExperiment {
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub params: GameParams,
}

/// Reads and validates a configuration file. `.json` files are parsed as
/// JSON; anything else is parsed as TOML with a JSON fallback.
pub fn parse_config(path: &Path) -> Result<ResolvedExperiment> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let is_json = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);
    let config: ExperimentConfig = if is_json {
        serde_json::from_str(&text)
            .with_context(|| format!("invalid JSON config {}", path.display()))?
    } else {
        match toml::from_str(&text) {
            Ok(c) => c,
            Err(toml_err) => match serde_json::from_str(&text) {
                Ok(c) => c,
                Err(_) => {
                    return Err(toml_err)
                        .with_context(|| format!("invalid TOML config {}", path.display()))
                }
            },
        }
    };
    resolve(config)
}

/// Validates a configuration and builds the game parameters.
pub fn resolve(mut config: ExperimentConfig) -> Result<ResolvedExperiment> {
    if !config.delta.is_finite() || config.delta <= 0.0 {
        bail!("delta must be > 0, got {}", config.delta);
    }
    if config.n_stages == 0 {
        bail!("n_stages must be >= 1");
    }
    let seeds = match (&config.seeds, config.n_seeds) {
        (Some(list), None) if !list.is_empty() => list.clone(),
        (None, Some(n)) if n >= 1 => (1..=n).collect(),
        (Some(_), Some(_)) => bail!("set either seeds or n_seeds, not both"),
        _ => bail!("at least one seed is required (set seeds or n_seeds)"),
    };
    let window = config.window.unwrap_or_else(|| config.n_stages.min(50));
    if window == 0 || window > config.n_stages {
        bail!(
            "window must lie in 1..=n_stages (window={window}, n_stages={})",
            config.n_stages
        );
    }
    for &s in &config.snapshot_stages {
        if s == 0 || s > config.n_stages {
            bail!("snapshot stage {s} outside 1..={}", config.n_stages);
        }
    }

    let p1 = build_player(&config.player1, "player1")?;
    let p2 = build_player(&config.player2, "player2")?;
    let d1 = build_demand(&config.player1.demand, config.delta, "player1")?;
    let d2 = build_demand(&config.player2.demand, config.delta, "player2")?;

    let params = match config.action_upper {
        Some(upper) => GameParams::with_action_upper(p1, p2, d1, d2, upper)?,
        None => GameParams::new(p1, p2, d1, d2)?,
    };
    // echo resolved defaults back into the config for provenance
    config.seeds = Some(seeds.clone());
    config.n_seeds = None;
    config.window = Some(window);
    config.action_upper = Some(params.action_upper);

    Ok(ResolvedExperiment {
        config,
        seeds,
        params,
    })
}

fn build_player(section: &PlayerSection, label: &str) -> Result<PlayerParams> {
    PlayerParams::new(
        section.price,
        section.holding_cost,
        section.unit_cost,
        section.spillover,
    )
    .with_context(|| format!("{label}: invalid economic parameters"))
}

fn build_demand(section: &DemandSection, delta: f64, label: &str) -> Result<DemandGrid> {
    match section {
        DemandSection::Uniform { max } => DemandGrid::uniform(*max, delta)
            .with_context(|| format!("{label}.demand: invalid uniform distribution")),
        DemandSection::Cells { probs } => DemandGrid::from_cells(delta, probs.clone())
            .with_context(|| format!("{label}.demand: invalid cell probabilities")),
    }
}

/// Serializes the resolved config for the provenance echo.
pub fn resolved_config_toml(resolved: &ResolvedExperiment) -> Result<String> {
    toml::to_string_pretty(&resolved.config).context("cannot serialize resolved config")
}

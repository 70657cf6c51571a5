//! The repeated game: estimate, respond, realize demand, observe own sales,
//! update beliefs.
//!
//! Each player sees only their own parameters, both demand grids, and their
//! own sales history; the opponent's action reaches them through the sale
//! alone. Demand outcomes are drawn from the discretized grids (cell
//! midpoints) so realized sales live on the same lattice the likelihood
//! kernel predicts.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::belief::{likelihood_row, Belief};
use crate::demand::DemandGrid;
use crate::equilibrium::{best_response, nash_solve, ActionGrid};
use crate::params::{GameParams, Player, PlayerParams};
use crate::payoff::sales_realize;
use crate::{Error, Result};

/// Memo for best responses keyed by the exact opponent-action bits. The
/// stage loop queries only a handful of distinct MAP values, so this turns
/// the argmax sweep into a lookup.
#[derive(Debug, Default)]
pub struct BestResponseCache {
    map: HashMap<(usize, u64), f64>,
}

impl BestResponseCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, params: &GameParams, player: Player, y_opp: f64) -> f64 {
        *self
            .map
            .entry((player.index(), y_opp.to_bits()))
            .or_insert_with(|| best_response(params, player, y_opp))
    }
}

/// Everything one player is allowed to see: own economics, both demand
/// grids, and the belief over the opponent's action. Deliberately excludes
/// the opponent's costs and action history.
#[derive(Debug, Clone)]
pub struct PlayerState {
    pub id: Player,
    pub params: PlayerParams,
    pub own_demand: DemandGrid,
    pub opp_demand: DemandGrid,
    pub belief: Belief,
}

impl PlayerState {
    pub fn new(params: &GameParams, id: Player) -> Self {
        Self {
            id,
            params: *params.player(id),
            own_demand: params.demand(id).clone(),
            opp_demand: params.demand(id.other()).clone(),
            belief: Belief::uniform(ActionGrid::for_player(params, id.other())),
        }
    }
}

/// One stage of play.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub stage: usize,
    pub y1: f64,
    pub y2: f64,
    /// player 1's estimate of player 2's action
    pub map1: f64,
    /// player 2's estimate of player 1's action
    pub map2: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub s1: f64,
    pub s2: f64,
    pub dist_to_nash: f64,
    /// set when a degenerate likelihood forced the prior to be retained
    pub belief_rejected: [bool; 2],
}

/// Belief weights captured at a configured stage.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefSnapshot {
    pub stage: usize,
    pub player: Player,
    pub weights: Vec<f64>,
}

/// Worst-case belief diagnostics observed across a whole run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeliefHygiene {
    pub max_sum_deviation: f64,
    pub min_weight: f64,
}

impl Default for BeliefHygiene {
    fn default() -> Self {
        Self {
            max_sum_deviation: 0.0,
            min_weight: f64::INFINITY,
        }
    }
}

impl BeliefHygiene {
    fn absorb(&mut self, belief: &Belief) {
        self.max_sum_deviation = self.max_sum_deviation.max(belief.sum_deviation());
        self.min_weight = self.min_weight.min(belief.min_weight());
    }
}

/// Simulation settings beyond the game itself.
#[derive(Debug, Clone, Default)]
pub struct SimConfig {
    pub seed: u64,
    pub n_stages: usize,
    /// stages at which to capture both players' belief vectors
    pub snapshot_stages: Vec<usize>,
    /// pin one player to a fixed action (identification diagnostics)
    pub pin: Option<(Player, f64)>,
}

impl SimConfig {
    pub fn new(seed: u64, n_stages: usize) -> Self {
        Self {
            seed,
            n_stages,
            ..Self::default()
        }
    }
}

/// Full log of one simulated run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub seed: u64,
    pub nash: (f64, f64),
    pub records: Vec<StageRecord>,
    pub snapshots: Vec<BeliefSnapshot>,
    pub hygiene: BeliefHygiene,
}

/// Generator for one stage: substreams keyed by stage index, so diagnostics
/// inserted between stages can never perturb the demand sequence.
pub fn stage_rng(seed: u64, stage: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage as u64);
    rng
}

/// Plays one stage: each player best-responds to the mode of their belief,
/// demands realize, sales are observed, and each belief absorbs its owner's
/// sale. Returns the record and the two updated states.
pub fn stage_advance<R: Rng + ?Sized>(
    p1: &PlayerState,
    p2: &PlayerState,
    params: &GameParams,
    stage: usize,
    rng: &mut R,
    nash: (f64, f64),
    cache: &mut BestResponseCache,
) -> Result<(StageRecord, PlayerState, PlayerState)> {
    advance(p1, p2, params, stage, rng, nash, cache, None)
}

#[allow(clippy::too_many_arguments)]
fn advance<R: Rng + ?Sized>(
    p1: &PlayerState,
    p2: &PlayerState,
    params: &GameParams,
    stage: usize,
    rng: &mut R,
    nash: (f64, f64),
    cache: &mut BestResponseCache,
    pin: Option<(Player, f64)>,
) -> Result<(StageRecord, PlayerState, PlayerState)> {
    let map1 = p1.belief.map_action();
    let map2 = p2.belief.map_action();
    let mut y1 = cache.get(params, Player::One, map1);
    let mut y2 = cache.get(params, Player::Two, map2);
    match pin {
        Some((Player::One, a)) => y1 = a,
        Some((Player::Two, a)) => y2 = a,
        None => {}
    }

    // discrete demand outcomes: sampled cell, midpoint representative
    let xi1 = p1.own_demand.midpoint(p1.own_demand.sample_cell(rng));
    let xi2 = p2.own_demand.midpoint(p2.own_demand.sample_cell(rng));

    let s1 = sales_realize(y1, y2, xi1, xi2, p1.params.spillover);
    let s2 = sales_realize(y2, y1, xi2, xi1, p2.params.spillover);

    let row1 = likelihood_row(params, Player::One, s1, y1)?;
    let row2 = likelihood_row(params, Player::Two, s2, y2)?;
    let (belief1, rejected1) = match p1.belief.updated(&row1) {
        Ok(b) => (b, false),
        Err(Error::DegenerateLikelihood) => (p1.belief.clone(), true),
        Err(e) => return Err(e),
    };
    let (belief2, rejected2) = match p2.belief.updated(&row2) {
        Ok(b) => (b, false),
        Err(Error::DegenerateLikelihood) => (p2.belief.clone(), true),
        Err(e) => return Err(e),
    };

    let record = StageRecord {
        stage,
        y1,
        y2,
        map1,
        map2,
        xi1,
        xi2,
        s1,
        s2,
        dist_to_nash: (y1 - nash.0).abs().max((y2 - nash.1).abs()),
        belief_rejected: [rejected1, rejected2],
    };
    let p1_next = PlayerState {
        belief: belief1,
        ..p1.clone()
    };
    let p2_next = PlayerState {
        belief: belief2,
        ..p2.clone()
    };
    Ok((record, p1_next, p2_next))
}

/// Runs the repeated game for `config.n_stages` stages.
pub fn run_simulation(params: &GameParams, config: &SimConfig) -> Result<Trajectory> {
    if config.n_stages == 0 {
        return Err(Error::InvalidParams("n_stages must be >= 1".into()));
    }
    if let Some((_, action)) = config.pin {
        if !action.is_finite() || action < 0.0 {
            return Err(Error::InvalidParams(format!(
                "pinned action must be >= 0, got {action}"
            )));
        }
    }
    let nash = nash_solve(params, params.delta() / 2.0, 500)?;

    let mut p1 = PlayerState::new(params, Player::One);
    let mut p2 = PlayerState::new(params, Player::Two);
    let mut cache = BestResponseCache::new();
    let mut records = Vec::with_capacity(config.n_stages);
    let mut snapshots = Vec::new();
    let mut hygiene = BeliefHygiene::default();
    hygiene.absorb(&p1.belief);
    hygiene.absorb(&p2.belief);

    for stage in 1..=config.n_stages {
        let mut rng = stage_rng(config.seed, stage);
        let (record, next1, next2) = advance(
            &p1, &p2, params, stage, &mut rng, nash, &mut cache, config.pin,
        )?;
        p1 = next1;
        p2 = next2;
        hygiene.absorb(&p1.belief);
        hygiene.absorb(&p2.belief);
        if config.snapshot_stages.contains(&stage) {
            snapshots.push(BeliefSnapshot {
                stage,
                player: Player::One,
                weights: p1.belief.weights().to_vec(),
            });
            snapshots.push(BeliefSnapshot {
                stage,
                player: Player::Two,
                weights: p2.belief.weights().to_vec(),
            });
        }
        records.push(record);
    }

    Ok(Trajectory {
        seed: config.seed,
        nash,
        records,
        snapshots,
        hygiene,
    })
}

/// Trailing-window statistics of the distance to equilibrium:
/// `(mean, max)` over the last `window` stages.
///
/// Panics if `window` is zero or exceeds the trajectory length.
pub fn convergence_metric(trajectory: &Trajectory, window: usize) -> (f64, f64) {
    assert!(
        window >= 1 && window <= trajectory.records.len(),
        "window must lie in 1..={}",
        trajectory.records.len()
    );
    let tail = &trajectory.records[trajectory.records.len() - window..];
    let mean = tail.iter().map(|r| r.dist_to_nash).sum::<f64>() / window as f64;
    let max = tail
        .iter()
        .map(|r| r.dist_to_nash)
        .fold(f64::NEG_INFINITY, f64::max);
    (mean, max)
}

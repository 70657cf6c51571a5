//! Economic parameters of the two-player stocking game.

use crate::demand::DemandGrid;
use crate::{Error, Result};

/// One of the two competing players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// Zero-based index, handy for arrays keyed by player.
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Player::One => "player1",
            Player::Two => "player2",
        }
    }
}

/// Per-player economic constants.
///
/// `spillover` is the fraction of the opponent's unmet demand that switches
/// to this player.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlayerParams {
    pub price: f64,
    pub holding_cost: f64,
    pub unit_cost: f64,
    pub spillover: f64,
}

impl PlayerParams {
    pub fn new(price: f64, holding_cost: f64, unit_cost: f64, spillover: f64) -> Result<Self> {
        if !price.is_finite() || price <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "price must be > 0, got {price}"
            )));
        }
        if !holding_cost.is_finite() || holding_cost <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "holding_cost must be > 0, got {holding_cost}"
            )));
        }
        if !unit_cost.is_finite() || unit_cost <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "unit_cost must be > 0, got {unit_cost}"
            )));
        }
        if !(0.0..=1.0).contains(&spillover) {
            return Err(Error::InvalidParams(format!(
                "spillover must lie in [0, 1], got {spillover}"
            )));
        }
        if price <= unit_cost {
            // Selling below cost makes the optimal order identically zero.
            return Err(Error::InvalidParams(format!(
                "price must exceed unit_cost for the game to be profitable \
                 (price={price}, unit_cost={unit_cost})"
            )));
        }
        Ok(Self {
            price,
            holding_cost,
            unit_cost,
            spillover,
        })
    }

    /// Critical fractile (price - cost) / (price + holding cost).
    pub fn critical_fractile(&self) -> f64 {
        (self.price - self.unit_cost) / (self.price + self.holding_cost)
    }
}

/// Full description of the one-stage game: both players' economics, both
/// local demand grids, and the prior support bound on each player's action.
#[derive(Debug, Clone)]
pub struct GameParams {
    pub p1: PlayerParams,
    pub p2: PlayerParams,
    pub d1: DemandGrid,
    pub d2: DemandGrid,
    /// `action_upper[i]` bounds player i+1's actions; it is also the support
    /// of the opponent's prior belief over that player's action.
    pub action_upper: [f64; 2],
}

impl GameParams {
    /// Builds game parameters with the default action bound
    /// `a_i = D_max_i + alpha_i * D_max_j` (largest conceivable total demand).
    pub fn new(p1: PlayerParams, p2: PlayerParams, d1: DemandGrid, d2: DemandGrid) -> Result<Self> {
        let a1 = d1.max_value() + p1.spillover * d2.max_value();
        let a2 = d2.max_value() + p2.spillover * d1.max_value();
        Self::with_action_upper(p1, p2, d1, d2, [a1, a2])
    }

    pub fn with_action_upper(
        p1: PlayerParams,
        p2: PlayerParams,
        d1: DemandGrid,
        d2: DemandGrid,
        action_upper: [f64; 2],
    ) -> Result<Self> {
        if (d1.delta() - d2.delta()).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "both demand grids must share one step size (got {} and {})",
                d1.delta(),
                d2.delta()
            )));
        }
        for (i, &a) in action_upper.iter().enumerate() {
            if !a.is_finite() || a <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "action_upper[{i}] must be > 0, got {a}"
                )));
            }
        }
        Ok(Self {
            p1,
            p2,
            d1,
            d2,
            action_upper,
        })
    }

    /// Shared grid step.
    pub fn delta(&self) -> f64 {
        self.d1.delta()
    }

    pub fn player(&self, p: Player) -> &PlayerParams {
        match p {
            Player::One => &self.p1,
            Player::Two => &self.p2,
        }
    }

    /// The named player's local demand grid.
    pub fn demand(&self, p: Player) -> &DemandGrid {
        match p {
            Player::One => &self.d1,
            Player::Two => &self.d2,
        }
    }

    /// Upper bound on the named player's own actions.
    pub fn action_upper(&self, p: Player) -> f64 {
        self.action_upper[p.index()]
    }
}

//! Grid beliefs over the opponent's action and the sales-likelihood kernel.
//!
//! A belief assigns one probability to each width-`delta` cell of the
//! opponent's action range. Cell `k` stands for the playable grid action
//! `(k-1)*delta` it contains, and the likelihood of an observed sale under
//! that hypothesis is the exact probability the discretized demand model
//! assigns to the observation: demand outcomes are cell midpoints, so a
//! sale either matches `own-demand + spillover` exactly or saturates at the
//! stock level. Weights are accumulated in log space; a flat row leaves the
//! belief untouched.

use crate::equilibrium::ActionGrid;
use crate::params::{GameParams, Player};
use crate::{Error, Result};

/// Absolute tolerance for matching sales against lattice values. Sales and
/// predictions follow the same floating-point path, so this only has to
/// absorb rounding from the spillover subtraction.
const MATCH_TOL: f64 = 1e-9;

/// Per-cell likelihood of one observed sale.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodRow {
    values: Vec<f64>,
}

impl LikelihoodRow {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when every cell carries the same value (the observation is
    /// uninformative about the opponent).
    pub fn is_flat(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }
}

/// Probability vector over the opponent's action cells, maintained both in
/// linear and log space.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    grid: ActionGrid,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
}

impl Belief {
    /// Uniform prior: every cell carries `1 / M`.
    pub fn uniform(grid: ActionGrid) -> Self {
        let m = grid.n_cells();
        Self {
            grid,
            weights: vec![1.0 / m as f64; m],
            log_weights: vec![0.0; m],
        }
    }

    pub fn grid(&self) -> &ActionGrid {
        &self.grid
    }

    pub fn n_cells(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// 1-based index of the most probable cell; ties break to the smallest.
    pub fn map_cell(&self) -> usize {
        let mut best = 0;
        for (i, &lw) in self.log_weights.iter().enumerate() {
            if lw > self.log_weights[best] {
                best = i;
            }
        }
        best + 1
    }

    /// Midpoint representative of the most probable cell.
    pub fn map_action(&self) -> f64 {
        self.grid.cell_midpoint(self.map_cell())
    }

    /// `|sum(weights) - 1|`, for hygiene monitoring.
    pub fn sum_deviation(&self) -> f64 {
        (self.weights.iter().sum::<f64>() - 1.0).abs()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Bayes update: returns the posterior after multiplying in `row`.
    ///
    /// A flat row returns the prior unchanged (bit for bit). A row that
    /// zeroes every remaining cell is rejected with
    /// [`Error::DegenerateLikelihood`]; the caller keeps the prior.
    pub fn updated(&self, row: &LikelihoodRow) -> Result<Belief> {
        if row.len() != self.n_cells() {
            return Err(Error::InvalidParams(format!(
                "likelihood row has {} cells, belief has {}",
                row.len(),
                self.n_cells()
            )));
        }
        if row.is_flat() {
            return if row.values[0] > 0.0 {
                Ok(self.clone())
            } else {
                Err(Error::DegenerateLikelihood)
            };
        }

        let mut log_weights: Vec<f64> = self
            .log_weights
            .iter()
            .zip(row.values.iter())
            .map(|(&lw, &l)| {
                if l > 0.0 {
                    lw + l.ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();

        let max = log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::DegenerateLikelihood);
        }
        for lw in &mut log_weights {
            *lw -= max;
        }
        let mut weights: Vec<f64> = log_weights.iter().map(|&lw| lw.exp()).collect();
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
        Ok(Belief {
            grid: self.grid.clone(),
            weights,
            log_weights,
        })
    }
}

/// Likelihood of observing `sale` with own stock `y_self`, for every
/// hypothesis cell of the opponent's action grid.
///
/// Cell `k`'s hypothesis is the grid action `(k-1)*delta`. Under it the
/// observer's sale is `min(y_self, own-demand + spillover)` with demand
/// outcomes at cell midpoints, so an interior sale pins own demand exactly
/// given each opponent-demand cell, and a saturated sale (`sale == y_self`)
/// accumulates the probability that total demand reached the stock level.
pub fn likelihood_row(
    params: &GameParams,
    observer: Player,
    sale: f64,
    y_self: f64,
) -> Result<LikelihoodRow> {
    if sale > y_self + MATCH_TOL {
        return Err(Error::SaleExceedsStock {
            sale,
            stock: y_self,
        });
    }
    if sale < -MATCH_TOL {
        return Err(Error::InvalidParams(format!(
            "sale must be >= 0, got {sale}"
        )));
    }

    let own = params.demand(observer);
    let opp = params.demand(observer.other());
    let alpha = params.player(observer).spillover;
    let delta = own.delta();
    let n_own = own.n_cells();
    let own_cdf = own.cdf();
    let m_cells = ActionGrid::for_player(params, observer.other()).n_cells();

    let censored = sale >= y_self - MATCH_TOL;
    let mut values = vec![0.0; m_cells];

    for (k, value) in values.iter_mut().enumerate() {
        let hypothesis = k as f64 * delta; // grid action contained in cell k+1
        let mut total = 0.0;
        for m in 1..=opp.n_cells() {
            let qm = opp.cell_prob(m);
            if qm == 0.0 {
                continue;
            }
            let spill = alpha * (opp.midpoint(m) - hypothesis).max(0.0);
            if censored {
                // P(own demand + spill >= y_self)
                let threshold = y_self - spill - MATCH_TOL;
                let l_min = ((threshold / delta + 0.5).ceil().max(1.0)) as usize;
                if l_min <= n_own {
                    let below = if l_min >= 2 { own_cdf[l_min - 2] } else { 0.0 };
                    total += qm * (1.0 - below);
                }
            } else {
                // own demand midpoint must match the residual exactly
                let target = sale - spill;
                if target < -MATCH_TOL {
                    continue;
                }
                let l = (target / delta + 0.5).round() as i64;
                if l >= 1 && l as usize <= n_own {
                    let l = l as usize;
                    if (own.midpoint(l) - target).abs() <= MATCH_TOL {
                        total += qm * own.cell_prob(l);
                    }
                }
            }
        }
        *value = total;
    }

    Ok(LikelihoodRow::from_values(values))
}

/// Average log-likelihood of the opponent-action hypotheses over a sales
/// history of `(sale, own_action)` pairs. Cells inconsistent with some
/// observation carry negative infinity.
pub fn loglik_profile(
    params: &GameParams,
    observer: Player,
    history: &[(f64, f64)],
) -> Result<Vec<f64>> {
    let m_cells = ActionGrid::for_player(params, observer.other()).n_cells();
    let mut profile = vec![0.0; m_cells];
    for &(sale, y_self) in history {
        let row = likelihood_row(params, observer, sale, y_self)?;
        for (p, &l) in profile.iter_mut().zip(row.values()) {
            *p += if l > 0.0 { l.ln() } else { f64::NEG_INFINITY };
        }
    }
    let n = history.len().max(1) as f64;
    for p in &mut profile {
        *p /= n;
    }
    Ok(profile)
}

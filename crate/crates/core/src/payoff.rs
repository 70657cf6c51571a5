//! Realized payoffs, sales, and exact expected utility.

use crate::demand::DemandGrid;
use crate::params::{GameParams, Player, PlayerParams};

/// Single-stage profit given an order level and the realized total demand:
/// revenue on sold units, holding cost on leftovers, ordering cost on the
/// whole order.
pub fn payoff_realized(p: &PlayerParams, y: f64, total_demand: f64) -> f64 {
    debug_assert!(y >= 0.0 && total_demand >= 0.0);
    p.price * y.min(total_demand) - p.holding_cost * (y - total_demand).max(0.0) - p.unit_cost * y
}

/// Sales realized from own demand plus the share of the opponent's unmet
/// demand that switched over. Never exceeds own stock.
pub fn sales_realize(
    y_self: f64,
    y_opp: f64,
    xi_self: f64,
    xi_opp: f64,
    spillover_self: f64,
) -> f64 {
    debug_assert!(y_self >= 0.0 && y_opp >= 0.0 && xi_self >= 0.0 && xi_opp >= 0.0);
    y_self.min(xi_self + spillover_self * (xi_opp - y_opp).max(0.0))
}

/// Atom representation of one player's total demand, sorted by value, with
/// prefix sums so newsvendor expectations evaluate in O(log n).
#[derive(Debug, Clone)]
pub(crate) struct TotalDemandAtoms {
    values: Vec<f64>,
    /// cum_prob[i] = total probability of atoms with index < i
    cum_prob: Vec<f64>,
    /// cum_wval[i] = probability-weighted sum of atom values with index < i
    cum_wval: Vec<f64>,
}

impl TotalDemandAtoms {
    /// Exact atoms of `own-demand + spillover` with cell-midpoint
    /// representatives (no grid snapping).
    pub(crate) fn build(own: &DemandGrid, opp: &DemandGrid, spillover: f64, y_opp: f64) -> Self {
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(own.n_cells() * opp.n_cells());
        for m in 1..=opp.n_cells() {
            let qm = opp.cell_prob(m);
            if qm == 0.0 {
                continue;
            }
            let spill = spillover * (opp.midpoint(m) - y_opp).max(0.0);
            for l in 1..=own.n_cells() {
                let pl = own.cell_prob(l);
                if pl == 0.0 {
                    continue;
                }
                pairs.push((own.midpoint(l) + spill, pl * qm));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        // collapse duplicates to keep the atom list short
        let mut values = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (v, w) in pairs {
            match values.last() {
                Some(&last) if v == last => *probs.last_mut().unwrap() += w,
                _ => {
                    values.push(v);
                    probs.push(w);
                }
            }
        }

        let mut cum_prob = Vec::with_capacity(values.len() + 1);
        let mut cum_wval = Vec::with_capacity(values.len() + 1);
        let (mut cp, mut cw) = (0.0, 0.0);
        cum_prob.push(0.0);
        cum_wval.push(0.0);
        for i in 0..values.len() {
            cp += probs[i];
            cw += probs[i] * values[i];
            cum_prob.push(cp);
            cum_wval.push(cw);
        }
        Self {
            values,
            cum_prob,
            cum_wval,
        }
    }

    /// E[payoff(y, X)] for X distributed over these atoms.
    pub(crate) fn expected_payoff(&self, p: &PlayerParams, y: f64) -> f64 {
        // atoms strictly below y sell out and leave y - x on the shelf
        let i = self.values.partition_point(|&v| v < y);
        let below_p = self.cum_prob[i];
        let below_v = self.cum_wval[i];
        let total_p = *self.cum_prob.last().unwrap();
        let e_min = below_v + y * (total_p - below_p);
        let e_over = y * below_p - below_v;
        p.price * e_min - p.holding_cost * e_over - p.unit_cost * y
    }
}

/// Exact expected single-stage utility for `player` holding `y_self` against
/// an opponent holding `y_opp`: a double sum over both demand grids with
/// cell-midpoint representatives.
pub fn expected_utility(params: &GameParams, player: Player, y_self: f64, y_opp: f64) -> f64 {
    debug_assert!(y_self >= 0.0 && y_opp >= 0.0);
    let atoms = TotalDemandAtoms::build(
        params.demand(player),
        params.demand(player.other()),
        params.player(player).spillover,
        y_opp,
    );
    atoms.expected_payoff(params.player(player), y_self)
}

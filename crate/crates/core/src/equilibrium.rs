//! Best responses, Nash equilibrium, and interval-contraction diagnostics.
//!
//! Best responses are grid argmaxes of the exact expected utility. The
//! interval machinery (forbidden regions, nested contraction) mirrors how
//! mutual best responses squeeze the set of actions a rational opponent can
//! ever play.

use crate::params::{GameParams, Player};
use crate::payoff::TotalDemandAtoms;
use crate::{Error, Result};

/// Uniform grid of playable actions `{0, delta, 2*delta, ..}` covering
/// `[0, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionGrid {
    delta: f64,
    upper: f64,
    n_points: usize,
}

impl ActionGrid {
    pub fn new(upper: f64, delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 || !upper.is_finite() || upper <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "action grid needs upper > 0 and delta > 0 (got upper={upper}, delta={delta})"
            )));
        }
        // points 0..=M*delta with M = ceil(upper/delta)
        let m = (upper / delta - 1e-9).ceil() as usize;
        Ok(Self {
            delta,
            upper,
            n_points: m + 1,
        })
    }

    /// Grid for `player`'s own actions.
    pub fn for_player(params: &GameParams, player: Player) -> Self {
        Self::new(params.action_upper(player), params.delta())
            .expect("validated GameParams always yield a valid action grid")
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Number of width-`delta` cells covering `[0, upper)`.
    pub fn n_cells(&self) -> usize {
        self.n_points - 1
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.delta
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.point(i))
    }

    /// Midpoint of 1-based cell `k`.
    pub fn cell_midpoint(&self, k: usize) -> f64 {
        crate::demand::cell_midpoint(self.delta, k)
    }
}

/// Closed interval of actions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo < 0.0 {
            return Err(Error::InvalidInterval(format!(
                "need 0 <= lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo - 1e-12 <= y && y <= self.hi + 1e-12
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn is_subset_of(&self, outer: &Interval) -> bool {
        self.lo >= outer.lo - 1e-12 && self.hi <= outer.hi + 1e-12
    }
}

/// Grid argmax of expected utility against a fixed opponent action.
/// Ties break toward the smallest action.
pub fn best_response(params: &GameParams, player: Player, y_opp: f64) -> f64 {
    debug_assert!(y_opp >= 0.0);
    let atoms = TotalDemandAtoms::build(
        params.demand(player),
        params.demand(player.other()),
        params.player(player).spillover,
        y_opp,
    );
    let grid = ActionGrid::for_player(params, player);
    let own = params.player(player);
    let mut best_y = 0.0;
    let mut best_g = f64::NEG_INFINITY;
    for y in grid.points() {
        let g = atoms.expected_payoff(own, y);
        if g > best_g {
            best_g = g;
            best_y = y;
        }
    }
    best_y
}

/// Independent check on `best_response`: inverts the total-demand CDF at the
/// critical fractile and verifies the two routes agree within `2 * delta`.
/// Valid because expected utility is concave newsvendor profit.
pub fn br_fractile_check(params: &GameParams, player: Player, y_opp: f64) -> Result<f64> {
    let q = params.player(player).critical_fractile();
    let dist = crate::demand::total_demand_dist(params, player, y_opp);
    let grid = ActionGrid::for_player(params, player);
    let mut fractile = grid.point(grid.n_points - 1);
    for y in grid.points() {
        if dist.cdf_at(y) >= q - 1e-12 {
            fractile = y;
            break;
        }
    }
    let br = best_response(params, player, y_opp);
    let tolerance = 2.0 * params.delta();
    if (br - fractile).abs() > tolerance + 1e-12 {
        return Err(Error::OracleMismatch {
            best_response: br,
            fractile,
            tolerance,
        });
    }
    Ok(fractile)
}

/// Alternating best-response iteration from `start` until both actions move
/// by less than `tol`.
pub fn nash_solve_from(
    params: &GameParams,
    start: (f64, f64),
    tol: f64,
    max_iter: usize,
) -> Result<(f64, f64)> {
    if tol < params.delta() / 2.0 {
        return Err(Error::InvalidParams(format!(
            "tol must be at least delta/2 = {}, got {tol}",
            params.delta() / 2.0
        )));
    }
    let (mut y1, mut y2) = start;
    for _ in 0..max_iter {
        let next_y1 = best_response(params, Player::One, y2);
        let next_y2 = best_response(params, Player::Two, next_y1);
        if (next_y1 - y1).abs() < tol && (next_y2 - y2).abs() < tol {
            // a fixed point on the grid boundary cannot be certified as the
            // unconstrained equilibrium: the action bound is too small
            for (player, y) in [(Player::One, next_y1), (Player::Two, next_y2)] {
                let upper = params.action_upper(player);
                if y >= upper - params.delta() / 2.0 {
                    return Err(Error::InvalidParams(format!(
                        "{} hit its action bound {upper} at the fixed point; \
                         raise action_upper",
                        player.label()
                    )));
                }
            }
            return Ok((next_y1, next_y2));
        }
        y1 = next_y1;
        y2 = next_y2;
    }
    Err(Error::NoConvergence { max_iter })
}

/// Nash equilibrium via best-response iteration from the origin.
pub fn nash_solve(params: &GameParams, tol: f64, max_iter: usize) -> Result<(f64, f64)> {
    nash_solve_from(params, (0.0, 0.0), tol, max_iter)
}

/// `n`-fold alternating best-response composition: `2n - 1` applications in
/// total, the innermost and outermost both belonging to `player`. With
/// `n = 1` this is plainly `best_response(player, y_start)`; feeding it the
/// other player's equilibrium action returns `player`'s own equilibrium
/// action at every depth.
pub fn phi_compose(params: &GameParams, player: Player, y_start: f64, n: usize) -> f64 {
    let mut y = best_response(params, player, y_start);
    for _ in 1..n {
        let reply = best_response(params, player.other(), y);
        y = best_response(params, player, reply);
    }
    y
}

/// A half-open slice of actions a player provably never chooses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForbiddenRegion {
    pub lo: f64,
    pub hi: f64,
    /// open at the lower end, as in `(lo, hi]`
    pub lo_open: bool,
    /// open at the upper end, as in `[lo, hi)`
    pub hi_open: bool,
}

impl ForbiddenRegion {
    pub fn contains(&self, y: f64) -> bool {
        let above = if self.lo_open {
            y > self.lo + 1e-12
        } else {
            y >= self.lo - 1e-12
        };
        let below = if self.hi_open {
            y < self.hi - 1e-12
        } else {
            y <= self.hi + 1e-12
        };
        above && below
    }
}

/// Forbidden regions for each player's actions, derived from a pair of
/// belief-support intervals.
#[derive(Debug, Clone, Default)]
pub struct ForbiddenRegions {
    /// Slices of `b1` (support of beliefs about player 2) that player 2
    /// never plays.
    pub p2_actions: Vec<ForbiddenRegion>,
    /// Slices of `b2` that player 1 never plays.
    pub p1_actions: Vec<ForbiddenRegion>,
}

impl ForbiddenRegions {
    pub fn is_empty(&self) -> bool {
        self.p2_actions.is_empty() && self.p1_actions.is_empty()
    }
}

/// Computes the action slices ruled out by rationality when player 1 knows
/// player 2's action lies in `b1` and vice versa for `b2`.
///
/// Because best responses are nonincreasing, any best response to an action
/// in `b2` stays at or below `BR_2(b2.lo)`; actions above that (yet inside
/// `b1`) are therefore never played, and symmetrically for the lower side
/// and the other player. Degenerate intervals pinned at the equilibrium
/// produce no regions. Errors if the equilibrium lies outside an interval.
pub fn forbidden_region(
    params: &GameParams,
    b1: &Interval,
    b2: &Interval,
) -> Result<ForbiddenRegions> {
    let (y1_star, y2_star) = nash_solve(params, params.delta() / 2.0, 500)?;
    if !b1.contains(y2_star) || !b2.contains(y1_star) {
        return Err(Error::NashOutsideInterval {
            y1: y1_star,
            y2: y2_star,
        });
    }

    let mut out = ForbiddenRegions::default();
    let eps = 1e-12;

    // player 2's actions, carved out of b1
    let upper_cap = best_response(params, Player::Two, b2.lo);
    if b1.hi > upper_cap + eps {
        out.p2_actions.push(ForbiddenRegion {
            lo: upper_cap,
            hi: b1.hi,
            lo_open: true,
            hi_open: false,
        });
    }
    let lower_cap = best_response(params, Player::Two, b2.hi);
    if b1.lo < lower_cap - eps {
        out.p2_actions.push(ForbiddenRegion {
            lo: b1.lo,
            hi: lower_cap,
            lo_open: false,
            hi_open: true,
        });
    }

    // player 1's actions, carved out of b2
    let upper_cap = best_response(params, Player::One, b1.lo);
    if b2.hi > upper_cap + eps {
        out.p1_actions.push(ForbiddenRegion {
            lo: upper_cap,
            hi: b2.hi,
            lo_open: true,
            hi_open: false,
        });
    }
    let lower_cap = best_response(params, Player::One, b1.hi);
    if b2.lo < lower_cap - eps {
        out.p1_actions.push(ForbiddenRegion {
            lo: b2.lo,
            hi: lower_cap,
            lo_open: false,
            hi_open: true,
        });
    }

    Ok(out)
}

/// One step of the nested-interval construction.
#[derive(Debug, Clone, Copy)]
pub struct ContractionStage {
    pub n: usize,
    pub b1: Interval,
    pub b2: Interval,
    /// Best-response image of the current bounds; these become the next
    /// moving endpoints.
    pub phi_hi: f64,
    pub phi_lo: f64,
}

/// Trace of the idealized interval contraction together with its limit
/// behavior.
#[derive(Debug, Clone)]
pub struct ContractionReport {
    pub stages: Vec<ContractionStage>,
    pub converged: bool,
    /// Distance of the final moving endpoints from the equilibrium pair
    /// `(y2*, y1*)`.
    pub final_gap: f64,
}

/// Iterates the idealized interval map: the upper bound on player 2's
/// candidate actions becomes `BR_2` of the lower bound on player 1's, and
/// the lower bound on player 1's becomes `BR_1` of the upper bound on
/// player 2's. Slack terms are set to zero, so each interval nests inside
/// its predecessor and the moving endpoints approach `(y2*, y1*)`.
pub fn contraction_report(
    params: &GameParams,
    b1: &Interval,
    b2: &Interval,
    depth: usize,
) -> Result<ContractionReport> {
    if depth == 0 {
        return Err(Error::InvalidParams(
            "contraction depth must be >= 1".into(),
        ));
    }
    let (y1_star, y2_star) = nash_solve(params, params.delta() / 2.0, 500)?;

    let mut cur_b1 = *b1;
    let mut cur_b2 = *b2;
    let mut stages = Vec::with_capacity(depth);
    for n in 1..=depth {
        let phi_hi = best_response(params, Player::Two, cur_b2.lo);
        let phi_lo = best_response(params, Player::One, cur_b1.hi);
        stages.push(ContractionStage {
            n,
            b1: cur_b1,
            b2: cur_b2,
            phi_hi,
            phi_lo,
        });
        // min/max keep the sequence nested even when a bound is already tight
        cur_b1 = Interval {
            lo: cur_b1.lo,
            hi: cur_b1.hi.min(phi_hi),
        };
        cur_b2 = Interval {
            lo: cur_b2.lo.max(phi_lo),
            hi: cur_b2.hi,
        };
    }

    let final_gap = (cur_b1.hi - y2_star).abs().max((cur_b2.lo - y1_star).abs());
    Ok(ContractionReport {
        stages,
        converged: final_gap <= params.delta() + 1e-12,
        final_gap,
    })
}

/// Nesting check used by tests and the analysis report.
pub fn stages_are_nested(report: &ContractionReport) -> bool {
    report
        .stages
        .windows(2)
        .all(|w| w[1].b1.is_subset_of(&w[0].b1) && w[1].b2.is_subset_of(&w[0].b2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::DemandGrid;
    use crate::params::PlayerParams;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example_params() -> GameParams {
        let p1 = PlayerParams::new(4.0, 0.6, 2.0, 1.0).unwrap();
        let p2 = PlayerParams::new(4.0, 0.6, 1.0, 1.0).unwrap();
        let d = DemandGrid::uniform(1.0, 0.01).unwrap();
        GameParams::new(p1, p2, d.clone(), d).unwrap()
    }

    fn decoupled_params() -> GameParams {
        let p1 = PlayerParams::new(4.0, 0.6, 2.0, 0.0).unwrap();
        let p2 = PlayerParams::new(4.0, 0.6, 1.0, 0.0).unwrap();
        let d = DemandGrid::uniform(1.0, 0.01).unwrap();
        GameParams::new(p1, p2, d.clone(), d).unwrap()
    }

    #[test]
    fn standalone_best_responses_hit_the_fractile_cells() {
        let params = example_params();
        // opponent fully stocked, no spillover reaches us
        let br1 = best_response(&params, Player::One, 1.5);
        let br2 = best_response(&params, Player::Two, 1.5);
        assert!((br1 - 2.0 / 4.6).abs() <= 0.01, "br1={br1}");
        assert!((br2 - 3.0 / 4.6).abs() <= 0.01, "br2={br2}");
    }

    #[test]
    fn best_response_near_equilibrium() {
        let params = example_params();
        let br = best_response(&params, Player::One, 0.79);
        assert!((br - 0.45).abs() <= 0.01 + 1e-12, "br={br}");
    }

    #[test]
    fn fractile_check_agrees_everywhere_on_the_grid() {
        let params = example_params();
        for player in [Player::One, Player::Two] {
            for i in 0..=200 {
                let y_opp = i as f64 * 0.01;
                br_fractile_check(&params, player, y_opp).unwrap();
            }
        }
    }

    #[test]
    fn fractile_check_standalone_value() {
        let params = decoupled_params();
        let f = br_fractile_check(&params, Player::One, 0.3).unwrap();
        // smallest grid point whose CDF reaches 2/4.6 ~ 0.4348
        assert!((f - 0.44).abs() < 1e-12, "f={f}");
    }

    #[test]
    fn fractile_check_degenerate_margin() {
        let p1 = PlayerParams::new(4.0, 0.6, 3.999, 1.0).unwrap();
        let p2 = PlayerParams::new(4.0, 0.6, 1.0, 1.0).unwrap();
        let d = DemandGrid::uniform(1.0, 0.01).unwrap();
        let params = GameParams::new(p1, p2, d.clone(), d).unwrap();
        let f = br_fractile_check(&params, Player::One, 1.5).unwrap();
        assert!(f <= 0.01 + 1e-12, "f={f}");
    }

    #[test]
    fn nash_matches_reference_point() {
        let params = example_params();
        let (y1, y2) = nash_solve(&params, 0.005, 200).unwrap();
        assert!((y1 - 0.45).abs() <= 0.01 + 1e-12, "y1={y1}");
        assert!((y2 - 0.79).abs() <= 0.01 + 1e-12, "y2={y2}");
        // genuine fixed point on the grid
        assert_eq!(best_response(&params, Player::One, y2), y1);
        assert_eq!(best_response(&params, Player::Two, y1), y2);
    }

    #[test]
    fn nash_decoupled_equals_standalone_quantiles() {
        let params = decoupled_params();
        let (y1, y2) = nash_solve(&params, 0.005, 200).unwrap();
        assert!((y1 - 2.0 / 4.6).abs() <= 0.01);
        assert!((y2 - 3.0 / 4.6).abs() <= 0.01);
    }

    #[test]
    fn nash_is_start_independent() {
        let params = example_params();
        let reference = nash_solve(&params, 0.005, 200).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let start = (rng.gen::<f64>() * 2.0, rng.gen::<f64>() * 2.0);
            let point = nash_solve_from(&params, start, 0.005, 200).unwrap();
            assert!((point.0 - reference.0).abs() <= 0.01);
            assert!((point.1 - reference.1).abs() <= 0.01);
        }
    }

    #[test]
    fn nash_rejects_binding_action_bound() {
        let p1 = PlayerParams::new(4.0, 0.6, 2.0, 1.0).unwrap();
        let p2 = PlayerParams::new(4.0, 0.6, 1.0, 1.0).unwrap();
        let d = DemandGrid::uniform(1.0, 0.01).unwrap();
        let params = GameParams::with_action_upper(p1, p2, d.clone(), d, [0.3, 0.3]).unwrap();
        let err = nash_solve(&params, 0.005, 200).unwrap_err();
        assert!(err.to_string().contains("action bound"), "{err}");
    }

    #[test]
    fn action_grid_covers_its_upper_bound() {
        let g = ActionGrid::new(1.99, 0.01).unwrap();
        assert_eq!(g.n_points(), 200);
        assert_eq!(g.point(0), 0.0);
        assert!(g.point(g.n_points() - 1) >= 1.99 - 0.01 - 1e-12);
        // non-multiple upper still gets covered
        let g = ActionGrid::new(0.015, 0.01).unwrap();
        assert_eq!(g.n_points(), 3);
        assert!((g.point(2) - 0.02).abs() < 1e-12);
        assert_eq!(g.n_cells(), 2);
    }

    #[test]
    fn nash_rejects_too_small_tolerance() {
        let params = example_params();
        assert!(matches!(
            nash_solve(&params, 0.001, 200),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn best_response_is_nonincreasing() {
        let params = example_params();
        for player in [Player::One, Player::Two] {
            let mut prev = f64::INFINITY;
            for i in 0..=200 {
                let y_opp = i as f64 * 0.01;
                let br = best_response(&params, player, y_opp);
                assert!(
                    br <= prev + 1e-12,
                    "{player:?}: BR({y_opp}) = {br} rose above {prev}"
                );
                prev = br;
            }
        }
    }

    #[test]
    fn phi_compose_basics() {
        let params = example_params();
        assert_eq!(
            phi_compose(&params, Player::Two, 0.3, 1),
            best_response(&params, Player::Two, 0.3)
        );
        let (y1, y2) = nash_solve(&params, 0.005, 200).unwrap();
        for n in 1..=7 {
            assert_eq!(phi_compose(&params, Player::One, y2, n), y1, "n={n}");
            assert_eq!(phi_compose(&params, Player::Two, y1, n), y2, "n={n}");
        }
    }

    #[test]
    fn phi_compose_converges_to_own_equilibrium_action() {
        let params = example_params();
        let (y1, _) = nash_solve(&params, 0.005, 200).unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..=12 {
            let v = phi_compose(&params, Player::One, 2.0, n);
            let dist = (v - y1).abs();
            assert!(dist <= prev + 1e-12, "distance grew at n={n}");
            prev = dist;
        }
        assert!(prev < 0.02, "final distance {prev}");
    }

    #[test]
    fn alternating_composition_is_monotone_from_chain_start() {
        // pick bounds satisfying hi1 <= BR_2(lo2) and lo2 >= BR_1(hi1)
        let params = example_params();
        let hi1 = 0.70;
        let lo2 = 0.50;
        assert!(hi1 <= best_response(&params, Player::Two, lo2));
        assert!(lo2 >= best_response(&params, Player::One, hi1));
        // chain: hi1 <= BR2(lo2) <= BR2(BR1(hi1)) <= BR2(BR1(BR2(lo2))) <= ...
        // each term applies BR2 after BR1 to the term two places back
        let mut chain = vec![hi1, best_response(&params, Player::Two, lo2)];
        for i in 2..10 {
            let inner = best_response(&params, Player::One, chain[i - 2]);
            chain.push(best_response(&params, Player::Two, inner));
        }
        for w in chain.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "chain decreased: {:?}", chain);
        }
        let upper = params.action_upper(Player::Two);
        assert!(chain.iter().all(|&v| v <= upper + 1e-12));
    }

    #[test]
    fn forbidden_region_full_support() {
        let params = example_params();
        let b1 = Interval::new(0.0, 2.0).unwrap();
        let b2 = Interval::new(0.0, 2.0).unwrap();
        let regions = forbidden_region(&params, &b1, &b2).unwrap();
        // full-support intervals rule out both tails of each player's range
        assert_eq!(regions.p2_actions.len(), 2);
        let upper = regions.p2_actions[0];
        let br2_at_zero = best_response(&params, Player::Two, 0.0);
        assert_eq!(upper.lo, br2_at_zero);
        assert!(upper.lo_open && !upper.hi_open);
        assert_eq!(upper.hi, 2.0);
        assert!(!upper.contains(br2_at_zero));
        assert!(upper.contains(br2_at_zero + 0.01));
        assert!(upper.contains(2.0));
        let lower = regions.p2_actions[1];
        assert_eq!(lower.hi, best_response(&params, Player::Two, 2.0));
        assert!(!lower.lo_open && lower.hi_open);
        assert!(lower.contains(0.0));
        assert!(!lower.contains(lower.hi));
        // symmetric side exists as well
        assert_eq!(regions.p1_actions.len(), 2);
        assert_eq!(
            regions.p1_actions[0].lo,
            best_response(&params, Player::One, 0.0)
        );
        assert_eq!(
            regions.p1_actions[1].hi,
            best_response(&params, Player::One, 2.0)
        );
    }

    #[test]
    fn forbidden_region_degenerate_at_equilibrium() {
        let params = example_params();
        let (y1, y2) = nash_solve(&params, 0.005, 200).unwrap();
        let b1 = Interval::new(y2, y2).unwrap();
        let b2 = Interval::new(y1, y1).unwrap();
        let regions = forbidden_region(&params, &b1, &b2).unwrap();
        assert!(regions.is_empty());
    }

    #[test]
    fn forbidden_region_rejects_intervals_missing_the_nash_point() {
        let params = example_params();
        let b1 = Interval::new(0.0, 0.3).unwrap();
        let b2 = Interval::new(0.0, 2.0).unwrap();
        assert!(matches!(
            forbidden_region(&params, &b1, &b2),
            Err(Error::NashOutsideInterval { .. })
        ));
    }

    #[test]
    fn contraction_single_step_applies_one_best_response_per_side() {
        let params = example_params();
        let b1 = Interval::new(0.0, 2.0).unwrap();
        let b2 = Interval::new(0.0, 2.0).unwrap();
        let report = contraction_report(&params, &b1, &b2, 1).unwrap();
        assert_eq!(report.stages.len(), 1);
        let stage = &report.stages[0];
        assert_eq!(stage.phi_hi, best_response(&params, Player::Two, 0.0));
        assert_eq!(stage.phi_lo, best_response(&params, Player::One, 2.0));
        assert_eq!(stage.b1, b1);
        assert_eq!(stage.b2, b2);
    }

    #[test]
    fn contraction_converges_and_nests() {
        let params = example_params();
        let b1 = Interval::new(0.0, 2.0).unwrap();
        let b2 = Interval::new(0.0, 2.0).unwrap();
        let report = contraction_report(&params, &b1, &b2, 50).unwrap();
        assert!(report.final_gap < 0.02, "gap={}", report.final_gap);
        assert!(report.converged);
        assert!(stages_are_nested(&report));
        // moving endpoints settle at the equilibrium pair
        let (y1, y2) = nash_solve(&params, 0.005, 200).unwrap();
        let last = report.stages.last().unwrap();
        assert!((last.b1.hi - y2).abs() < 0.02);
        assert!((last.b2.lo - y1).abs() < 0.02);
    }
}

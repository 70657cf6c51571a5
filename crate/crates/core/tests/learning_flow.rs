//! End-to-end flow over the public API: solve the game, run the learning
//! loop, and check the trajectory against the equilibrium structure.

use invduel_core::demand::DemandGrid;
use invduel_core::equilibrium::{
    contraction_report, forbidden_region, nash_solve, stages_are_nested, Interval,
};
use invduel_core::params::{GameParams, Player, PlayerParams};
use invduel_core::sim::{convergence_metric, run_simulation, SimConfig};

fn example_params() -> GameParams {
    let p1 = PlayerParams::new(4.0, 0.6, 2.0, 1.0).unwrap();
    let p2 = PlayerParams::new(4.0, 0.6, 1.0, 1.0).unwrap();
    let d = DemandGrid::uniform(1.0, 0.01).unwrap();
    GameParams::new(p1, p2, d.clone(), d).unwrap()
}

#[test]
fn learning_settles_at_the_solved_equilibrium() {
    let params = example_params();
    let nash = nash_solve(&params, 0.005, 200).unwrap();

    let trajectory = run_simulation(&params, &SimConfig::new(1, 400)).unwrap();
    assert_eq!(trajectory.nash, nash);
    let (mean_dev, max_dev) = convergence_metric(&trajectory, 50);
    assert!(mean_dev <= 0.03, "trailing mean deviation {mean_dev}");
    assert!(max_dev <= 0.05, "trailing max deviation {max_dev}");

    // the played path respects the never-played regions derived from the
    // full prior supports
    let b1 = Interval::new(0.0, params.action_upper(Player::Two)).unwrap();
    let b2 = Interval::new(0.0, params.action_upper(Player::One)).unwrap();
    let regions = forbidden_region(&params, &b1, &b2).unwrap();
    for r in &trajectory.records {
        assert!(
            !regions.p2_actions.iter().any(|u| u.contains(r.y2)),
            "stage {}",
            r.stage
        );
        assert!(
            !regions.p1_actions.iter().any(|u| u.contains(r.y1)),
            "stage {}",
            r.stage
        );
    }

    // the interval contraction closes onto the same point
    let report = contraction_report(&params, &b1, &b2, 30).unwrap();
    assert!(stages_are_nested(&report));
    assert!(report.converged, "gap {}", report.final_gap);
    let last = report.stages.last().unwrap();
    assert!((last.b1.hi - nash.1).abs() <= 0.01);
    assert!((last.b2.lo - nash.0).abs() <= 0.01);
}

#[test]
fn belief_about_the_rival_tracks_the_rival_not_itself() {
    // asymmetric costs make the two equilibrium actions distinct, so a
    // belief aimed at the wrong target is visible: each mode must sit
    // closer to the rival's equilibrium action than to the player's own
    let params = example_params();
    let nash = nash_solve(&params, 0.005, 200).unwrap();
    for seed in [1, 6, 13] {
        let trajectory = run_simulation(&params, &SimConfig::new(seed, 500)).unwrap();
        let tail = &trajectory.records[450..];
        let mean_map1: f64 = tail.iter().map(|r| r.map1).sum::<f64>() / tail.len() as f64;
        let mean_map2: f64 = tail.iter().map(|r| r.map2).sum::<f64>() / tail.len() as f64;
        assert!(
            (mean_map1 - nash.1).abs() < (mean_map1 - nash.0).abs(),
            "seed {seed}: map1 {mean_map1} closer to own action than to the rival's"
        );
        assert!(
            (mean_map2 - nash.0).abs() < (mean_map2 - nash.1).abs(),
            "seed {seed}: map2 {mean_map2} closer to own action than to the rival's"
        );
        // and within the wander basin of the right target
        assert!(
            (mean_map1 - nash.1).abs() < 0.1,
            "seed {seed}: map1 {mean_map1}"
        );
        assert!(
            (mean_map2 - nash.0).abs() < 0.1,
            "seed {seed}: map2 {mean_map2}"
        );
    }
}

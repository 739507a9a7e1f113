//! End-to-end agreement between the closed-form averages and the
//! seeded Monte Carlo, at channel-derived and pinned error rates.
//! These are the checks that would catch a closed form and a simulator
//! drifting apart, so none of them share code paths beyond the
//! scenario definition itself.

use aoi_core::{
    avg_aoi_distributed, avg_aoi_distributed_with, avg_aoi_joint, avg_aoi_joint_with,
    locate_crossover, run_sweep, simulate_distributed, simulate_joint, ChannelParams,
    EvalOptions, Scenario, Scheme, SchemeSelection, SimResult, SimSettings, SweepSpec,
    SweptVariable,
};

fn channel3() -> ChannelParams {
    ChannelParams::new(3.0).unwrap()
}

fn scenario(sensors: u32, rate: f64) -> Scenario {
    Scenario::new(sensors, 120, 0, rate, channel3()).unwrap()
}

/// Replication noise first, with a one-percent floor so a razor-thin
/// confidence interval cannot turn sampling luck into a failure.
fn assert_sim_matches(sim: &SimResult, analytic: f64, context: &str) {
    let tol = (3.0 * sim.ci95_half_width).max(0.01 * analytic);
    let err = (sim.avg_aoi_slots - analytic).abs();
    assert!(
        err <= tol,
        "{context}: sim {} vs analytic {analytic} differs by {err} (tol {tol})",
        sim.avg_aoi_slots
    );
}

#[test]
fn joint_simulation_tracks_the_closed_form_at_channel_error_rates() {
    let settings = SimSettings {
        frames: 50_000,
        warmup_frames: 1_000,
        replications: 5,
        seed: 101,
        forced_error_rate: None,
    };
    for rate in [0.7, 0.9] {
        let sc = scenario(4, rate);
        let analytic = avg_aoi_joint(&sc).unwrap();
        let sim = simulate_joint(&sc, &settings).unwrap();
        assert_sim_matches(&sim, analytic.avg_aoi_slots, &format!("joint R={rate}"));
    }
}

#[test]
fn distributed_simulation_tracks_the_closed_form_at_channel_error_rates() {
    let settings = SimSettings {
        frames: 20_000,
        warmup_frames: 500,
        replications: 5,
        seed: 202,
        forced_error_rate: None,
    };
    for sensors in [2, 5] {
        let sc = scenario(sensors, 0.8);
        let analytic = avg_aoi_distributed(&sc).unwrap();
        let sim = simulate_distributed(&sc, &settings).unwrap();
        assert_sim_matches(
            &sim,
            analytic.avg_aoi_slots,
            &format!("distributed N={sensors}"),
        );
    }
}

#[test]
fn distributed_simulation_tracks_the_closed_form_at_pinned_error_rates() {
    for sensors in [2u32, 5] {
        for eps in [0.1, 0.5] {
            let sc = scenario(sensors, 0.8);
            let settings = SimSettings {
                frames: 20_000,
                warmup_frames: 500,
                replications: 5,
                seed: 303,
                forced_error_rate: Some(eps),
            };
            let analytic = avg_aoi_distributed_with(&sc, &EvalOptions::forced(eps)).unwrap();
            let sim = simulate_distributed(&sc, &settings).unwrap();
            assert_sim_matches(
                &sim,
                analytic.avg_aoi_slots,
                &format!("distributed N={sensors} eps={eps}"),
            );
        }
    }
    // One of those points has a hand-derived value: two sensors at a
    // pinned one-half error rate average exactly 824.5 slots.
    let sc = scenario(2, 0.8);
    let analytic = avg_aoi_distributed_with(&sc, &EvalOptions::forced(0.5)).unwrap();
    assert!((analytic.avg_aoi_slots - 824.5).abs() < 1e-9);
}

#[test]
fn joint_simulation_tracks_the_closed_form_at_pinned_error_rates() {
    for eps in [0.1, 0.4] {
        let sc = scenario(4, 0.8);
        let settings = SimSettings {
            frames: 50_000,
            warmup_frames: 1_000,
            replications: 5,
            seed: 404,
            forced_error_rate: Some(eps),
        };
        let analytic = avg_aoi_joint_with(&sc, &EvalOptions::forced(eps)).unwrap();
        let sim = simulate_joint(&sc, &settings).unwrap();
        assert_sim_matches(&sim, analytic.avg_aoi_slots, &format!("joint eps={eps}"));
    }
}

#[test]
fn single_sensor_collapses_both_schemes_to_the_same_process() {
    // With one sensor the joint packet and the round-robin frame are
    // the same object: closed forms agree to rounding error and the
    // simulators, driven by the same seed, agree bit for bit.
    let sc = scenario(1, 0.8);
    let joint = avg_aoi_joint(&sc).unwrap();
    let distributed = avg_aoi_distributed(&sc).unwrap();
    assert!((joint.avg_aoi_slots - distributed.avg_aoi_slots).abs() < 1e-12);

    let settings = SimSettings {
        frames: 30_000,
        warmup_frames: 500,
        replications: 4,
        seed: 505,
        forced_error_rate: None,
    };
    let sim_joint = simulate_joint(&sc, &settings).unwrap();
    let sim_distributed = simulate_distributed(&sc, &settings).unwrap();
    assert_eq!(sim_joint.avg_aoi_slots.to_bits(), sim_distributed.avg_aoi_slots.to_bits());
    assert_sim_matches(&sim_joint, joint.avg_aoi_slots, "single sensor");
}

#[test]
fn crossover_sits_where_the_sweep_changes_sign() {
    // Third route to the same fact: tabulate the redundancy sweep and
    // check the advantage flips exactly once, inside the bracket the
    // bisection reports.
    let base = scenario(4, 0.8);
    let crossover = locate_crossover(&base, (0, 479)).unwrap();

    let grid: Vec<f64> = (0..=11).map(|i| f64::from(i) * 40.0).collect();
    let spec = SweepSpec {
        base,
        variable: SweptVariable::Redundancy,
        grid: grid.clone(),
        schemes: SchemeSelection::Both,
        with_simulation: false,
        sim: SimSettings::default(),
    };
    let rows = run_sweep(&spec).unwrap();
    let mut flips = Vec::new();
    let mut last_sign = None;
    for pair in rows.chunks(2) {
        assert_eq!(pair[0].scheme, Scheme::Joint);
        assert_eq!(pair[1].scheme, Scheme::Distributed);
        let sign = pair[0].analytic_aoi_slots > pair[1].analytic_aoi_slots;
        if let Some(prev) = last_sign {
            if prev != sign {
                flips.push(pair[0].swept_value);
            }
        }
        last_sign = Some(sign);
    }
    assert_eq!(flips.len(), 1, "advantage should flip exactly once on this grid");
    let flip_at = flips[0];
    assert!(
        flip_at - 40.0 < crossover && crossover < flip_at,
        "bisection gave {crossover}, sweep flipped entering {flip_at}"
    );
}

use mppi_dock::cost::{CostContext, CostWeights};
use mppi_dock::geom::Vec2;
use mppi_dock::mppi::{
    compute_weights, optimize, rollout, sample_perturbations, ControlSequence, MppiConfig, MppiController,
};
use mppi_dock::par::Execution;
use mppi_dock::perception::{entry_point, DockEstimate, PerceptionFailure};
use mppi_dock::vessel::{ThrustCommand, VesselParams, VesselState};
use proptest::prelude::*;

fn dock() -> DockEstimate {
    let center = Vec2::new(10.0, -5.0);
    DockEstimate {
        center,
        entry_point: entry_point(&center, 0.0, 3.5),
        valid: true,
        failure: None,
        ..DockEstimate::invalid(0.0, PerceptionFailure::NoCluster)
    }
}

#[test]
fn sample_covariance_matches_sigma() {
    let cfg = MppiConfig {
        samples: 10_000,
        horizon: 1,
        sigma: [1.0; 4],
        ..Default::default()
    };
    let samples = sample_perturbations(&ControlSequence::zeros(1), &cfg, 1e9, 0);
    for c in 0..4 {
        let xs: Vec<f64> = samples.iter().map(|s| s.0[0].0[c]).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((0.9..=1.1).contains(&var), "channel {c}: {var}");
        assert!(mean.abs() < 0.05, "channel {c}: {mean}");
    }
}

#[test]
fn optimum_lies_in_the_sample_envelope() {
    let cfg = MppiConfig {
        samples: 64,
        horizon: 8,
        ..Default::default()
    };
    let nominal = ControlSequence(vec![ThrustCommand([3.0, -2.0, 1.0, 0.0]); 8]);
    let samples = sample_perturbations(&nominal, &cfg, 20.0, 5);
    let out = optimize(&nominal, &cfg, 20.0, 5, Execution::Sequential, |s| {
        s.0.iter().map(|u| u.0.iter().map(|x| x * x).sum::<f64>()).sum()
    });
    for t in 0..8 {
        for c in 0..4 {
            let lo = samples.iter().map(|s| s.0[t].0[c]).fold(f64::INFINITY, f64::min);
            let hi = samples.iter().map(|s| s.0[t].0[c]).fold(f64::NEG_INFINITY, f64::max);
            let u = out.sequence.0[t].0[c];
            assert!(lo - 1e-12 <= u && u <= hi + 1e-12);
        }
    }
}

#[test]
fn rollout_cost_is_the_sum_of_its_terms() {
    let params = VesselParams::default();
    let w = CostWeights::default();
    let d = dock();
    let x0 = VesselState::new(0.0, 0.0, 0.2, 0.3, 0.0, 0.05);
    let ctx = CostContext::new(&w, &params, Some(&d), &x0);
    let seq = ControlSequence(
        (0..20)
            .map(|i| ThrustCommand([5.0, 4.0, i as f64 * 0.1, -1.0]))
            .collect(),
    );
    let r = rollout(&x0, &seq, &ctx, &params, 0.05);
    assert_eq!(r.trajectory.len(), 21);
    let mut total = 0.0;
    for x in &r.trajectory[..20] {
        total += ctx.stage(x).total();
    }
    total += ctx.terminal(&r.trajectory[20]).total();
    assert!((r.cost - total).abs() < 1e-9 * total.max(1.0));
    assert!((r.breakdown.total() - r.cost).abs() < 1e-9 * total.max(1.0));
}

#[test]
fn repeated_updates_reduce_a_quadratic_cost() {
    let target = [6.0, -4.0, 2.0, 10.0];
    let cost = |s: &ControlSequence| -> f64 {
        s.0.iter()
            .map(|u| u.0.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
            .sum()
    };
    let cfg = MppiConfig {
        samples: 256,
        horizon: 10,
        lambda: 20.0,
        ..Default::default()
    };
    let mut nominal = ControlSequence::zeros(10);
    let start = cost(&nominal);
    for i in 0..50 {
        nominal = optimize(&nominal, &cfg, 20.0, i, Execution::Sequential, cost).sequence;
    }
    assert!(cost(&nominal) < 0.05 * start, "{} vs {start}", cost(&nominal));
}

#[cfg(feature = "parallel")]
#[test]
fn result_is_independent_of_worker_count() {
    use mppi_dock::mppi::solve;

    let params = VesselParams::default();
    let w = CostWeights::default();
    let d = dock();
    let x0 = VesselState::new(0.0, 0.0, 0.2, 0.3, 0.0, 0.05);
    let ctx = CostContext::new(&w, &params, Some(&d), &x0);
    let cfg = MppiConfig {
        samples: 128,
        horizon: 20,
        seed: 11,
        ..Default::default()
    };
    let nominal = ControlSequence::zeros(20);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| solve(&x0, &nominal, &ctx, &cfg, &params, 3, Execution::Parallel))
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, solve(&x0, &nominal, &ctx, &cfg, &params, 3, Execution::Sequential));
}

#[test]
fn controller_warm_starts_and_counts_steps() {
    let params = VesselParams::default();
    let w = CostWeights::default();
    let d = dock();
    let x0 = VesselState::at_rest(0.0, 0.0, 0.0);
    let ctx = CostContext::new(&w, &params, Some(&d), &x0);
    let cfg = MppiConfig {
        samples: 32,
        horizon: 10,
        ..Default::default()
    };
    let mut c = MppiController::new(cfg).unwrap().with_execution(Execution::Sequential);
    let out = c.control(&x0, &ctx, &params);
    assert_eq!(c.step_index, 1);
    assert_eq!(c.nominal, out.next_nominal);
    assert!(out.command.0.iter().all(|t| t.abs() <= params.t_max));
}

proptest! {
    #[test]
    fn weights_form_a_distribution(costs in prop::collection::vec(0.0..1e3f64, 1..100), lambda in 1e-3..10.0f64) {
        let w = compute_weights(&costs, lambda);
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(w.iter().all(|x| (0.0..=1.0).contains(x)));
        for i in 0..costs.len() {
            for j in 0..costs.len() {
                if costs[i] < costs[j] {
                    prop_assert!(w[i] >= w[j]);
                }
            }
        }
    }
}

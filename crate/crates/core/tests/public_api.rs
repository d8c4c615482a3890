use std::collections::HashSet;

use rand::Rng;
use rglab::connectivity::{brute_force_k_connected, is_connected, is_k_connected, remove_nodes, survives_node_failures};
use rglab::experiments::{run_resilience_trials, sweep_experiment, with_workers, ExperimentConfig, Sweep};
use rglab::generators::{gen_er, gen_object_rings_uniform, graph_from_rings};
use rglab::rng::trial_rng;
use rglab::theory::{edge_prob_overlap, solve_critical, threshold_density, Axis, ModelParams};
use statrs::function::factorial::ln_binomial;

/// Hypergeometric tail in floating point via log-binomials.
fn overlap_float(k: u64, p: u64, d: u64) -> f64 {
    let ln_total = ln_binomial(p, k);
    (d..=k)
        .filter(|&u| k - u <= p - k)
        .map(|u| (ln_binomial(k, u) + ln_binomial(p - k, k - u) - ln_total).exp())
        .sum()
}

#[test]
fn critical_ring_size_matches_linear_scan() {
    let base = ModelParams::new(1000, 36, 10_000, 2, 1.0, 1.0).unwrap();
    let target = threshold_density(1000, 0);
    // K below d = 2 is outside the domain, so the scan starts at 2.
    let scanned = (2..=200u64)
        .find(|&k| overlap_float(k, 10_000, 2) >= target)
        .unwrap();
    let crit = solve_critical(Axis::K, &base, 0).unwrap();
    assert!(crit.feasible);
    assert_eq!(crit.value as u64, scanned);
    assert_eq!(scanned, 36);
}

#[test]
fn overlap_matches_float_route_at_desk_scale() {
    for &(k, p, d) in &[(36u64, 10_000u64, 2u64), (100, 10_000, 2), (20, 500, 3), (5, 9, 2)] {
        let exact = edge_prob_overlap(k, p, d).unwrap().value;
        let float = overlap_float(k, p, d);
        assert!((exact - float).abs() < 1e-10 * exact.max(1e-300), "{k} {p} {d}: {exact} vs {float}");
    }
}

#[test]
fn k_connectivity_agrees_with_oracle_on_intersection_graphs() {
    for trial in 0..120 {
        let mut rng = trial_rng(404, trial);
        let n = rng.random_range(2..=9usize);
        let p = rng.random_range(4..=14u64);
        let k = rng.random_range(1..=p.min(6));
        let d = rng.random_range(1..=k.min(2));
        let rings = gen_object_rings_uniform(n, k, p, &mut rng).unwrap();
        let g = graph_from_rings(&rings, d);
        for kk in 1..=n {
            assert_eq!(
                is_k_connected(&g, kk),
                brute_force_k_connected(&g, kk).unwrap(),
                "trial {trial}, k = {kk}: {:?}",
                g.edges()
            );
        }
    }
}

#[test]
fn node_failure_resilience_matches_explicit_removal() {
    for trial in 0..80 {
        let mut rng = trial_rng(505, trial);
        let n = rng.random_range(3..=9usize);
        let g = gen_er(n, 0.6, &mut rng).unwrap();
        for m in 0..=2usize.min(n - 2) {
            // Every set of exactly m victims, enumerated as bitmasks.
            let all_survive = (0u32..1 << n)
                .filter(|mask| mask.count_ones() as usize == m)
                .all(|mask| {
                    let victims: HashSet<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
                    is_connected(&remove_nodes(&g, &victims))
                });
            assert_eq!(survives_node_failures(&g, m), all_survive, "trial {trial}, m = {m}");
        }
    }
}

#[test]
fn sweep_rows_do_not_depend_on_worker_count() {
    let cfg = ExperimentConfig {
        params: ModelParams::new(120, 8, 400, 1, 1.0, 0.8).unwrap(),
        m: 1,
        trials: 40,
        base_seed: 9,
        sweep: Some(Sweep {
            axis: Axis::G,
            values: vec![0.4, 0.7, 1.0],
        }),
    };
    let strip = |mut rows: Vec<rglab::experiments::ExperimentResult>| {
        for r in &mut rows {
            r.wall_time = 0.0;
        }
        rows
    };
    let one = strip(with_workers(1, || sweep_experiment(&cfg)).unwrap());
    let three = strip(with_workers(3, || sweep_experiment(&cfg)).unwrap());
    assert_eq!(one, three);
    assert_eq!(one.len(), 3);
    assert!(one.iter().all(|r| r.critical.map(|c| c.axis) == Some(Axis::G)));
}

#[test]
fn complete_regime_always_survives() {
    let cfg = ExperimentConfig {
        params: ModelParams::new(30, 5, 5, 2, 1.0, 1.0).unwrap(),
        m: 3,
        trials: 1,
        base_seed: 0,
        sweep: None,
    };
    let r = run_resilience_trials(&cfg).unwrap();
    assert_eq!(r.successes, 1);
}

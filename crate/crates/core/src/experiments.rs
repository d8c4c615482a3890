//! Monte-Carlo harness: resilience trials, parameter sweeps and statistical
//! checks of the constructions behind the zero-one law.
//!
//! Trial `i` of an experiment with base seed `s` always draws from stream
//! `(s, i)`, and results are aggregated as counts, so every report is
//! bit-identical whatever the number of worker threads.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::connectivity::{is_k_connected, min_degree_at_least, survives_node_failures};
use crate::error::{invalid, Result};
use crate::generators::{coupling_threshold_x, gen_coupled_pair, gen_er, gen_model_graph, CouplingThreshold};
use crate::graph::GraphTopology;
use crate::rng::{derived_seed, trial_rng};
use crate::stats::{chi_square_gof, tv_distance_to_pmf, wilson_interval, Z_95};
use crate::theory::{
    alpha_from_params, check_regime, edge_prob_model, poisson_degree_mean, poisson_pmf,
    predicted_limit_prob, solve_critical, Axis, CriticalValue, ModelParams, RegimeCheck,
};

/// Default slack `ε_z` between the model edge probability and the
/// Erdős–Rényi comparison graph in [`dominance_test`].
pub const DEFAULT_DOMINANCE_SLACK: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub axis: Axis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    /// Failure budget: success means connected after any `m` node failures.
    pub m: u64,
    pub trials: u64,
    pub base_seed: u64,
    pub sweep: Option<Sweep>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return invalid(format!("sweep over {} has no values", sweep.axis));
            }
            for &v in &sweep.values {
                apply_axis(&self.params, self.m, sweep.axis, v)?;
            }
        }
        Ok(())
    }
}

/// Parameters with one axis replaced by `value`.
pub fn apply_axis(params: &ModelParams, m: u64, axis: Axis, value: f64) -> Result<(ModelParams, u64)> {
    if axis.is_integer() && (value.fract() != 0.0 || value < 0.0 || !value.is_finite()) {
        return invalid(format!("{axis} = {value} must be a non-negative integer"));
    }
    let mut out = *params;
    let mut budget = m;
    match axis {
        Axis::G => out.link_survival = value,
        Axis::F => out.friendship = value,
        Axis::N => out.n = value as usize,
        Axis::M => budget = value as u64,
        Axis::K => out.ring_size = value as u64,
        Axis::P => out.pool_size = value as u64,
    }
    out.validate()?;
    Ok((out, budget))
}

/// One row of an experiment: a single parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub sweep_param: Option<Axis>,
    pub sweep_value: Option<f64>,
    pub params: ModelParams,
    pub m: u64,
    pub trials: u64,
    pub successes: u64,
    pub empirical_prob: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `None` when `n < 3`.
    pub alpha: Option<f64>,
    pub predicted_limit: Option<f64>,
    pub critical: Option<CriticalValue>,
    pub seed: u64,
    pub wall_time: f64,
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Counts trials `i ∈ 0..trials` for which `trial(i)` holds, in parallel.
fn count_successes<F>(trials: u64, trial: F) -> Result<u64>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| trial(i).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Estimates `P[model graph survives any m node failures]`.
pub fn run_resilience_trials(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let m = cfg.m as usize;
    run_trials_with(cfg, |g| survives_node_failures(g, m))
}

/// Like [`run_resilience_trials`] with an arbitrary success predicate.
pub fn run_trials_with<F>(cfg: &ExperimentConfig, success: F) -> Result<ExperimentResult>
where
    F: Fn(&GraphTopology) -> bool + Sync,
{
    cfg.params.validate()?;
    if cfg.trials == 0 {
        return invalid("trials must be at least 1");
    }
    let start = Instant::now();
    let successes = count_successes(cfg.trials, |i| {
        let mut rng = trial_rng(cfg.base_seed, i);
        gen_model_graph(&cfg.params, &mut rng).map(|g| success(&g))
    })?;
    let (ci_low, ci_high) = wilson_interval(successes, cfg.trials, Z_95);
    let alpha = if cfg.params.n >= 3 {
        Some(alpha_from_params(&cfg.params, cfg.m)?)
    } else {
        None
    };
    Ok(ExperimentResult {
        sweep_param: None,
        sweep_value: None,
        params: cfg.params,
        m: cfg.m,
        trials: cfg.trials,
        successes,
        empirical_prob: successes as f64 / cfg.trials as f64,
        ci_low,
        ci_high,
        alpha,
        predicted_limit: alpha.map(|a| predicted_limit_prob(a, cfg.m)),
        critical: None,
        seed: cfg.base_seed,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// One row per sweep value. Every point reuses the base seed, so
/// neighbouring points are driven by the same random streams. Each row
/// carries the critical value of the swept axis computed at the base
/// parameters.
pub fn sweep_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentResult>> {
    cfg.validate()?;
    let Some(sweep) = &cfg.sweep else {
        return Ok(vec![run_resilience_trials(cfg)?]);
    };
    let critical = solve_critical(sweep.axis, &cfg.params, cfg.m).ok();
    sweep
        .values
        .iter()
        .map(|&value| {
            let (params, m) = apply_axis(&cfg.params, cfg.m, sweep.axis, value)?;
            let point = ExperimentConfig {
                params,
                m,
                sweep: None,
                ..cfg.clone()
            };
            let mut row = run_resilience_trials(&point)?;
            row.sweep_param = Some(sweep.axis);
            row.sweep_value = Some(value);
            row.critical = critical;
            Ok(row)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeLawRow {
    pub h: u64,
    /// Poisson mean `λ_{n,h}` for the number of degree-`h` nodes.
    pub lambda: f64,
    pub empirical_mean: f64,
    pub empirical_var: f64,
    pub tv_distance: f64,
    pub chi_square: Option<f64>,
    pub chi_square_dof: Option<usize>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeLawReport {
    pub n: usize,
    pub t: f64,
    pub trials: u64,
    pub regime: Vec<RegimeCheck>,
    /// Set when `n t` is far from `ln n`, where the Poisson law is not
    /// expected to hold.
    pub regime_guard: Option<String>,
    pub rows: Vec<DegreeLawRow>,
}

/// Degrees pooled by this test.
pub const DEGREE_LAW_MAX_H: u64 = 3;

/// Compares, for `h = 0..=3`, the law of the number of degree-`h` nodes
/// across trials with `Poisson(λ_{n,h})`.
pub fn degree_law_test(params: &ModelParams, trials: u64, base_seed: u64) -> Result<DegreeLawReport> {
    params.validate()?;
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    let t = edge_prob_model(params)?;
    let n = params.n;
    let per_trial: Vec<[usize; DEGREE_LAW_MAX_H as usize + 1]> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(base_seed, i);
            let hist = gen_model_graph(params, &mut rng)?.degree_histogram();
            let mut counts = [0usize; DEGREE_LAW_MAX_H as usize + 1];
            for (h, slot) in counts.iter_mut().enumerate() {
                *slot = hist.count(h);
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;

    let ln_n = (n as f64).ln();
    let ratio = n as f64 * t / ln_n;
    let regime_guard = (!(0.5..=2.0).contains(&ratio)).then(|| {
        format!(
            "n*t = {:.4} is far from ln n = {:.4}; the Poisson degree law is not expected to hold here",
            n as f64 * t,
            ln_n
        )
    });

    let rows = (0..=DEGREE_LAW_MAX_H)
        .map(|h| {
            let sample: Vec<usize> = per_trial.iter().map(|c| c[h as usize]).collect();
            let lambda = poisson_degree_mean(n, t, h);
            let len = sample.len() as f64;
            let mean = sample.iter().sum::<usize>() as f64 / len;
            let var = if sample.len() > 1 {
                sample.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (len - 1.0)
            } else {
                0.0
            };
            let pmf = |v: usize| poisson_pmf(lambda, v as u64);
            let chi = chi_square_gof(&sample, pmf, 5.0);
            DegreeLawRow {
                h,
                lambda,
                empirical_mean: mean,
                empirical_var: var,
                tv_distance: tv_distance_to_pmf(&sample, pmf),
                chi_square: chi.map(|c| c.0),
                chi_square_dof: chi.map(|c| c.1),
                p_value: chi.map(|c| c.2),
            }
        })
        .collect();

    Ok(DegreeLawReport {
        n,
        t,
        trials,
        regime: check_regime(params),
        regime_guard,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub k: u64,
    pub t: f64,
    /// Edge probability of the comparison graph, `t (1 − ε_z)`.
    pub z: f64,
    pub trials: u64,
    pub model_successes: u64,
    pub er_successes: u64,
    pub model_prob: f64,
    pub er_prob: f64,
    pub model_ci: (f64, f64),
    pub er_ci: (f64, f64),
    /// `model_prob − er_prob`.
    pub difference: f64,
    /// Twice the sum of both Wilson half-widths.
    pub allowance: f64,
    pub holds: bool,
}

/// Checks `P[model k-connected] ≥ P[G(n, z) k-connected]` up to sampling
/// error, with `z = t (1 − slack)`. Trial `i` of both estimates uses the
/// same stream index.
pub fn dominance_test(
    params: &ModelParams,
    trials: u64,
    k: u64,
    slack: f64,
    base_seed: u64,
) -> Result<DominanceReport> {
    params.validate()?;
    if trials == 0 || k == 0 {
        return invalid("trials and k must be at least 1");
    }
    if !(0.0..=1.0).contains(&slack) {
        return invalid(format!("slack {slack} must lie in [0, 1]"));
    }
    let t = edge_prob_model(params)?;
    let z = t * (1.0 - slack);
    let k_us = k as usize;
    let er_seed = derived_seed(base_seed, 0xE7);
    let model_successes = count_successes(trials, |i| {
        let g = gen_model_graph(params, &mut trial_rng(base_seed, i))?;
        Ok(is_k_connected(&g, k_us))
    })?;
    let er_successes = count_successes(trials, |i| {
        let g = gen_er(params.n, z, &mut trial_rng(er_seed, i))?;
        Ok(is_k_connected(&g, k_us))
    })?;
    let model_ci = wilson_interval(model_successes, trials, Z_95);
    let er_ci = wilson_interval(er_successes, trials, Z_95);
    let model_prob = model_successes as f64 / trials as f64;
    let er_prob = er_successes as f64 / trials as f64;
    let half = |ci: (f64, f64)| (ci.1 - ci.0) / 2.0;
    let allowance = 2.0 * (half(model_ci) + half(er_ci));
    Ok(DominanceReport {
        k,
        t,
        z,
        trials,
        model_successes,
        er_successes,
        model_prob,
        er_prob,
        model_ci,
        er_ci,
        difference: model_prob - er_prob,
        allowance,
        holds: model_prob >= er_prob - allowance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub k: u64,
    pub trials: u64,
    /// Trials with minimum degree at least `k` that are not `k`-connected.
    pub events: u64,
    pub frequency: f64,
    pub ci: (f64, f64),
}

/// Minimum degree at least `k` yet not `k`-connected.
pub fn is_gap_event(g: &GraphTopology, k: usize) -> bool {
    min_degree_at_least(g, k) && !is_k_connected(g, k)
}

/// Gap frequency over an explicit collection of graphs.
pub fn gap_frequency<'a, I>(graphs: I, k: u64) -> GapReport
where
    I: IntoIterator<Item = &'a GraphTopology>,
{
    let (mut trials, mut events) = (0u64, 0u64);
    for g in graphs {
        trials += 1;
        events += u64::from(is_gap_event(g, k as usize));
    }
    gap_report(k, trials, events)
}

fn gap_report(k: u64, trials: u64, events: u64) -> GapReport {
    GapReport {
        k,
        trials,
        events,
        frequency: if trials == 0 { 0.0 } else { events as f64 / trials as f64 },
        ci: wilson_interval(events, trials, Z_95),
    }
}

/// Frequency of the gap event on model samples.
pub fn gap_test(params: &ModelParams, trials: u64, k: u64, base_seed: u64) -> Result<GapReport> {
    params.validate()?;
    if trials == 0 || k == 0 {
        return invalid("trials and k must be at least 1");
    }
    if params.n >= 500 && k > 3 {
        return invalid(format!("k = {k} exceeds 3, the limit for n >= 500"));
    }
    let events = count_successes(trials, |i| {
        let g = gen_model_graph(params, &mut trial_rng(base_seed, i))?;
        Ok(is_gap_event(&g, k as usize))
    })?;
    Ok(gap_report(k, trials, events))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub threshold: CouplingThreshold,
    pub trials: u64,
    pub valid: u64,
    pub rate: f64,
    /// Valid trials whose binomial graph was not contained in the uniform
    /// one. Always zero unless the construction is broken.
    pub containment_violations: u64,
}

pub fn coupling_validity_rate(
    n: usize,
    k: u64,
    p: u64,
    d: u64,
    trials: u64,
    base_seed: u64,
) -> Result<CouplingReport> {
    let threshold = coupling_threshold_x(k, p, n)?;
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    let outcomes: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let pair = gen_coupled_pair(n, k, p, d, &mut trial_rng(base_seed, i))?;
            let contained = pair.binomial.is_subgraph_of(&pair.uniform);
            Ok((pair.coupling_valid, contained))
        })
        .collect::<Result<_>>()?;
    let valid = outcomes.iter().filter(|o| o.0).count() as u64;
    let containment_violations = outcomes.iter().filter(|o| o.0 && !o.1).count() as u64;
    Ok(CouplingReport {
        threshold,
        trials,
        valid,
        rate: valid as f64 / trials as f64,
        containment_violations,
    })
}

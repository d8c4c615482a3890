//! Edge probabilities, the resilience scaling law and its limits, the Poisson
//! degree law, regime advisories and critical-parameter solvers.
//!
//! A pair of nodes is adjacent in the full model with probability
//! `t = f · g · s(K, P, d)`, where `s` is the probability that two uniform
//! `K`-subsets of a `P`-pool share at least `d` elements. Writing
//! `t = (ln n + m ln ln n + α) / n`, the probability that the graph stays
//! connected after any `m` node failures tends to `exp(-e^{-α} / m!)`.

use num::bigint::BigInt;
use num::{BigRational, BigUint, One, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use crate::error::{invalid, Result};

/// Parameters of the interest-based social network model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    /// Number of nodes.
    pub n: usize,
    /// Objects per ring (`K`).
    pub ring_size: u64,
    /// Objects in the pool (`P`).
    pub pool_size: u64,
    /// Minimum number of shared objects for an edge (`d`).
    pub min_overlap: u64,
    /// Friendship probability (`f`).
    pub friendship: f64,
    /// Link survival probability (`g`).
    pub link_survival: f64,
}

impl ModelParams {
    pub fn new(
        n: usize,
        ring_size: u64,
        pool_size: u64,
        min_overlap: u64,
        friendship: f64,
        link_survival: f64,
    ) -> Result<Self> {
        let params = Self {
            n,
            ring_size,
            pool_size,
            min_overlap,
            friendship,
            link_survival,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return invalid(format!("n = {} must be at least 2", self.n));
        }
        validate_overlap_args(self.ring_size, self.pool_size, self.min_overlap)?;
        for (name, v) in [("f", self.friendship), ("g", self.link_survival)] {
            if !(0.0..=1.0).contains(&v) {
                return invalid(format!("{name} = {v} must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// Combined friendship and link-survival probability `p = f · g`.
    pub fn link_prob(&self) -> f64 {
        self.friendship * self.link_survival
    }
}

fn validate_overlap_args(k: u64, p: u64, d: u64) -> Result<()> {
    if k == 0 {
        return invalid("K must be at least 1");
    }
    if k > p {
        return invalid(format!("K exceeds P ({k} > {p})"));
    }
    if d == 0 || d > k {
        return invalid(format!("d = {d} must satisfy 1 <= d <= K = {k}"));
    }
    Ok(())
}

/// Exact binomial coefficient.
pub fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `s(K, P, d)` as an exact reduced fraction together with its nearest float.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapProbability {
    pub exact: BigRational,
    pub value: f64,
}

impl OverlapProbability {
    fn from_ratio(exact: BigRational) -> Self {
        let value = exact.to_f64().unwrap_or(f64::NAN).clamp(0.0, 1.0);
        Self { exact, value }
    }
}

/// Probability that two independent uniform `K`-subsets of a `P`-pool share
/// at least `d` objects:
/// `Σ_{u ≥ d} C(K,u) C(P−K,K−u) / C(P,K)`.
///
/// Terms with `u < 2K − P` vanish, so any `K ≤ P` is accepted. The shorter of
/// the upper sum and its complement is evaluated.
pub fn edge_prob_overlap(k: u64, p: u64, d: u64) -> Result<OverlapProbability> {
    validate_overlap_args(k, p, d)?;
    let lowest = (2 * k).saturating_sub(p);
    let term = |u: u64| big_binomial(k, u) * big_binomial(p - k, k - u);
    let denominator = BigInt::from(big_binomial(p, k));
    let lower_terms = d.saturating_sub(lowest);
    let upper_terms = k + 1 - d.max(lowest);
    let exact = if lower_terms == 0 {
        BigRational::one()
    } else if upper_terms <= lower_terms {
        let num: BigUint = (d.max(lowest)..=k).map(term).sum();
        BigRational::new(BigInt::from(num), denominator)
    } else {
        let miss: BigUint = (lowest..d).map(term).sum();
        BigRational::one() - BigRational::new(BigInt::from(miss), denominator)
    };
    Ok(OverlapProbability::from_ratio(exact))
}

/// Exact model edge probability `t = f · g · s(K, P, d)`.
pub fn edge_prob_model(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let s = edge_prob_overlap(params.ring_size, params.pool_size, params.min_overlap)?;
    Ok(params.link_prob() * s.value)
}

/// Large-ring approximation `(K² / P)^d / d!`, clamped to `[0, 1]`.
pub fn approx_edge_prob_overlap(k: u64, p: u64, d: u64) -> f64 {
    if k == 0 || p == 0 {
        return 0.0;
    }
    let ratio = (k as f64) * (k as f64) / p as f64;
    (d as f64 * ratio.ln() - ln_factorial(d)).exp().clamp(0.0, 1.0)
}

/// `(ln n + m ln ln n) / n`, the edge probability at which `α = 0`.
pub fn threshold_density(n: usize, m: u64) -> f64 {
    let nf = n as f64;
    (nf.ln() + m as f64 * nf.ln().ln()) / nf
}

/// Deviation `α = n t − ln n − m ln ln n` for the model edge probability.
pub fn alpha_from_params(params: &ModelParams, m: u64) -> Result<f64> {
    let t = edge_prob_model(params)?;
    alpha_from_edge_prob(params.n, t, m)
}

/// Deviation `α` for an arbitrary edge probability `t`.
pub fn alpha_from_edge_prob(n: usize, t: f64, m: u64) -> Result<f64> {
    if n < 3 {
        return invalid(format!("n = {n} must be at least 3 for ln ln n to be positive"));
    }
    let nf = n as f64;
    Ok(nf * t - nf.ln() - m as f64 * nf.ln().ln())
}

/// Edge probability realising deviation `alpha`.
pub fn edge_prob_from_alpha(n: usize, alpha: f64, m: u64) -> f64 {
    threshold_density(n, m) + alpha / n as f64
}

/// Limiting probability `exp(−e^{−α} / m!)` of staying connected after any
/// `m` node failures. `α = +∞` gives 1, `α = −∞` gives 0.
pub fn predicted_limit_prob(alpha: f64, m: u64) -> f64 {
    if alpha == f64::INFINITY {
        return 1.0;
    }
    if alpha == f64::NEG_INFINITY {
        return 0.0;
    }
    (-(-alpha - ln_factorial(m)).exp()).exp()
}

/// Erdős–Rényi `k`-connectivity limit `exp(−e^{−α} / (k−1)!)`; same kernel
/// as [`predicted_limit_prob`] with `m = k − 1`.
pub fn er_kconn_limit(alpha: f64, k: u64) -> f64 {
    debug_assert!(k >= 1);
    predicted_limit_prob(alpha, k.saturating_sub(1))
}

/// Poisson pmf `λ^ℓ e^{−λ} / ℓ!`, evaluated in log space.
pub fn poisson_pmf(lambda: f64, ell: u64) -> f64 {
    if lambda == 0.0 {
        return if ell == 0 { 1.0 } else { 0.0 };
    }
    (ell as f64 * lambda.ln() - lambda - ln_factorial(ell)).exp()
}

/// Expected number of degree-`h` nodes in the Poisson approximation:
/// `n (nt)^h e^{−nt} / h!`.
pub fn poisson_degree_mean(n: usize, t: f64, h: u64) -> f64 {
    n as f64 * poisson_pmf(n as f64 * t, h)
}

/// Upper tail `P[Poisson(μ) ≥ d]` without cancellation for small `μ`.
pub fn poisson_upper_tail(mu: f64, d: u64) -> f64 {
    if d == 0 {
        return 1.0;
    }
    if mu <= 0.0 {
        return 0.0;
    }
    if mu < (d + 1) as f64 {
        let mut term = poisson_pmf(mu, d);
        let mut sum = 0.0;
        let mut j = d;
        while term > sum * 1e-17 && j < d + 10_000 {
            sum += term;
            j += 1;
            term *= mu / j as f64;
        }
        sum.min(1.0)
    } else {
        let lower: f64 = (0..d).map(|j| poisson_pmf(mu, j)).sum();
        (1.0 - lower).max(0.0)
    }
}

/// Finite-`n` proxies for the asymptotic conditions under which the limit
/// law holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    /// Upper bound for `K² ln n / P` (stands in for `K²/P = o(1/ln n)`).
    pub ring_square_ratio: f64,
    /// Upper bound for `K n ln n / P` (stands in for `K/P = o(1/(n ln n))`).
    pub ring_pool_ratio: f64,
    /// `K` must be at least `n^ring_exponent` (stands in for `K = Ω(n^ε)`).
    pub ring_exponent: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            ring_square_ratio: 0.1,
            ring_pool_ratio: 0.1,
            ring_exponent: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeCheck {
    pub condition: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Advisory checks of the regime conditions using the default thresholds.
pub fn check_regime(params: &ModelParams) -> Vec<RegimeCheck> {
    check_regime_with(params, &RegimeThresholds::default())
}

pub fn check_regime_with(params: &ModelParams, limits: &RegimeThresholds) -> Vec<RegimeCheck> {
    let n = params.n as f64;
    let k = params.ring_size as f64;
    let p = params.pool_size as f64;
    let square = k * k * n.ln() / p;
    let linear = k * n * n.ln() / p;
    let floor = n.powf(limits.ring_exponent);
    vec![
        RegimeCheck {
            condition: "K^2 ln n / P",
            value: square,
            threshold: limits.ring_square_ratio,
            passed: square <= limits.ring_square_ratio,
        },
        RegimeCheck {
            condition: "K n ln n / P",
            value: linear,
            threshold: limits.ring_pool_ratio,
            passed: linear <= limits.ring_pool_ratio,
        },
        RegimeCheck {
            condition: "K >= n^eps",
            value: k,
            threshold: floor,
            passed: k >= floor,
        },
    ]
}

/// Model parameter for which a critical value can be solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    #[serde(rename = "g")]
    G,
    #[serde(rename = "n")]
    N,
    #[serde(rename = "m")]
    M,
    K,
    P,
    #[serde(rename = "f")]
    F,
}

impl Axis {
    pub const ALL: [Axis; 6] = [Axis::G, Axis::N, Axis::M, Axis::K, Axis::P, Axis::F];

    pub fn name(self) -> &'static str {
        match self {
            Axis::G => "g",
            Axis::N => "n",
            Axis::M => "m",
            Axis::K => "K",
            Axis::P => "P",
            Axis::F => "f",
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, Axis::N | Axis::M | Axis::K | Axis::P)
    }
}

impl std::str::FromStr for Axis {
    type Err = crate::LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" => Ok(Axis::G),
            "n" => Ok(Axis::N),
            "m" => Ok(Axis::M),
            "K" | "k" => Ok(Axis::K),
            "P" | "p" => Ok(Axis::P),
            "f" => Ok(Axis::F),
            other => invalid(format!("unknown axis {other:?}; expected one of g, n, m, K, P, f")),
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a critical-parameter solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalValue {
    pub axis: Axis,
    /// The critical value. For infeasible continuous axes this is the
    /// unclamped solution; for infeasible integer axes it is the domain end
    /// closest to feasibility.
    pub value: f64,
    pub feasible: bool,
    /// The scaling-law inequality holds with (near) equality at `value`.
    pub boundary_hit: bool,
}

const BOUNDARY_REL_TOL: f64 = 1e-12;

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUNDARY_REL_TOL * a.abs().max(b.abs())
}

/// Solves for the critical value of one parameter, all others fixed.
///
/// * `g`, `f`: exact division, `f g s = (ln n + m ln ln n) / n`.
/// * `n`: the smallest `n ≥ 3` from which `t ≥ (ln n + m ln ln n)/n` holds
///   for every larger `n`.
/// * `m`: the largest `m ≥ 0` with `t ≥ (ln n + m ln ln n)/n`.
/// * `K`: the smallest `K ∈ [d, P]` with `f g s(K,P,d) ≥ (ln n + m ln ln n)/n`.
/// * `P`: the largest `P ≥ K` with the same inequality.
pub fn solve_critical(axis: Axis, params: &ModelParams, m: u64) -> Result<CriticalValue> {
    params.validate()?;
    let fgp = params.link_prob();
    let (k, p, d) = (params.ring_size, params.pool_size, params.min_overlap);
    let overlap = |kk: u64, pp: u64| -> f64 {
        edge_prob_overlap(kk, pp, d).map(|s| s.value).unwrap_or(0.0)
    };
    let needs_ln_ln = |n: usize| -> Result<()> {
        if n < 3 {
            return invalid(format!("n = {n} must be at least 3 for ln ln n to be positive"));
        }
        Ok(())
    };
    let result = |value: f64, feasible: bool, boundary_hit: bool| CriticalValue {
        axis,
        value,
        feasible,
        boundary_hit,
    };

    match axis {
        Axis::G | Axis::F => {
            needs_ln_ln(params.n)?;
            let rhs = threshold_density(params.n, m);
            let other = match axis {
                Axis::G => params.friendship,
                _ => params.link_survival,
            };
            let denom = other * overlap(k, p);
            let value = if denom > 0.0 { rhs / denom } else { f64::INFINITY };
            Ok(result(value, value <= 1.0, false))
        }
        Axis::M => {
            needs_ln_ln(params.n)?;
            let n = params.n as f64;
            let t = fgp * overlap(k, p);
            let holds = |mm: u64| t >= threshold_density(params.n, mm);
            let raw = ((n * t - n.ln()) / n.ln().ln()).floor();
            if raw < 0.0 && !holds(0) {
                return Ok(result(raw, false, false));
            }
            let mut best = raw.max(0.0) as u64;
            while best > 0 && !holds(best) {
                best -= 1;
            }
            while holds(best + 1) {
                best += 1;
            }
            if !holds(best) {
                return Ok(result(raw, false, false));
            }
            let boundary = near(t, threshold_density(params.n, best));
            Ok(result(best as f64, true, boundary))
        }
        Axis::N => {
            let t = fgp * overlap(k, p);
            let h = |n: u64| threshold_density(n as usize, m);
            // h rises to a peak and then decreases monotonically.
            let mut peak = 3u64;
            while h(peak + 1) > h(peak) {
                peak += 1;
            }
            if t >= h(peak) {
                return Ok(result(3.0, true, near(t, h(3))));
            }
            if t <= 0.0 {
                return Ok(result(f64::INFINITY, false, false));
            }
            let cap = 1u64 << 52;
            let mut hi = peak.max(4) * 2;
            while h(hi) > t {
                if hi >= cap {
                    return Ok(result(f64::INFINITY, false, false));
                }
                hi = (hi * 2).min(cap);
            }
            // invariant: h(lo) > t >= h(hi)
            let mut lo = peak;
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if h(mid) <= t {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            while hi > peak && h(hi - 1) <= t {
                hi -= 1;
            }
            Ok(result(hi as f64, true, near(t, h(hi))))
        }
        Axis::K => {
            needs_ln_ln(params.n)?;
            let rhs = threshold_density(params.n, m);
            let holds = |kk: u64| fgp * overlap(kk, p) >= rhs;
            if !holds(p) {
                return Ok(result(p as f64, false, false));
            }
            // invariant: !holds(lo) (or lo below the domain), holds(hi)
            let (mut lo, mut hi) = (d - 1, p);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if holds(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            while hi > d && holds(hi - 1) {
                hi -= 1;
            }
            Ok(result(hi as f64, true, near(fgp * overlap(hi, p), rhs)))
        }
        Axis::P => {
            needs_ln_ln(params.n)?;
            let rhs = threshold_density(params.n, m);
            let holds = |pp: u64| fgp * overlap(k, pp) >= rhs;
            if !holds(k) {
                return Ok(result(k as f64, false, false));
            }
            let cap = 1u64 << 40;
            let mut hi = (2 * k).max(k + 1);
            while holds(hi) {
                if hi >= cap {
                    return Ok(result(f64::INFINITY, false, false));
                }
                hi = (hi * 2).min(cap);
            }
            // invariant: holds(lo), !holds(hi)
            let mut lo = k;
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if holds(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            while holds(lo + 1) {
                lo += 1;
            }
            Ok(result(lo as f64, true, near(fgp * overlap(k, lo), rhs)))
        }
    }
}

/// Scaling-law summary for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingDiagnostics {
    pub s: f64,
    pub t: f64,
    pub alpha: f64,
    pub m: u64,
    pub predicted_limit: f64,
    pub regime_flags: Vec<RegimeCheck>,
}

pub fn scaling_diagnostics(params: &ModelParams, m: u64) -> Result<ScalingDiagnostics> {
    let s = edge_prob_overlap(params.ring_size, params.pool_size, params.min_overlap)?.value;
    let t = params.link_prob() * s;
    let alpha = alpha_from_edge_prob(params.n, t, m)?;
    Ok(ScalingDiagnostics {
        s,
        t,
        alpha,
        m,
        predicted_limit: predicted_limit_prob(alpha, m),
        regime_flags: check_regime(params)
            .into_iter()
            .filter(|c| !c.passed)
            .collect(),
    })
}

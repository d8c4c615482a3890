//! Couplings that relate the uniform intersection graph to the binomial one
//! and the binomial one to an Erdős–Rényi graph.

use rand::Rng;
use serde::Serialize;

use super::rings::{gen_object_rings_binomial, graph_from_rings, resize_ring, ObjectAssignment};
use crate::error::{invalid, LabError, Result};
use crate::graph::GraphTopology;
use crate::theory::poisson_upper_tail;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingThreshold {
    /// Binomial membership probability `x = (K/P)(1 − √(3 ln n / K))`.
    pub x: f64,
    /// `xP + √(3 (xP + ln n) ln n)`, which `K` must not fall below.
    pub ring_bound: f64,
    pub admissible: bool,
}

/// Membership probability for which the binomial intersection graph sits
/// inside the uniform one with high probability.
pub fn coupling_threshold_x(k: u64, p: u64, n: usize) -> Result<CouplingThreshold> {
    if n < 2 {
        return invalid("n must be at least 2");
    }
    if k == 0 || k > p {
        return invalid(format!("need 1 <= K <= P, got K = {k}, P = {p}"));
    }
    let ln_n = (n as f64).ln();
    let kf = k as f64;
    if kf <= 3.0 * ln_n {
        return Err(LabError::InfeasibleCoupling {
            k,
            bound: 3.0 * ln_n,
        });
    }
    let x = kf / p as f64 * (1.0 - (3.0 * ln_n / kf).sqrt());
    let xp = x * p as f64;
    let ring_bound = xp + (3.0 * (xp + ln_n) * ln_n).sqrt();
    Ok(CouplingThreshold {
        x,
        ring_bound,
        admissible: kf >= ring_bound,
    })
}

/// One draw of the coupled pair `(H_d(n,x,P), G_d(n,K,P))`.
#[derive(Debug, Clone)]
pub struct CoupledPair {
    pub binomial: GraphTopology,
    pub uniform: GraphTopology,
    /// All binomial rings had at most `K` objects; then `binomial ⊆ uniform`.
    pub coupling_valid: bool,
    pub threshold: CouplingThreshold,
}

/// Samples binomial rings at the coupling threshold, then resizes each ring
/// to exactly `K` objects: rings of size at most `K` are topped up with
/// uniformly chosen missing objects, larger ones are cut to a uniform
/// `K`-subset. The resized rings are uniform `K`-subsets, so `uniform` is an
/// exact `G_d(n,K,P)` sample, and when no ring was cut every binomial edge
/// survives into it.
pub fn gen_coupled_pair<R: Rng + ?Sized>(
    n: usize,
    k: u64,
    p: u64,
    d: u64,
    rng: &mut R,
) -> Result<CoupledPair> {
    let threshold = coupling_threshold_x(k, p, n)?;
    let binomial_rings = gen_object_rings_binomial(n, threshold.x, p, rng)?;
    let binomial = graph_from_rings(&binomial_rings, d);
    let coupling_valid = binomial_rings.rings.iter().all(|r| r.len() as u64 <= k);
    let resized = binomial_rings
        .rings
        .iter()
        .map(|ring| resize_ring(ring, k, p, rng))
        .collect();
    let uniform = graph_from_rings(
        &ObjectAssignment {
            rings: resized,
            pool_size: p,
        },
        d,
    );
    Ok(CoupledPair {
        binomial,
        uniform,
        coupling_valid,
        threshold,
    })
}

/// Quantities of the Poissonization step that turns the binomial
/// intersection graph into an Erdős–Rényi graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Poissonization {
    /// `E[W_i] = ½nx − ¼ + ¼(1−2x)^n`.
    pub expected_half: f64,
    /// `E[Y] = P · E[W_i]`.
    pub expected_total: f64,
    /// `λ = E[Y] − E[Y]^{5/6}`.
    pub lambda: f64,
    /// `μ = λ / C(n,2)`.
    pub mu: f64,
    /// `ρ = P[Poisson(μ) ≥ d]`, the resulting ER edge probability.
    pub rho: f64,
}

/// `E[⌊Bin(n,x)/2⌋]`.
///
/// The closed form cancels badly for small `nx`; there the alternating
/// series `Σ_{j≥2} (−1)^j 2^{j−2} C(n,j) x^j` is summed instead.
pub fn expected_half_count(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    if 2.0 * nf * x > 0.5 {
        return 0.5 * nf * x + 0.25 * (nf * (-2.0 * x).ln_1p()).exp_m1();
    }
    if n < 2 {
        return 0.0;
    }
    let mut term = nf * (nf - 1.0) / 2.0 * x * x;
    let mut sum = 0.0;
    let mut j = 2usize;
    loop {
        sum += term;
        if j >= n || term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        term *= -2.0 * x * (nf - j as f64) / (j as f64 + 1.0);
        j += 1;
    }
    sum
}

pub fn poissonization_edge_prob(n: usize, p: u64, x: f64, d: u64) -> Result<Poissonization> {
    if !(x > 0.0 && x < 1.0) {
        return invalid(format!("x = {x} must lie strictly between 0 and 1"));
    }
    if n < 3 {
        return invalid("n must be at least 3");
    }
    let expected_half = expected_half_count(n, x);
    let expected_total = p as f64 * expected_half;
    if expected_total <= 1.0 {
        return Err(LabError::DegenerateRegime {
            expected_y: expected_total,
        });
    }
    let lambda = expected_total - expected_total.powf(5.0 / 6.0);
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    let mu = lambda / pairs;
    Ok(Poissonization {
        expected_half,
        expected_total,
        lambda,
        mu,
        rho: poisson_upper_tail(mu, d),
    })
}

//! Random graph samplers.
//!
//! Every sampler takes an explicit RNG so callers can give each trial its own
//! deterministic stream (see [`crate::rng`]).

mod coupling;
mod erdos_renyi;
mod multiset;
mod rings;

pub use coupling::{
    coupling_threshold_x, gen_coupled_pair, poissonization_edge_prob, CoupledPair,
    CouplingThreshold, Poissonization,
};
pub use erdos_renyi::gen_er;
pub use multiset::gen_multiset_graph;
pub use rings::{
    gen_object_rings_binomial, gen_object_rings_uniform, graph_from_rings, HalfCountSummary,
    ObjectAssignment,
};

use rand::Rng;

use crate::error::Result;
use crate::graph::GraphTopology;
use crate::theory::ModelParams;

/// How the friendship and link-failure layers are realised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LayerMode {
    /// Keep each common-interest edge independently with probability `f·g`.
    #[default]
    Thinned,
    /// Intersect with two independent Erdős–Rényi graphs `G(n,f)` and
    /// `G(n,g)`. Same distribution, slower; kept for differential testing.
    TwoLayer,
}

/// Samples `G_d(n,K,P) ∩ G(n,f) ∩ G(n,g)`.
pub fn gen_model_graph<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<GraphTopology> {
    gen_model_graph_with(params, LayerMode::Thinned, rng)
}

pub fn gen_model_graph_with<R: Rng + ?Sized>(
    params: &ModelParams,
    mode: LayerMode,
    rng: &mut R,
) -> Result<GraphTopology> {
    params.validate()?;
    let rings = gen_object_rings_uniform(params.n, params.ring_size, params.pool_size, rng)?;
    let interest = graph_from_rings(&rings, params.min_overlap);
    match mode {
        LayerMode::Thinned => {
            let p = params.link_prob();
            if p >= 1.0 {
                return Ok(interest);
            }
            if p <= 0.0 {
                return Ok(GraphTopology::empty(params.n));
            }
            let kept: Vec<_> = interest
                .edges()
                .into_iter()
                .filter(|_| rng.random_bool(p))
                .collect();
            Ok(GraphTopology::from_unique_pairs(params.n, kept))
        }
        LayerMode::TwoLayer => {
            let friends = gen_er(params.n, params.friendship, rng)?;
            let alive = gen_er(params.n, params.link_survival, rng)?;
            interest.intersect(&friends)?.intersect(&alive)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use crate::theory::edge_prob_model;

    #[test]
    fn model_graph_extremes() {
        let mut rng = trial_rng(1, 0);
        let dead = ModelParams::new(30, 4, 20, 1, 1.0, 0.0).unwrap();
        assert_eq!(gen_model_graph(&dead, &mut rng).unwrap().edge_count(), 0);
        let full = ModelParams::new(30, 5, 5, 1, 1.0, 1.0).unwrap();
        assert_eq!(gen_model_graph(&full, &mut rng).unwrap(), GraphTopology::complete(30));
        let two = gen_model_graph_with(&full, LayerMode::TwoLayer, &mut rng).unwrap();
        assert_eq!(two, GraphTopology::complete(30));
    }

    /// Pools edge indicators over many small graphs; each node pair in one
    /// graph is one Bernoulli(t) observation (pairs within a graph are
    /// pairwise independent, so the variance is exactly binomial).
    fn edge_frequency(params: &ModelParams, mode: LayerMode, graphs: u64, seed: u64) -> f64 {
        let pairs = (params.n * (params.n - 1) / 2) as u64;
        let mut hits = 0u64;
        for trial in 0..graphs {
            let mut rng = trial_rng(seed, trial);
            hits += gen_model_graph_with(params, mode, &mut rng).unwrap().edge_count() as u64;
        }
        hits as f64 / (graphs * pairs) as f64
    }

    #[test]
    fn model_edge_frequency_matches_formula() {
        let params = ModelParams::new(6, 3, 10, 2, 0.8, 0.7).unwrap();
        let t = edge_prob_model(&params).unwrap();
        let graphs = 7_000u64; // 15 pairs each: ~10^5 pair observations
        let obs = (graphs * 15) as f64;
        let sigma = (t * (1.0 - t) / obs).sqrt();
        for mode in [LayerMode::Thinned, LayerMode::TwoLayer] {
            let freq = edge_frequency(&params, mode, graphs, 99);
            assert!((freq - t).abs() < 3.0 * sigma, "{mode:?}: {freq} vs {t}");
        }
    }

    #[test]
    fn model_edge_indicator_passes_chi_square() {
        // One pair (n = 2) per sample so observations are fully independent.
        let params = ModelParams::new(2, 3, 10, 2, 0.9, 0.9).unwrap();
        let t = edge_prob_model(&params).unwrap();
        let trials = 100_000u64;
        let mut hits = 0u64;
        for i in 0..trials {
            let mut rng = trial_rng(5, i);
            hits += gen_model_graph(&params, &mut rng).unwrap().edge_count() as u64;
        }
        let n = trials as f64;
        let e1 = n * t;
        let e0 = n - e1;
        let o1 = hits as f64;
        let o0 = n - o1;
        let chi2 = (o1 - e1).powi(2) / e1 + (o0 - e0).powi(2) / e0;
        // χ²(1) upper 10^-3 critical value.
        assert!(chi2 < 10.827_566, "chi2 = {chi2}");
    }
}

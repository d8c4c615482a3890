use std::collections::HashMap;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::graph::GraphTopology;

/// Multiset graph `L_d(n, b)`: draw `b` node pairs uniformly with repetition
/// and keep the pairs drawn at least `d` times (`d = 1` gives `L(n, b)`).
pub fn gen_multiset_graph<R: Rng + ?Sized>(
    n: usize,
    b: u64,
    d: u64,
    rng: &mut R,
) -> Result<GraphTopology> {
    if d == 0 {
        return invalid("d must be at least 1");
    }
    if n < 2 {
        if b > 0 {
            return invalid("cannot draw pairs from fewer than two nodes");
        }
        return Ok(GraphTopology::empty(n));
    }
    let mut draws: HashMap<(usize, usize), u64> = HashMap::new();
    for _ in 0..b {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        *draws.entry((i.min(j), i.max(j))).or_insert(0) += 1;
    }
    let mut kept: Vec<(usize, usize)> = draws
        .into_iter()
        .filter(|&(_, c)| c >= d)
        .map(|(pair, _)| pair)
        .collect();
    kept.sort_unstable();
    Ok(GraphTopology::from_unique_pairs(n, kept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    #[test]
    fn small_cases() {
        let mut rng = trial_rng(1, 1);
        assert_eq!(gen_multiset_graph(6, 0, 1, &mut rng).unwrap().edge_count(), 0);
        assert_eq!(gen_multiset_graph(6, 1, 1, &mut rng).unwrap().edge_count(), 1);
        assert!(gen_multiset_graph(6, 1, 0, &mut rng).is_err());
    }

    #[test]
    fn specific_pair_tail_probability() {
        // P[Bin(3, 1/10) >= 2] = 3 * 0.01 * 0.9 + 0.001 = 0.028
        let expected = 0.028;
        let draws = 1_000_000u64;
        let mut rng = trial_rng(2, 0);
        let hits = (0..draws)
            .filter(|_| gen_multiset_graph(5, 3, 2, &mut rng).unwrap().has_edge(0, 1))
            .count();
        let freq = hits as f64 / draws as f64;
        let sigma = (expected * (1.0 - expected) / draws as f64).sqrt();
        assert!((freq - expected).abs() < 4.0 * sigma, "{freq}");
    }

    #[test]
    fn distinct_edge_count_mean() {
        let (n, b) = (20usize, 150u64);
        let pairs = (n * (n - 1) / 2) as f64;
        let expected = pairs * (1.0 - (1.0 - 1.0 / pairs).powf(b as f64));
        let samples = 4000u64;
        let counts: Vec<f64> = (0..samples)
            .map(|i| gen_multiset_graph(n, b, 1, &mut trial_rng(3, i)).unwrap().edge_count() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / samples as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        assert!((mean - expected).abs() < 3.0 * (var / samples as f64).sqrt(), "{mean} vs {expected}");
    }
}

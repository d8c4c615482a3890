use rand::Rng;

use crate::error::{invalid, Result};
use crate::graph::GraphTopology;

/// Erdős–Rényi `G(n, p)`: every pair is an edge independently with
/// probability `p`.
///
/// Walks the pairs in order and jumps geometrically between successes, so the
/// cost is proportional to the number of edges produced.
pub fn gen_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<GraphTopology> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("p = {p} must lie in [0, 1]"));
    }
    if p == 0.0 || n < 2 {
        return Ok(GraphTopology::empty(n));
    }
    if p == 1.0 {
        return Ok(GraphTopology::complete(n));
    }
    let log_q = (-p).ln_1p();
    let mut edges = Vec::new();
    // Pair (w, v) with w < v; pairs are ordered by v, then w.
    let (mut v, mut w) = (1usize, -1i64);
    loop {
        let r: f64 = rng.random();
        let skip = ((-r).ln_1p() / log_q).floor();
        if skip >= (n * n) as f64 {
            break;
        }
        w += 1 + skip as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v >= n {
            break;
        }
        edges.push((w as usize, v));
    }
    Ok(GraphTopology::from_unique_pairs(n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    #[test]
    fn extremes() {
        let mut rng = trial_rng(0, 0);
        assert_eq!(gen_er(20, 0.0, &mut rng).unwrap().edge_count(), 0);
        assert_eq!(gen_er(20, 1.0, &mut rng).unwrap(), GraphTopology::complete(20));
        assert!(gen_er(20, 1.5, &mut rng).is_err());
        assert_eq!(gen_er(1, 0.5, &mut rng).unwrap().node_count(), 1);
    }

    #[test]
    fn mean_edge_count() {
        // Mean of 10^3 samples of Bin(4950, 0.1).
        let samples = 1000u64;
        let total: usize = (0..samples)
            .map(|i| gen_er(100, 0.1, &mut trial_rng(21, i)).unwrap().edge_count())
            .sum();
        let mean = total as f64 / samples as f64;
        let sigma = (4950.0 * 0.1 * 0.9 / samples as f64).sqrt();
        assert!((mean - 495.0).abs() < 3.0 * sigma, "{mean}");
    }

    #[test]
    fn every_pair_is_reachable() {
        // Across 50 samples every pair shows up; the index walk must cover
        // the whole triangle.
        let mut seen = GraphTopology::empty(7);
        for i in 0..50 {
            let g = gen_er(7, 0.5, &mut trial_rng(8, i)).unwrap();
            let mut edges = seen.edges();
            edges.extend(g.edges());
            seen = GraphTopology::from_edges(7, edges).unwrap();
        }
        assert_eq!(seen, GraphTopology::complete(7));
    }
}

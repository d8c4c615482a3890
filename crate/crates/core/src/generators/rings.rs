use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{invalid, Result};
use crate::graph::GraphTopology;

/// Object rings: the sorted set of object ids held by each node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectAssignment {
    pub rings: Vec<Vec<u64>>,
    pub pool_size: u64,
}

impl ObjectAssignment {
    pub fn from_rings(mut rings: Vec<Vec<u64>>, pool_size: u64) -> Result<Self> {
        for (i, ring) in rings.iter_mut().enumerate() {
            ring.sort_unstable();
            if ring.windows(2).any(|w| w[0] == w[1]) {
                return invalid(format!("ring {i} repeats an object"));
            }
            if ring.last().is_some_and(|&o| o >= pool_size) {
                return invalid(format!("ring {i} holds an object outside the pool of {pool_size}"));
            }
        }
        Ok(Self { rings, pool_size })
    }

    pub fn node_count(&self) -> usize {
        self.rings.len()
    }

    /// `(object, node)` memberships grouped by object, objects ascending.
    pub fn members_by_object(&self) -> Vec<(u64, Vec<usize>)> {
        let mut memberships: Vec<(u64, usize)> = self
            .rings
            .iter()
            .enumerate()
            .flat_map(|(node, ring)| ring.iter().map(move |&o| (o, node)))
            .collect();
        memberships.sort_unstable();
        let mut groups: Vec<(u64, Vec<usize>)> = Vec::new();
        for (object, node) in memberships {
            match groups.last_mut() {
                Some((o, nodes)) if *o == object => nodes.push(node),
                _ => groups.push((object, vec![node])),
            }
        }
        groups
    }
}

/// Per-object membership counts `U_i`, their halves `W_i = ⌊U_i / 2⌋`, and
/// `Y = Σ W_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfCountSummary {
    pub counts: Vec<u64>,
    pub half_counts: Vec<u64>,
    pub total_half: u64,
}

impl HalfCountSummary {
    pub fn from_assignment(assign: &ObjectAssignment) -> Self {
        let mut counts = vec![0u64; assign.pool_size as usize];
        for ring in &assign.rings {
            for &o in ring {
                counts[o as usize] += 1;
            }
        }
        let half_counts: Vec<u64> = counts.iter().map(|u| u / 2).collect();
        let total_half = half_counts.iter().sum();
        Self {
            counts,
            half_counts,
            total_half,
        }
    }
}

fn uniform_subset<R: Rng + ?Sized>(pool: u64, size: u64, rng: &mut R) -> Vec<u64> {
    let mut ring: Vec<u64> = index::sample(rng, pool as usize, size as usize)
        .into_iter()
        .map(|i| i as u64)
        .collect();
    ring.sort_unstable();
    ring
}

/// Each node independently draws a uniform `K`-subset of `{0, …, P−1}`.
pub fn gen_object_rings_uniform<R: Rng + ?Sized>(
    n: usize,
    k: u64,
    p: u64,
    rng: &mut R,
) -> Result<ObjectAssignment> {
    if k > p {
        return invalid(format!("K exceeds P ({k} > {p})"));
    }
    let rings = (0..n).map(|_| uniform_subset(p, k, rng)).collect();
    Ok(ObjectAssignment { rings, pool_size: p })
}

/// Each `(node, object)` membership is an independent Bernoulli(`x`) draw.
///
/// Sampled object by object: `U_i ~ Bin(n, x)` members, chosen uniformly
/// among the nodes, which is the same joint law.
pub fn gen_object_rings_binomial<R: Rng + ?Sized>(
    n: usize,
    x: f64,
    p: u64,
    rng: &mut R,
) -> Result<ObjectAssignment> {
    if !(0.0..=1.0).contains(&x) {
        return invalid(format!("x = {x} must lie in [0, 1]"));
    }
    let mut rings = vec![Vec::new(); n];
    let binomial = Binomial::new(n as u64, x).map_err(|e| crate::LabError::InvalidInput(e.to_string()))?;
    for object in 0..p {
        let members = binomial.sample(rng) as usize;
        for node in index::sample(rng, n, members) {
            rings[node].push(object);
        }
    }
    Ok(ObjectAssignment { rings, pool_size: p })
}

/// Intersection graph: nodes `i` and `j` are adjacent iff their rings share
/// at least `d` objects.
///
/// Sparse assignments go through the object → members index and count
/// co-occurrences per pair; dense ones fall back to merging sorted rings.
pub fn graph_from_rings(assign: &ObjectAssignment, d: u64) -> GraphTopology {
    let n = assign.node_count();
    let d = d.max(1);
    let groups = assign.members_by_object();
    let indexed_cost: u64 = groups
        .iter()
        .map(|(_, m)| (m.len() as u64) * (m.len() as u64).saturating_sub(1) / 2)
        .sum();
    let total_ring: u64 = assign.rings.iter().map(|r| r.len() as u64).sum();
    let pairwise_cost = (n as u64) * total_ring / 2;

    if indexed_cost <= pairwise_cost {
        let mut keys: Vec<u64> = Vec::with_capacity(indexed_cost as usize);
        for (_, members) in &groups {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    keys.push((i as u64) * n as u64 + j as u64);
                }
            }
        }
        keys.sort_unstable();
        let mut edges = Vec::new();
        let mut idx = 0;
        while idx < keys.len() {
            let key = keys[idx];
            let mut run = 1u64;
            while idx + (run as usize) < keys.len() && keys[idx + run as usize] == key {
                run += 1;
            }
            if run >= d {
                edges.push(((key / n as u64) as usize, (key % n as u64) as usize));
            }
            idx += run as usize;
        }
        GraphTopology::from_unique_pairs(n, edges)
    } else {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if shares_at_least(&assign.rings[i], &assign.rings[j], d) {
                    edges.push((i, j));
                }
            }
        }
        GraphTopology::from_unique_pairs(n, edges)
    }
}

fn shares_at_least(a: &[u64], b: &[u64], d: u64) -> bool {
    let (mut i, mut j, mut common) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                if common >= d {
                    return true;
                }
                i += 1;
                j += 1;
            }
        }
    }
    false
}

/// Tops `ring` up to `k` objects with uniformly chosen objects it lacks, or
/// keeps a uniform `k`-subset if it is larger. Either way the result is a
/// uniform `k`-subset whenever the input size is independent of its content.
pub(crate) fn resize_ring<R: Rng + ?Sized>(ring: &[u64], k: u64, pool: u64, rng: &mut R) -> Vec<u64> {
    let len = ring.len() as u64;
    let mut out: Vec<u64> = if len > k {
        index::sample(rng, ring.len(), k as usize)
            .into_iter()
            .map(|i| ring[i])
            .collect()
    } else if 2 * k <= pool {
        let mut held: HashSet<u64> = ring.iter().copied().collect();
        let mut out = ring.to_vec();
        while (out.len() as u64) < k {
            let o = rng.random_range(0..pool);
            if held.insert(o) {
                out.push(o);
            }
        }
        out
    } else {
        let held: HashSet<u64> = ring.iter().copied().collect();
        let missing: Vec<u64> = (0..pool).filter(|o| !held.contains(o)).collect();
        let mut out = ring.to_vec();
        out.extend(
            index::sample(rng, missing.len(), (k - len) as usize)
                .into_iter()
                .map(|i| missing[i]),
        );
        out
    };
    out.sort_unstable();
    out
}

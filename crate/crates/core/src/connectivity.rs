//! Exact `k`-connectivity and node-failure resilience.
//!
//! A graph is `k`-connected when it has at least `k + 1` nodes and stays
//! connected after removing any `k − 1` of them. By Menger's theorem this is
//! equivalent to vertex connectivity `κ ≥ k`, which is decided here with
//! unit-capacity max-flow on the node-split graph. Surviving any `m` node
//! failures is `(m + 1)`-connectivity.

use std::collections::HashSet;
use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::graph::GraphTopology;

/// Largest graph the exhaustive oracle accepts.
pub const BRUTE_FORCE_MAX_NODES: usize = 16;

pub fn is_connected(g: &GraphTopology) -> bool {
    let n = g.node_count();
    if n <= 1 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                stack.push(w);
            }
        }
    }
    reached == n
}

pub fn min_degree_at_least(g: &GraphTopology, k: usize) -> bool {
    g.min_degree() >= k
}

/// Cut vertices, ascending.
pub fn articulation_points(g: &GraphTopology) -> Vec<usize> {
    let n = g.node_count();
    const UNSEEN: usize = usize::MAX;
    let mut order = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut clock = 0;
    // (vertex, parent, next neighbour index)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if order[root] != UNSEEN {
            continue;
        }
        order[root] = clock;
        low[root] = clock;
        clock += 1;
        let mut root_children = 0;
        stack.push((root, UNSEEN, 0));
        while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
            if let Some(&w) = g.neighbors(v).get(*next) {
                *next += 1;
                if order[w] == UNSEEN {
                    order[w] = clock;
                    low[w] = clock;
                    clock += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent {
                    low[v] = low[v].min(order[w]);
                }
            } else {
                stack.pop();
                if parent != UNSEEN {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= order[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    (0..n).filter(|&v| is_cut[v]).collect()
}

/// Unit-capacity flow network on the node-split graph: node `v` becomes
/// `in(v) = 2v → out(v) = 2v + 1` with capacity one, and each undirected
/// edge `{u, v}` becomes arcs `out(u) → in(v)` and `out(v) → in(u)`.
struct SplitNetwork {
    first: Vec<usize>,
    next: Vec<usize>,
    to: Vec<usize>,
    residual: Vec<u8>,
    initial: Vec<u8>,
}

const NONE: usize = usize::MAX;

impl SplitNetwork {
    fn new(g: &GraphTopology) -> Self {
        let n = g.node_count();
        let mut net = SplitNetwork {
            first: vec![NONE; 2 * n],
            next: Vec::new(),
            to: Vec::new(),
            residual: Vec::new(),
            initial: Vec::new(),
        };
        for v in 0..n {
            net.add_arc(2 * v, 2 * v + 1);
        }
        for (a, b) in g.edges() {
            net.add_arc(2 * a + 1, 2 * b);
            net.add_arc(2 * b + 1, 2 * a);
        }
        net.initial = net.residual.clone();
        net
    }

    fn add_arc(&mut self, from: usize, to: usize) {
        for (src, dst, cap) in [(from, to, 1u8), (to, from, 0u8)] {
            self.to.push(dst);
            self.residual.push(cap);
            self.next.push(self.first[src]);
            self.first[src] = self.to.len() - 1;
        }
    }

    /// Number of internally node-disjoint paths between non-adjacent `s` and
    /// `t`, counted up to `limit`.
    fn local_connectivity(&mut self, s: usize, t: usize, limit: usize) -> usize {
        self.residual.copy_from_slice(&self.initial);
        let source = 2 * s + 1;
        let sink = 2 * t;
        let nodes = self.first.len();
        let mut via = vec![NONE; nodes];
        let mut flow = 0;
        let mut queue = VecDeque::new();
        while flow < limit {
            via.iter_mut().for_each(|e| *e = NONE);
            queue.clear();
            queue.push_back(source);
            let mut found = false;
            'bfs: while let Some(u) = queue.pop_front() {
                let mut e = self.first[u];
                while e != NONE {
                    let w = self.to[e];
                    if self.residual[e] > 0 && w != source && via[w] == NONE {
                        via[w] = e;
                        if w == sink {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                    e = self.next[e];
                }
            }
            if !found {
                break;
            }
            let mut w = sink;
            while w != source {
                let e = via[w];
                self.residual[e] -= 1;
                self.residual[e ^ 1] += 1;
                w = self.to[e ^ 1];
            }
            flow += 1;
        }
        flow
    }
}

/// Vertex connectivity `κ` capped at `limit`: returns `min(κ, limit)`.
///
/// With `v` a minimum-degree node, `κ` is the minimum local connectivity
/// over pairs `(v, w)` with `w` not adjacent to `v` and over non-adjacent
/// pairs of neighbours of `v`; a complete graph has `κ = n − 1`.
fn vertex_connectivity_capped(g: &GraphTopology, limit: usize) -> usize {
    let n = g.node_count();
    if n <= 1 {
        return 0;
    }
    let mut best = limit.min(n - 1).min(g.min_degree());
    if best == 0 {
        return 0;
    }
    if !is_connected(g) {
        return 0;
    }
    if best == 1 {
        return 1;
    }
    if !articulation_points(g).is_empty() {
        return 1;
    }
    let v = (0..n).min_by_key(|&u| g.degree(u)).unwrap_or(0);
    let mut net = SplitNetwork::new(g);
    for w in 0..n {
        if w != v && !g.has_edge(v, w) {
            best = best.min(net.local_connectivity(v, w, best));
            if best <= 2 {
                return best;
            }
        }
    }
    let nbrs = g.neighbors(v);
    for (i, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[i + 1..] {
            if !g.has_edge(x, y) {
                best = best.min(net.local_connectivity(x, y, best));
                if best <= 2 {
                    return best;
                }
            }
        }
    }
    best
}

/// Vertex connectivity `κ(g)`.
pub fn vertex_connectivity(g: &GraphTopology) -> usize {
    vertex_connectivity_capped(g, usize::MAX)
}

pub fn is_k_connected(g: &GraphTopology, k: usize) -> bool {
    let n = g.node_count();
    if k == 0 {
        return true;
    }
    if n <= k || g.min_degree() < k {
        return false;
    }
    match k {
        1 => is_connected(g),
        2 => is_connected(g) && articulation_points(g).is_empty(),
        _ => vertex_connectivity_capped(g, k) >= k,
    }
}

/// Survives the failure of any `m` nodes, i.e. is `(m + 1)`-connected.
pub fn survives_node_failures(g: &GraphTopology, m: usize) -> bool {
    is_k_connected(g, m + 1)
}

/// Definitional check by removing every `(k − 1)`-subset of nodes.
pub fn brute_force_k_connected(g: &GraphTopology, k: usize) -> Result<bool> {
    let n = g.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(LabError::OracleTooLarge {
            n,
            limit: BRUTE_FORCE_MAX_NODES,
        });
    }
    if k == 0 {
        return Ok(true);
    }
    if n < k + 1 {
        return Ok(false);
    }
    let masks: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for removed in 0u32..(1u32 << n) {
        if removed.count_ones() as usize != k - 1 {
            continue;
        }
        let alive = all & !removed;
        let start = alive & alive.wrapping_neg();
        let mut reached = start;
        let mut frontier = start;
        while frontier != 0 {
            let mut next = 0;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= masks[v];
            }
            next &= alive & !reached;
            reached |= next;
            frontier = next;
        }
        if reached != alive {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Removes `victims` and their incident edges; survivors are relabelled
/// `0..` in their original order.
pub fn remove_nodes(g: &GraphTopology, victims: &HashSet<usize>) -> GraphTopology {
    let n = g.node_count();
    let mut relabel = vec![usize::MAX; n];
    let mut next = 0;
    for (v, slot) in relabel.iter_mut().enumerate() {
        if !victims.contains(&v) {
            *slot = next;
            next += 1;
        }
    }
    let edges = g
        .edges()
        .into_iter()
        .filter(|&(a, b)| relabel[a] != usize::MAX && relabel[b] != usize::MAX)
        .map(|(a, b)| (relabel[a], relabel[b]));
    GraphTopology::from_unique_pairs(next, edges)
}

/// Removes `samples` random `m`-subsets and reports whether the graph stayed
/// connected every time. A necessary condition for surviving any `m`
/// failures, not a decision procedure.
pub fn random_failure_spot_check<R: Rng + ?Sized>(
    g: &GraphTopology,
    m: usize,
    samples: usize,
    rng: &mut R,
) -> bool {
    let n = g.node_count();
    if m >= n {
        return true;
    }
    (0..samples).all(|_| {
        let victims: HashSet<usize> = index::sample(rng, n, m).into_iter().collect();
        is_connected(&remove_nodes(g, &victims))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResilienceVerdict {
    pub connected: bool,
    pub min_degree: usize,
    /// Vertex connectivity `κ`.
    pub k_connected_up_to: usize,
    pub query_k: usize,
    pub k_connected: bool,
}

pub fn resilience_verdict(g: &GraphTopology, k: usize) -> ResilienceVerdict {
    let kappa = vertex_connectivity(g);
    ResilienceVerdict {
        connected: is_connected(g),
        min_degree: g.min_degree(),
        k_connected_up_to: kappa,
        query_k: k,
        k_connected: is_k_connected(g, k),
    }
}

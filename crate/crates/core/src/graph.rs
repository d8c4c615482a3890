//! Undirected simple graphs on dense node ids `0..n`.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{invalid, Result};

#[inline]
fn pair_key(a: usize, b: usize) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    ((lo as u64) << 32) | hi as u64
}

/// Immutable undirected simple graph.
///
/// Adjacency is kept twice: sorted neighbour lists for iteration and a pair
/// set for constant-time membership queries.
#[derive(Debug, Clone)]
pub struct GraphTopology {
    adjacency: Vec<Vec<usize>>,
    pairs: HashSet<u64>,
}

impl PartialEq for GraphTopology {
    fn eq(&self, other: &Self) -> bool {
        self.adjacency == other.adjacency
    }
}

impl Eq for GraphTopology {}

impl GraphTopology {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            pairs: HashSet::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        Self::from_unique_pairs(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    /// Builds a graph from an edge list. Duplicate pairs (in either
    /// orientation) collapse to one edge; self-loops and out-of-range ids are
    /// rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs = HashSet::new();
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            if a == b {
                return invalid(format!("self-loop at node {a}"));
            }
            if a >= n || b >= n {
                return invalid(format!("edge ({a}, {b}) out of range for n = {n}"));
            }
            if pairs.insert(pair_key(a, b)) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { adjacency, pairs })
    }

    /// Trusted constructor for generators that already produce each pair
    /// once with `i < j < n`.
    pub(crate) fn from_unique_pairs<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs = HashSet::new();
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            debug_assert!(a < b && b < n);
            pairs.insert(pair_key(a, b));
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self { adjacency, pairs }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.pairs.contains(&pair_key(a, b))
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// All edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .collect()
    }

    /// True when every edge of `self` is also an edge of `other`.
    pub fn is_subgraph_of(&self, other: &GraphTopology) -> bool {
        self.node_count() == other.node_count()
            && self.pairs.iter().all(|key| other.pairs.contains(key))
    }

    /// Minimum degree; zero for the empty node set.
    pub fn min_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn degree_histogram(&self) -> DegreeHistogram {
        let mut counts = BTreeMap::new();
        for list in &self.adjacency {
            *counts.entry(list.len()).or_insert(0) += 1;
        }
        DegreeHistogram { counts }
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut blocks = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut block = Vec::new();
            while let Some(v) = queue.pop_front() {
                block.push(v);
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            block.sort_unstable();
            blocks.push(block);
        }
        blocks
    }

    /// Edge-set intersection of two graphs on the same node set.
    pub fn intersect(&self, other: &GraphTopology) -> Result<GraphTopology> {
        if self.node_count() != other.node_count() {
            return invalid(format!(
                "cannot intersect graphs with {} and {} nodes",
                self.node_count(),
                other.node_count()
            ));
        }
        let (small, large) = if self.edge_count() <= other.edge_count() {
            (self, other)
        } else {
            (other, self)
        };
        Ok(GraphTopology::from_unique_pairs(
            self.node_count(),
            small.edges().into_iter().filter(|&(a, b)| large.has_edge(a, b)),
        ))
    }

    /// Edge-list dump: a `n=<count>` header followed by one `i j` line per
    /// edge with `i < j`.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.node_count());
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<GraphTopology> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let n = match lines.next() {
            Some((_, header)) => match header.strip_prefix("n=").map(str::parse::<usize>) {
                Some(Ok(n)) => n,
                _ => return invalid(format!("bad edge-list header {header:?}")),
            },
            None => return invalid("empty edge list"),
        };
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let mut parts = line.split_whitespace().map(str::parse::<usize>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) if a < b => edges.push((a, b)),
                _ => return invalid(format!("line {lineno}: expected \"i j\" with i < j")),
            }
        }
        GraphTopology::from_edges(n, edges)
    }
}

/// Intersection of two graphs; see [`GraphTopology::intersect`].
pub fn intersect_graphs(g1: &GraphTopology, g2: &GraphTopology) -> Result<GraphTopology> {
    g1.intersect(g2)
}

/// Number of nodes per degree value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeHistogram {
    counts: BTreeMap<usize, usize>,
}

impl DegreeHistogram {
    /// Number of nodes with exactly degree `h`.
    pub fn count(&self, h: usize) -> usize {
        self.counts.get(&h).copied().unwrap_or(0)
    }

    pub fn total_nodes(&self) -> usize {
        self.counts.values().sum()
    }

    /// `Σ h · count[h]`, which is twice the edge count.
    pub fn degree_sum(&self) -> usize {
        self.counts.iter().map(|(h, c)| h * c).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().map(|(&h, &c)| (h, c))
    }
}

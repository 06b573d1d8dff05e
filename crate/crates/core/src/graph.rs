//! Weighted graph with public topology and private integer edge weights.
//!
//! Nodes are dense ids `0..n`. Edges are stored once, canonically as `(u, v)`
//! with `u < v`, and edge ids follow the lexicographic order of those pairs.
//! Adjacency is kept in CSR form, sorted by neighbor id, so the incident
//! weight vector of a node is ordered by neighbor.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<i64>,
    offsets: Vec<usize>,
    adj: Vec<usize>,
    adj_edge: Vec<usize>,
}

impl WeightedGraph {
    /// Builds a graph from `(u, v, w)` triples. Order and orientation of the
    /// input do not matter; self-loops and duplicate edges are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, i64)>) -> Result<Self> {
        let mut list: Vec<(usize, usize, i64)> = Vec::new();
        for (u, v, w) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            list.push((u.min(v), u.max(v), w));
        }
        list.sort_unstable_by_key(|&(u, v, _)| (u, v));
        if let Some(w) = list
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }

        let mut degree = vec![0usize; n];
        for &(u, v, _) in &list {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![0usize; offsets[n]];
        let mut adj_edge = vec![0usize; offsets[n]];
        for (id, &(u, v, _)) in list.iter().enumerate() {
            adj[fill[u]] = v;
            adj_edge[fill[u]] = id;
            fill[u] += 1;
            adj[fill[v]] = u;
            adj_edge[fill[v]] = id;
            fill[v] += 1;
        }
        for v in 0..n {
            let range = offsets[v]..offsets[v + 1];
            let mut row: Vec<(usize, usize)> = adj[range.clone()]
                .iter()
                .copied()
                .zip(adj_edge[range.clone()].iter().copied())
                .collect();
            row.sort_unstable();
            for (slot, (nb, e)) in range.zip(row) {
                adj[slot] = nb;
                adj_edge[slot] = e;
            }
        }

        Ok(Self {
            n,
            edges: list.iter().map(|&(u, v, _)| (u, v)).collect(),
            weights: list.iter().map(|&(_, _, w)| w).collect(),
            offsets,
            adj,
            adj_edge,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Neighbors of `v`, sorted ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge ids incident to `v`, aligned with [`Self::neighbors`].
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.adj_edge[self.offsets[v]..self.offsets[v + 1]]
    }

    /// The incident weight vector `w^v`, ordered by neighbor id.
    pub fn incident_weights(&self, v: usize) -> Vec<i64> {
        self.incident_edges(v)
            .iter()
            .map(|&e| self.weights[e])
            .collect()
    }

    /// Canonical endpoints `(u, v)` with `u < v`.
    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.edges[edge]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.edges
            .iter()
            .zip(&self.weights)
            .map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn weight(&self, edge: usize) -> i64 {
        self.weights[edge]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Position of `u` in the adjacency row of `v`.
    pub fn slot_of(&self, v: usize, u: usize) -> Option<usize> {
        self.neighbors(v).binary_search(&u).ok()
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        // search the shorter row
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.slot_of(a, b).map(|s| self.incident_edges(a)[s])
    }

    pub fn weight_between(&self, u: usize, v: usize) -> Option<i64> {
        self.edge_id(u, v).map(|e| self.weights[e])
    }

    /// Same topology with a replacement weight table indexed by edge id.
    pub fn with_weights(&self, weights: Vec<i64>) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::Config(format!(
                "weight table has {} entries, graph has {} edges",
                weights.len(),
                self.edges.len()
            )));
        }
        Ok(Self {
            weights,
            ..self.clone()
        })
    }

    /// Subgraph induced by `keep` (need not be sorted). Kept nodes are
    /// relabeled `0..keep.len()` in ascending order of their original id.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<Self> {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut relabel = vec![usize::MAX; self.n];
        for (new, &old) in sorted.iter().enumerate() {
            if old >= self.n {
                return Err(Error::NodeOutOfRange {
                    node: old,
                    n: self.n,
                });
            }
            relabel[old] = new;
        }
        let edges = self
            .edges()
            .filter(|&(u, v, _)| relabel[u] != usize::MAX && relabel[v] != usize::MAX)
            .map(|(u, v, w)| (relabel[u], relabel[v], w));
        Self::new(sorted.len(), edges)
    }
}

/// A triangle `{a, b, c}` with `a < b < c`, carrying the ids of its edges
/// `{a,b}`, `{a,c}` and `{b,c}` in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle {
    pub nodes: [usize; 3],
    pub edges: [usize; 3],
}

impl Triangle {
    pub fn from_nodes(graph: &WeightedGraph, a: usize, b: usize, c: usize) -> Result<Self> {
        let mut nodes = [a, b, c];
        nodes.sort_unstable();
        let [a, b, c] = nodes;
        let edge = |u, v| graph.edge_id(u, v).ok_or(Error::MissingEdge(u, v));
        Ok(Self {
            nodes,
            edges: [edge(a, b)?, edge(a, c)?, edge(b, c)?],
        })
    }

    /// The node not on `self.edges[k]`.
    pub fn opposite_node(&self, k: usize) -> usize {
        self.nodes[2 - k]
    }

    /// Index into `self.edges` of the edge not incident to `node`.
    pub fn opposite_edge_index(&self, node: usize) -> Option<usize> {
        self.nodes.iter().position(|&x| x == node).map(|i| 2 - i)
    }

    pub fn contains_node(&self, node: usize) -> bool {
        self.nodes.contains(&node)
    }
}

/// Every triangle exactly once, sorted by node triple.
///
/// Edges are oriented from lower to higher (degree, id) rank, so each node
/// only intersects its out-neighborhood, bounding the work by `O(m^1.5)`.
pub fn enumerate_triangles(graph: &WeightedGraph) -> Vec<Triangle> {
    let n = graph.node_count();
    let rank_lt = |a: usize, b: usize| (graph.degree(a), a) < (graph.degree(b), b);
    let out: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|u| {
            graph
                .neighbors(u)
                .iter()
                .zip(graph.incident_edges(u))
                .filter(|&(&x, _)| rank_lt(u, x))
                .map(|(&x, &e)| (x, e))
                .collect()
        })
        .collect();

    let mut mark = vec![usize::MAX; n];
    let mut found = Vec::new();
    for u in 0..n {
        for &(x, e) in &out[u] {
            mark[x] = e;
        }
        for &(v, e_uv) in &out[u] {
            for &(x, e_vx) in &out[v] {
                if mark[x] != usize::MAX {
                    found.push(canonical(u, v, x, e_uv, mark[x], e_vx));
                }
            }
        }
        for &(x, _) in &out[u] {
            mark[x] = usize::MAX;
        }
    }
    found.sort_unstable();
    found
}

fn canonical(u: usize, v: usize, x: usize, e_uv: usize, e_ux: usize, e_vx: usize) -> Triangle {
    let mut tagged = [(u, v, e_uv), (u, x, e_ux), (v, x, e_vx)];
    for t in &mut tagged {
        if t.0 > t.1 {
            std::mem::swap(&mut t.0, &mut t.1);
        }
    }
    tagged.sort_unstable();
    let mut nodes = [u, v, x];
    nodes.sort_unstable();
    // sorted pairs over a sorted triple come out as (a,b), (a,c), (b,c)
    Triangle {
        nodes,
        edges: [tagged[0].2, tagged[1].2, tagged[2].2],
    }
}

/// `w_T`, the sum of the three edge weights.
pub fn triangle_weight(graph: &WeightedGraph, t: &Triangle) -> Result<i64> {
    let [a, b, c] = t.nodes;
    let w = |u, v| graph.weight_between(u, v).ok_or(Error::MissingEdge(u, v));
    Ok(w(a, b)? + w(a, c)? + w(b, c)?)
}

pub(crate) fn triangle_weight_unchecked(graph: &WeightedGraph, t: &Triangle) -> i64 {
    t.edges.iter().map(|&e| graph.weight(e)).sum()
}

/// Number of triangles whose weight is strictly below `lambda`.
pub fn exact_below_threshold_count(graph: &WeightedGraph, lambda: i64) -> u64 {
    count_below(graph, &enumerate_triangles(graph), lambda)
}

pub fn count_below(graph: &WeightedGraph, triangles: &[Triangle], lambda: i64) -> u64 {
    triangles
        .iter()
        .filter(|t| triangle_weight_unchecked(graph, t) < lambda)
        .count() as u64
}

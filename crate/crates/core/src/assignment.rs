//! Assignment of triangles to responsible nodes.
//!
//! Assigning triangle `T` to node `v` means `v` reads the noisy weight of
//! the edge of `T` opposite `v`. Two triangles reading the same noisy edge
//! form a `C'_4` instance and their estimates covary, so a good assignment
//! spreads the load `l(e)` (triangles reading edge `e`) evenly. Minimizing
//! `#C'_4 = sum_e l(e)(l(e)-1)/2` is the same as minimizing `sum_e l(e)^2`
//! because `sum_e l(e) = |triangles|` is fixed.

use crate::error::{Error, Result};
use crate::graph::{Triangle, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    /// Per triangle, the index into `Triangle::edges` of its noisy edge.
    choice: Vec<u8>,
    responsible: Vec<usize>,
    noisy_edge: Vec<usize>,
    loads: Vec<u32>,
    node_offsets: Vec<usize>,
    node_triangles: Vec<usize>,
}

impl Assignment {
    /// Builds an assignment from a per-triangle edge choice in `0..3`.
    pub fn from_choices(
        graph: &WeightedGraph,
        triangles: &[Triangle],
        choice: Vec<u8>,
    ) -> Result<Self> {
        if choice.len() != triangles.len() {
            return Err(Error::Config(format!(
                "{} choices for {} triangles",
                choice.len(),
                triangles.len()
            )));
        }
        if let Some(&c) = choice.iter().find(|&&c| c > 2) {
            return Err(Error::Config(format!("edge choice {c} not in 0..3")));
        }
        let responsible: Vec<usize> = triangles
            .iter()
            .zip(&choice)
            .map(|(t, &c)| t.opposite_node(c as usize))
            .collect();
        let noisy_edge: Vec<usize> = triangles
            .iter()
            .zip(&choice)
            .map(|(t, &c)| t.edges[c as usize])
            .collect();
        let mut loads = vec![0u32; graph.edge_count()];
        for &e in &noisy_edge {
            loads[e] += 1;
        }

        let n = graph.node_count();
        let mut node_offsets = vec![0usize; n + 1];
        for &v in &responsible {
            node_offsets[v + 1] += 1;
        }
        for v in 0..n {
            node_offsets[v + 1] += node_offsets[v];
        }
        let mut fill = node_offsets.clone();
        let mut node_triangles = vec![0usize; triangles.len()];
        for (t, &v) in responsible.iter().enumerate() {
            node_triangles[fill[v]] = t;
            fill[v] += 1;
        }
        Ok(Self {
            choice,
            responsible,
            noisy_edge,
            loads,
            node_offsets,
            node_triangles,
        })
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    /// `rho(T)` for the triangle at index `t`.
    pub fn responsible(&self, t: usize) -> usize {
        self.responsible[t]
    }

    /// Edge id whose noisy weight the responsible node reads for triangle `t`.
    pub fn noisy_edge(&self, t: usize) -> usize {
        self.noisy_edge[t]
    }

    pub fn choice(&self, t: usize) -> u8 {
        self.choice[t]
    }

    /// Indices of the triangles assigned to `v`, ascending.
    pub fn triangles_of(&self, v: usize) -> &[usize] {
        &self.node_triangles[self.node_offsets[v]..self.node_offsets[v + 1]]
    }

    /// Per-edge loads indexed by edge id.
    pub fn loads(&self) -> &[u32] {
        &self.loads
    }

    pub fn squared_load(&self) -> u64 {
        self.loads
            .iter()
            .map(|&l| u64::from(l) * u64::from(l))
            .sum()
    }

    /// `histogram[k]` = number of edges with load `k`.
    pub fn load_histogram(&self) -> Vec<usize> {
        let max = self.loads.iter().copied().max().unwrap_or(0) as usize;
        let mut h = vec![0usize; max + 1];
        for &l in &self.loads {
            h[l as usize] += 1;
        }
        h
    }
}

/// `#C'_4 = sum_e l(e) (l(e) - 1) / 2`.
pub fn count_c4_instances(a: &Assignment) -> u64 {
    a.loads
        .iter()
        .map(|&l| u64::from(l) * u64::from(l.saturating_sub(1)) / 2)
        .sum()
}

/// Greedy assignment: triangles are visited in the order given (canonical
/// order when they come from `enumerate_triangles`), and each picks the
/// currently least-loaded of its three edges, breaking ties by the lowest
/// edge id.
pub fn greedy_assign(graph: &WeightedGraph, triangles: &[Triangle]) -> Assignment {
    let mut loads = vec![0u32; graph.edge_count()];
    let choice: Vec<u8> = triangles
        .iter()
        .map(|t| {
            let best = (0..3u8)
                .min_by_key(|&k| (loads[t.edges[k as usize]], t.edges[k as usize]))
                .expect("three edges");
            loads[t.edges[best as usize]] += 1;
            best
        })
        .collect();
    Assignment::from_choices(graph, triangles, choice).expect("greedy choices are valid")
}

pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Exhaustively minimizes `sum_e l(e)^2` over all `3^|triangles|` edge
/// choices. Returns the first optimum in lexicographic choice order.
pub fn brute_force_optimal_assign(
    graph: &WeightedGraph,
    triangles: &[Triangle],
) -> Result<(Assignment, u64)> {
    if triangles.len() > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            what: "triangles",
            size: triangles.len(),
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let k = triangles.len();
    let mut loads = vec![0u64; graph.edge_count()];
    let mut current = vec![0u8; k];
    let mut best = (u64::MAX, current.clone());
    search(triangles, 0, &mut loads, 0, &mut current, &mut best);
    let (cost, choice) = best;
    Ok((Assignment::from_choices(graph, triangles, choice)?, cost))
}

fn search(
    triangles: &[Triangle],
    depth: usize,
    loads: &mut [u64],
    cost: u64,
    current: &mut [u8],
    best: &mut (u64, Vec<u8>),
) {
    if depth == triangles.len() {
        if cost < best.0 {
            *best = (cost, current.to_vec());
        }
        return;
    }
    for c in 0..3u8 {
        let e = triangles[depth].edges[c as usize];
        // (l+1)^2 - l^2 = 2l + 1
        let next = cost + 2 * loads[e] + 1;
        loads[e] += 1;
        current[depth] = c;
        search(triangles, depth + 1, loads, next, current, best);
        loads[e] -= 1;
    }
}

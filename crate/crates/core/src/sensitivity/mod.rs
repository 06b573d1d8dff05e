//! Global, local and β-smooth sensitivity of a node's local count `f'_v`.
//!
//! For an incident edge `i` and a sign `b`, a neighbor `w + z + b` changes
//! only the triangles of `Δ_v` containing `i`. Writing `c_j = w_j + w'_{u(i)u(j)}`
//! for those triangles, the smooth sensitivity becomes a problem of moving
//! the values `c_j` toward a target `t = λ - 1 - w_i - z_i` at ℓ1 cost
//! `|z|`, with every unit of movement discounted by `e^{-β}`.

mod distance;
mod fast;
mod oracle;
mod tree;

pub use distance::{
    joint_kth_distance, joint_sum_smallest, DistanceSource, DoubleTargetIndex, LeftOf, RightOf,
};
pub use oracle::{smooth_sensitivity_bruteforce, DEFAULT_RADIUS, ORACLE_DEGREE_LIMIT};
pub use tree::OrderStatTree;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::graph::WeightedGraph;

/// A triangle of `Δ_v` seen from `v`: the neighbor slots of its two incident
/// edges and the noisy weight of the opposite edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalTriangle {
    pub a: usize,
    pub b: usize,
    pub noisy: i64,
}

/// Everything node `v` knows when computing its sensitivity: its own
/// incident weights (indexed by neighbor slot) and the triangles assigned to
/// it with their received noisy weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothSensInstance {
    weights: Vec<i64>,
    triangles: Vec<LocalTriangle>,
    lambda: i64,
    beta: f64,
    kind: EstimatorKind,
}

impl SmoothSensInstance {
    pub fn new(
        weights: Vec<i64>,
        triangles: Vec<LocalTriangle>,
        lambda: i64,
        beta: f64,
        kind: EstimatorKind,
    ) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain(format!("beta must be positive, got {beta}")));
        }
        let d = weights.len();
        for t in &triangles {
            if t.a >= d || t.b >= d || t.a == t.b {
                return Err(Error::Config(format!(
                    "triangle slots ({}, {}) invalid for degree {d}",
                    t.a, t.b
                )));
            }
        }
        Ok(Self {
            weights,
            triangles,
            lambda,
            beta,
            kind,
        })
    }

    /// Builds `v`'s view from the graph, reading only `v`'s own weights and
    /// `noisy[e]` for the noisy edge of each triangle assigned to `v`.
    pub fn from_graph(
        graph: &WeightedGraph,
        assignment: &Assignment,
        v: usize,
        noisy: &[i64],
        lambda: i64,
        beta: f64,
        kind: EstimatorKind,
    ) -> Result<Self> {
        let triangles = assignment
            .triangles_of(v)
            .iter()
            .map(|&t| {
                let e = assignment.noisy_edge(t);
                let (x, y) = graph.endpoints(e);
                let slot = |u| graph.slot_of(v, u).ok_or(Error::MissingEdge(v, u));
                Ok(LocalTriangle {
                    a: slot(x)?,
                    b: slot(y)?,
                    noisy: noisy[e],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(graph.incident_weights(v), triangles, lambda, beta, kind)
    }

    pub fn degree(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn triangles(&self) -> &[LocalTriangle] {
        &self.triangles
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(
            self.weights.clone(),
            self.triangles.clone(),
            self.lambda,
            beta,
            self.kind,
        )
    }

    /// `c_j = w_j + noisy` for every triangle containing slot `i`.
    pub fn partial_sums(&self, i: usize) -> Vec<i64> {
        self.triangles
            .iter()
            .filter_map(|t| {
                if t.a == i {
                    Some(self.weights[t.b] + t.noisy)
                } else if t.b == i {
                    Some(self.weights[t.a] + t.noisy)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Local count `f'_v` at the given incident weights.
    pub fn local_count(&self, weights: &[i64]) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                self.kind
                    .estimate(weights[t.a] + weights[t.b] + t.noisy, self.lambda)
            })
            .sum()
    }

    /// Largest number of assigned triangles sharing one incident edge.
    pub fn max_edge_multiplicity(&self) -> usize {
        let mut count = vec![0usize; self.weights.len()];
        for t in &self.triangles {
            count[t.a] += 1;
            count[t.b] += 1;
        }
        count.into_iter().max().unwrap_or(0)
    }

    pub fn global_sensitivity(&self) -> f64 {
        self.kind.unit_sensitivity() * self.max_edge_multiplicity() as f64
    }
}

/// `GS(f'_v) = GS(g) * max_u |{T in Δ_v : {v,u} in T}|`.
pub fn global_sensitivity(
    v: usize,
    assignment: &Assignment,
    graph: &WeightedGraph,
    kind: EstimatorKind,
) -> f64 {
    let mut count = vec![0usize; graph.degree(v)];
    for &t in assignment.triangles_of(v) {
        let (x, y) = graph.endpoints(assignment.noisy_edge(t));
        for u in [x, y] {
            if let Some(s) = graph.slot_of(v, u) {
                count[s] += 1;
            }
        }
    }
    kind.unit_sensitivity() * count.into_iter().max().unwrap_or(0) as f64
}

/// `LS(w) = max over neighbors w ± e_i of |f'_v(w') - f'_v(w)|`, evaluated
/// directly on triangle weights.
pub fn local_sensitivity(inst: &SmoothSensInstance) -> f64 {
    let kind = inst.kind();
    let lambda = inst.lambda();
    let mut best = 0.0f64;
    for i in 0..inst.degree() {
        let sums = inst.partial_sums(i);
        for b in [1i64, -1] {
            let diff: f64 = sums
                .iter()
                .map(|&c| {
                    let w = c + inst.weights()[i];
                    kind.estimate(w + b, lambda) - kind.estimate(w, lambda)
                })
                .sum();
            best = best.max(diff.abs());
        }
    }
    best
}

/// β-smooth sensitivity with the biased estimator, via order-statistic trees.
pub fn smooth_sensitivity_biased(inst: &SmoothSensInstance) -> Result<f64> {
    if !inst.kind().is_biased() {
        return Err(Error::Config("instance uses the unbiased estimator".into()));
    }
    Ok(fast::biased(inst))
}

/// β-smooth sensitivity with the unbiased estimator, via double-target indexes.
pub fn smooth_sensitivity_unbiased(inst: &SmoothSensInstance) -> Result<f64> {
    match inst.kind() {
        EstimatorKind::Unbiased { p } => Ok(fast::unbiased(inst, crate::estimators::x_of(p))),
        EstimatorKind::Biased => Err(Error::Config("instance uses the biased estimator".into())),
    }
}

/// Dispatches on the instance's estimator.
pub fn smooth_sensitivity(inst: &SmoothSensInstance) -> f64 {
    match inst.kind() {
        EstimatorKind::Biased => fast::biased(inst),
        EstimatorKind::Unbiased { p } => fast::unbiased(inst, crate::estimators::x_of(p)),
    }
}

#[cfg(test)]
mod tests;

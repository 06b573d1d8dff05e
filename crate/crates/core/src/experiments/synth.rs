//! Synthetic graphs, subsampling and weight scaling.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::graph::{enumerate_triangles, triangle_weight, WeightedGraph};
use crate::mechanisms::RandomSource;

pub const MILAN_TOTAL_CALLS: u64 = 20_000;
/// Edge count of the complete 278-station telecom graph the call total is spread over.
pub const MILAN_EDGES: u64 = 38_503;

/// `w_e = L * I_e / sum(I)`, rounded by largest remainder so the weights
/// are integers summing to exactly `L`. Ties go to the lower index.
pub fn milan_scale_weights(intensities: &[f64], total: u64) -> Result<Vec<i64>> {
    if let Some(bad) = intensities.iter().find(|&&i| !(i.is_finite() && i > 0.0)) {
        return Err(Error::Domain(format!(
            "intensities must be positive, got {bad}"
        )));
    }
    let sum: f64 = intensities.iter().sum();
    if intensities.is_empty() {
        return Ok(Vec::new());
    }
    let quotas: Vec<f64> = intensities
        .iter()
        .map(|&i| total as f64 * i / sum)
        .collect();
    let mut weights: Vec<i64> = quotas.iter().map(|q| q.floor() as i64).collect();
    let assigned: i64 = weights.iter().sum();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let left = (total as i64 - assigned).max(0) as usize;
    for &e in order.iter().take(left) {
        weights[e] += 1;
    }
    Ok(weights)
}

/// G(n, density) with weights uniform in `lo..=hi`.
pub fn generate_synthetic(
    n: usize,
    density: f64,
    weights: (i64, i64),
    seed: u64,
) -> Result<WeightedGraph> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Domain(format!("density {density} not in [0, 1]")));
    }
    let (lo, hi) = weights;
    if lo > hi {
        return Err(Error::Domain(format!("empty weight range {lo}..={hi}")));
    }
    let mut rng = RandomSource::new(seed).auxiliary(0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                edges.push((u, v, rng.random_range(lo..=hi)));
            }
        }
    }
    WeightedGraph::new(n, edges)
}

/// G(n, density) with telecom-like weights: exponential intensities scaled
/// by [`milan_scale_weights`] to the same calls-per-edge ratio as the
/// Milan graph, so most weights are 0 and a few are large.
pub fn generate_milan_like(n: usize, density: f64, seed: u64) -> Result<WeightedGraph> {
    let topology = generate_synthetic(n, density, (0, 0), seed)?;
    let m = topology.edge_count() as u64;
    let mut rng = RandomSource::new(seed).auxiliary(1);
    let intensities: Vec<f64> = (0..m).map(|_| Exp1.sample(&mut rng)).collect();
    let calls = (m * MILAN_TOTAL_CALLS + MILAN_EDGES / 2) / MILAN_EDGES;
    topology.with_weights(milan_scale_weights(&intensities, calls)?)
}

/// Subgraph induced by `k` nodes drawn uniformly without replacement.
pub fn induced_subsample<R: Rng + ?Sized>(
    graph: &WeightedGraph,
    k: usize,
    rng: &mut R,
) -> Result<WeightedGraph> {
    let n = graph.node_count();
    if k > n {
        return Err(Error::OutOfRange { k, size: n });
    }
    graph.induced_subgraph(&sample(rng, n, k).into_vec())
}

/// Threshold at the 90th percentile of triangle weights, so about 10% of
/// triangles weigh at least `λ`. `None` for triangle-free graphs.
pub fn default_lambda(graph: &WeightedGraph) -> Option<i64> {
    let mut w: Vec<i64> = enumerate_triangles(graph)
        .iter()
        .map(|t| triangle_weight(graph, t).expect("enumerated triangle"))
        .collect();
    if w.is_empty() {
        return None;
    }
    w.sort_unstable();
    let at = (w.len() * 9 / 10).min(w.len() - 1);
    Some(w[at])
}

//! In-process simulation of the two-step protocol and the one-shot baseline.
//!
//! Step 1: every node releases its incident weights with discrete Laplace
//! noise and the server symmetrizes them. The server assigns each triangle
//! to one of its nodes and sends that node the noisy weight of the opposite
//! edge. Step 2: each node evaluates its local estimator sum `f'_v` on its
//! own true weights plus the received values and releases it with Laplace
//! noise scaled to global sensitivity or heavy-tailed noise scaled to
//! β-smooth sensitivity. The server adds up the releases.

use rand::distr::Distribution;

use crate::assignment::{greedy_assign, Assignment};
use crate::budget::{BudgetLedger, PrivacyBudget, Round};
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::graph::{count_below, enumerate_triangles, Triangle, WeightedGraph};
use crate::mechanisms::{Laplace, NoiseMode, RandomSource, SmoothNoiseConfig};
use crate::sensitivity::{smooth_sensitivity, SmoothSensInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mechanism {
    GlobalLaplace,
    SmoothSensitivity,
}

impl Mechanism {
    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::GlobalLaplace => "global",
            Mechanism::SmoothSensitivity => "smooth",
        }
    }
}

/// Step-1 output: each node's noisy vector and the symmetrized map `w'`
/// indexed by edge id, where edge `{u, v}` with `u < v` takes `u`'s value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoisyRelease {
    per_node: Vec<Vec<i64>>,
    symmetric: Vec<i64>,
}

impl NoisyRelease {
    pub fn from_vectors(graph: &WeightedGraph, per_node: Vec<Vec<i64>>) -> Result<Self> {
        if per_node.len() != graph.node_count() {
            return Err(Error::Config(format!(
                "{} vectors for {} nodes",
                per_node.len(),
                graph.node_count()
            )));
        }
        for (v, w) in per_node.iter().enumerate() {
            if w.len() != graph.degree(v) {
                return Err(Error::Config(format!(
                    "node {v}: vector of length {} for degree {}",
                    w.len(),
                    graph.degree(v)
                )));
            }
        }
        let symmetric = (0..graph.edge_count())
            .map(|e| {
                let (u, v) = graph.endpoints(e);
                per_node[u][graph.slot_of(u, v).expect("edge endpoints are adjacent")]
            })
            .collect();
        Ok(Self {
            per_node,
            symmetric,
        })
    }

    pub fn node_vector(&self, v: usize) -> &[i64] {
        &self.per_node[v]
    }

    /// `w'_e` for edge id `e`.
    pub fn edge(&self, e: usize) -> i64 {
        self.symmetric[e]
    }

    pub fn symmetric(&self) -> &[i64] {
        &self.symmetric
    }
}

/// Number of values sent in each flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MessageTally {
    /// Noisy weights uploaded in step 1 (`sum_v d_v = 2m`).
    pub weight_uploads: usize,
    /// Noisy weights sent back to responsible nodes (one per triangle).
    pub downloads: usize,
    /// Local counts uploaded in step 2 (one per node).
    pub count_uploads: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// `k~`, the sum of the released values.
    pub estimate: f64,
    /// `f(G)`.
    pub exact: u64,
    /// Per-node released values `f~_v` (or, for the baseline, per-node
    /// counts of the triangles whose smallest node is `v`).
    pub releases: Vec<f64>,
    pub messages: MessageTally,
    pub ledger: BudgetLedger,
}

impl RunReport {
    /// `|f(G) - k~| / f(G)`, undefined when `f(G) = 0`.
    pub fn relative_error(&self) -> Option<f64> {
        (self.exact > 0).then(|| (self.exact as f64 - self.estimate).abs() / self.exact as f64)
    }
}

pub fn communication_report(run: &RunReport) -> MessageTally {
    run.messages
}

/// Public, data-independent work shared across runs on one graph:
/// triangle enumeration and the greedy assignment.
#[derive(Debug, Clone)]
pub struct ProtocolContext<'g> {
    graph: &'g WeightedGraph,
    triangles: Vec<Triangle>,
    assignment: Assignment,
}

impl<'g> ProtocolContext<'g> {
    pub fn new(graph: &'g WeightedGraph) -> Self {
        let triangles = enumerate_triangles(graph);
        let assignment = greedy_assign(graph, &triangles);
        Self {
            graph,
            triangles,
            assignment,
        }
    }

    pub fn graph(&self) -> &WeightedGraph {
        self.graph
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }
}

#[cfg(feature = "parallel")]
fn map_nodes<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_nodes<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Step 1: each node privatizes its own vector on its own substream.
pub fn release_weights(
    graph: &WeightedGraph,
    eps1: f64,
    rng: &RandomSource,
) -> Result<NoisyRelease> {
    release_with(graph, eps1, rng, NoiseMode::Calibrated)
}

fn release_with(
    graph: &WeightedGraph,
    eps1: f64,
    rng: &RandomSource,
    mode: NoiseMode,
) -> Result<NoisyRelease> {
    let per_node = map_nodes(graph.node_count(), |v| {
        let mut r = rng.substream(v, Round::WeightRelease);
        mode.privatize(&graph.incident_weights(v), eps1, &mut r)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    NoisyRelease::from_vectors(graph, per_node)
}

/// What node `v` holds in step 2: its own weights and, for each triangle
/// assigned to it, the noisy weight it was sent.
pub fn node_view(
    ctx: &ProtocolContext<'_>,
    release: &NoisyRelease,
    v: usize,
    lambda: i64,
    beta: f64,
    kind: EstimatorKind,
) -> Result<SmoothSensInstance> {
    SmoothSensInstance::from_graph(
        ctx.graph,
        &ctx.assignment,
        v,
        release.symmetric(),
        lambda,
        beta,
        kind,
    )
}

fn check_kind(kind: EstimatorKind, budget: &PrivacyBudget) -> Result<()> {
    if let EstimatorKind::Unbiased { p } = kind {
        let expected = budget.p();
        if (p - expected).abs() > 1e-12 * expected {
            return Err(Error::Config(format!(
                "unbiased estimator built for p = {p}, but epsilon_1 gives p = {expected}"
            )));
        }
    }
    Ok(())
}

pub fn run_two_step(
    graph: &WeightedGraph,
    lambda: i64,
    budget: PrivacyBudget,
    kind: EstimatorKind,
    mechanism: Mechanism,
    rng: &RandomSource,
) -> Result<RunReport> {
    run_two_step_in(
        &ProtocolContext::new(graph),
        lambda,
        budget,
        kind,
        mechanism,
        rng,
    )
}

/// [`run_two_step`] reusing a prepared context.
pub fn run_two_step_in(
    ctx: &ProtocolContext<'_>,
    lambda: i64,
    budget: PrivacyBudget,
    kind: EstimatorKind,
    mechanism: Mechanism,
    rng: &RandomSource,
) -> Result<RunReport> {
    two_step(
        ctx,
        lambda,
        budget,
        kind,
        mechanism,
        rng,
        NoiseMode::Calibrated,
    )
}

fn two_step(
    ctx: &ProtocolContext<'_>,
    lambda: i64,
    budget: PrivacyBudget,
    kind: EstimatorKind,
    mechanism: Mechanism,
    rng: &RandomSource,
    mode: NoiseMode,
) -> Result<RunReport> {
    check_kind(kind, &budget)?;
    let graph = ctx.graph;
    let n = graph.node_count();
    let mut ledger = BudgetLedger::new(n, budget.total());

    for v in 0..n {
        ledger.charge(v, Round::WeightRelease, budget.eps1())?;
    }
    let release = release_with(graph, budget.eps1(), rng, mode)?;

    let cfg = SmoothNoiseConfig::default();
    let eps2 = budget.eps2();
    let beta = cfg.beta(eps2);
    for v in 0..n {
        ledger.charge(v, Round::CountRelease, eps2)?;
    }
    // without step-1 noise the estimator is evaluated at its p -> 0 limit,
    // where h is the plain indicator
    let kind = if mode == NoiseMode::Disabled {
        EstimatorKind::Biased
    } else {
        kind
    };
    let releases = map_nodes(n, |v| -> Result<f64> {
        let view = node_view(ctx, &release, v, lambda, beta, kind)?;
        let local = view.local_count(view.weights());
        if mode == NoiseMode::Disabled || view.triangles().is_empty() {
            return Ok(local);
        }
        let mut r = rng.substream(v, Round::CountRelease);
        Ok(match mechanism {
            Mechanism::GlobalLaplace => {
                local + Laplace::new(view.global_sensitivity() / eps2)?.sample(&mut r)
            }
            Mechanism::SmoothSensitivity => {
                let s = smooth_sensitivity(&view);
                local + cfg.scale(eps2) * s * cfg.sample(&mut r)
            }
        })
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;

    Ok(RunReport {
        estimate: releases.iter().sum(),
        exact: count_below(graph, &ctx.triangles, lambda),
        releases,
        messages: MessageTally {
            weight_uploads: 2 * graph.edge_count(),
            downloads: ctx.triangles.len(),
            count_uploads: n,
        },
        ledger,
    })
}

/// Non-interactive baseline: release all weights once with the full budget
/// and count triangles of the noisy graph below `λ`.
pub fn run_baseline(
    graph: &WeightedGraph,
    lambda: i64,
    epsilon: f64,
    rng: &RandomSource,
) -> Result<RunReport> {
    baseline(
        &ProtocolContext::new(graph),
        lambda,
        epsilon,
        rng,
        NoiseMode::Calibrated,
    )
}

/// [`run_baseline`] reusing a prepared context.
pub fn run_baseline_in(
    ctx: &ProtocolContext<'_>,
    lambda: i64,
    epsilon: f64,
    rng: &RandomSource,
) -> Result<RunReport> {
    baseline(ctx, lambda, epsilon, rng, NoiseMode::Calibrated)
}

fn baseline(
    ctx: &ProtocolContext<'_>,
    lambda: i64,
    epsilon: f64,
    rng: &RandomSource,
    mode: NoiseMode,
) -> Result<RunReport> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Config(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let graph = ctx.graph;
    let n = graph.node_count();
    let mut ledger = BudgetLedger::new(n, epsilon);
    for v in 0..n {
        ledger.charge(v, Round::WeightRelease, epsilon)?;
    }
    let release = release_with(graph, epsilon, rng, mode)?;
    let mut releases = vec![0.0; n];
    for t in &ctx.triangles {
        let w: i64 = t.edges.iter().map(|&e| release.edge(e)).sum();
        if w < lambda {
            releases[t.nodes[0]] += 1.0;
        }
    }
    Ok(RunReport {
        estimate: releases.iter().sum(),
        exact: count_below(graph, &ctx.triangles, lambda),
        releases,
        messages: MessageTally {
            weight_uploads: 2 * graph.edge_count(),
            downloads: 0,
            count_uploads: 0,
        },
        ledger,
    })
}

/// Entry points with every noise source switched off. They exist only for
/// end-to-end identity checks and are not private.
pub(crate) mod noiseless {
    use super::*;

    pub fn run_two_step(
        ctx: &ProtocolContext<'_>,
        lambda: i64,
        budget: PrivacyBudget,
        kind: EstimatorKind,
        mechanism: Mechanism,
    ) -> Result<RunReport> {
        two_step(
            ctx,
            lambda,
            budget,
            kind,
            mechanism,
            &RandomSource::new(0),
            NoiseMode::Disabled,
        )
    }

    pub fn run_baseline(ctx: &ProtocolContext<'_>, lambda: i64, epsilon: f64) -> Result<RunReport> {
        baseline(
            ctx,
            lambda,
            epsilon,
            &RandomSource::new(0),
            NoiseMode::Disabled,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::expected_biased;
    use crate::graph::triangle_weight;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(n: usize, density: f64, lo: i64, hi: i64, seed: u64) -> WeightedGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(density) {
                    edges.push((u, v, rng.random_range(lo..=hi)));
                }
            }
        }
        WeightedGraph::new(n, edges).unwrap()
    }

    fn k4() -> WeightedGraph {
        WeightedGraph::new(4, (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v, 0)))).unwrap()
    }

    #[test]
    fn symmetrization_takes_lower_endpoint() {
        let g = WeightedGraph::new(3, [(0, 1, 5), (1, 2, 7)]).unwrap();
        let rel = NoisyRelease::from_vectors(&g, vec![vec![10], vec![11, 12], vec![13]]).unwrap();
        assert_eq!(rel.edge(g.edge_id(0, 1).unwrap()), 10);
        assert_eq!(rel.edge(g.edge_id(1, 2).unwrap()), 12);
        assert!(NoisyRelease::from_vectors(&g, vec![vec![1], vec![2], vec![3]]).is_err());
    }

    #[test]
    fn noiseless_runs_are_exact() {
        let g = random_graph(30, 0.4, -5, 5, 1);
        let ctx = ProtocolContext::new(&g);
        let budget = PrivacyBudget::even(2.0).unwrap();
        let f = count_below(&g, ctx.triangles(), 0) as f64;
        let unbiased = EstimatorKind::unbiased(budget.p()).unwrap();
        for mech in [Mechanism::GlobalLaplace, Mechanism::SmoothSensitivity] {
            let r = noiseless::run_two_step(&ctx, 0, budget, unbiased, mech).unwrap();
            assert!((r.estimate - f).abs() < 1e-9);
            let r = noiseless::run_two_step(&ctx, 0, budget, EstimatorKind::Biased, mech).unwrap();
            assert_eq!(r.estimate, f);
        }
        assert_eq!(noiseless::run_baseline(&ctx, 0, 1.0).unwrap().estimate, f);
    }

    #[test]
    fn budget_and_messages() {
        let g = k4();
        let budget = PrivacyBudget::new(2.0, 0.5, 1.5).unwrap();
        let r = run_two_step(
            &g,
            1,
            budget,
            EstimatorKind::Biased,
            Mechanism::SmoothSensitivity,
            &RandomSource::new(3),
        )
        .unwrap();
        for v in 0..4 {
            let charges = r.ledger.charges(v);
            assert_eq!(charges.len(), 2);
            assert_eq!(
                (charges[0].round, charges[0].epsilon),
                (Round::WeightRelease, 0.5)
            );
            assert_eq!(
                (charges[1].round, charges[1].epsilon),
                (Round::CountRelease, 1.5)
            );
        }
        let m = communication_report(&r);
        assert_eq!((m.weight_uploads, m.downloads, m.count_uploads), (12, 4, 4));
        assert_eq!(r.estimate, r.releases.iter().sum::<f64>());

        let empty = WeightedGraph::new(3, []).unwrap();
        let r = run_two_step(
            &empty,
            1,
            budget,
            EstimatorKind::Biased,
            Mechanism::GlobalLaplace,
            &RandomSource::new(3),
        )
        .unwrap();
        assert_eq!(
            communication_report(&r),
            MessageTally {
                count_uploads: 3,
                ..Default::default()
            }
        );
        let r = run_baseline(&empty, 1, 1.0, &RandomSource::new(3)).unwrap();
        assert_eq!(communication_report(&r), MessageTally::default());
    }

    #[test]
    fn rejects_mismatched_estimator() {
        let g = k4();
        let budget = PrivacyBudget::even(2.0).unwrap();
        let wrong = EstimatorKind::unbiased(0.5).unwrap();
        assert!(matches!(
            run_two_step(
                &g,
                1,
                budget,
                wrong,
                Mechanism::GlobalLaplace,
                &RandomSource::new(0)
            ),
            Err(Error::Config(_))
        ));
        assert!(run_baseline(&g, 1, 0.0, &RandomSource::new(0)).is_err());
    }

    #[test]
    fn deterministic_under_seed() {
        let g = random_graph(25, 0.5, 0, 10, 2);
        let budget = PrivacyBudget::even(2.0).unwrap();
        let kind = EstimatorKind::unbiased(budget.p()).unwrap();
        let run = |s| {
            run_two_step(
                &g,
                15,
                budget,
                kind,
                Mechanism::SmoothSensitivity,
                &RandomSource::new(s),
            )
            .unwrap()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9).estimate, run(10).estimate);
    }

    #[test]
    fn baseline_unreachable_threshold() {
        let r = run_baseline(&k4(), 1_000_000, 0.5, &RandomSource::new(1)).unwrap();
        assert_eq!(r.estimate, 4.0);
    }

    #[test]
    fn step_two_ignores_other_nodes_private_weights() {
        let g = random_graph(20, 0.6, -5, 5, 4);
        let ctx = ProtocolContext::new(&g);
        let release = release_weights(&g, 1.0, &RandomSource::new(5)).unwrap();
        let kind = EstimatorKind::unbiased((-1.0f64).exp()).unwrap();
        let v = (0..20)
            .max_by_key(|&v| ctx.assignment().triangles_of(v).len())
            .unwrap();
        let before = node_view(&ctx, &release, v, 0, 0.3, kind).unwrap();

        for u in (0..20).filter(|&u| u != v) {
            // tamper with every weight of u that is not shared with v
            let mut w = g.weights().to_vec();
            for (&x, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
                if x != v {
                    w[e] += 1000;
                }
            }
            let tampered = g.with_weights(w).unwrap();
            let tctx = ProtocolContext::new(&tampered);
            let after = node_view(&tctx, &release, v, 0, 0.3, kind).unwrap();
            assert_eq!(before, after);
            assert_eq!(
                before.local_count(before.weights()),
                after.local_count(after.weights())
            );
        }
    }

    #[test]
    fn unbiased_mean_matches_exact_count() {
        let g = random_graph(50, 0.3, 0, 10, 6);
        let ctx = ProtocolContext::new(&g);
        let budget = PrivacyBudget::from_parts(1.0, 1.0).unwrap();
        let kind = EstimatorKind::unbiased(budget.p()).unwrap();
        let lambda = 15;
        let runs: Vec<f64> = (0..200)
            .map(|s| {
                run_two_step_in(
                    &ctx,
                    lambda,
                    budget,
                    kind,
                    Mechanism::GlobalLaplace,
                    &RandomSource::new(s),
                )
                .unwrap()
                .estimate
            })
            .collect();
        let (mean, se) = mean_se(&runs);
        let f = count_below(&g, ctx.triangles(), lambda) as f64;
        assert!((mean - f).abs() < 3.0 * se, "mean {mean} f {f} se {se}");
    }

    fn biased_mean_check(mechanism: Mechanism, trials: u64) {
        let g = random_graph(50, 0.3, 0, 10, 7);
        let ctx = ProtocolContext::new(&g);
        let budget = PrivacyBudget::from_parts(1.0, 1.0).unwrap();
        let lambda = 15;
        let runs: Vec<f64> = (0..trials)
            .map(|s| {
                run_two_step_in(
                    &ctx,
                    lambda,
                    budget,
                    EstimatorKind::Biased,
                    mechanism,
                    &RandomSource::new(s),
                )
                .unwrap()
                .estimate
            })
            .collect();
        let (mean, se) = mean_se(&runs);
        let expected: f64 = ctx
            .triangles()
            .iter()
            .map(|t| expected_biased(triangle_weight(&g, t).unwrap(), lambda, budget.p()))
            .sum();
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "mean {mean} expected {expected} se {se}"
        );
    }

    #[test]
    fn biased_mean_matches_expectation() {
        biased_mean_check(Mechanism::GlobalLaplace, 200);
    }

    // heavy-tailed release noise: the sample SE settles slowly, so use more runs
    #[test]
    fn biased_smooth_mean_matches_expectation() {
        biased_mean_check(Mechanism::SmoothSensitivity, 1000);
    }

    fn mean_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }
}

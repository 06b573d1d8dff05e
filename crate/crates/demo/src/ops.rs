use lwdp_core::budget::PrivacyBudget;
use lwdp_core::error::{Error, Result};
use lwdp_core::estimators::{
    biased_variance, expected_biased, unbiased_variance_exact, EstimatorKind,
};
use lwdp_core::experiments::{default_lambda, generate_synthetic};
use lwdp_core::graph::WeightedGraph;
use lwdp_core::mechanisms::RandomSource;
use lwdp_core::protocol::{
    node_view, release_weights, run_baseline_in, run_two_step_in, Mechanism, ProtocolContext,
};
use lwdp_core::sensitivity::{local_sensitivity, smooth_sensitivity};

fn graph(nodes: usize, density: f64, max_weight: i64, seed: u64) -> Result<(WeightedGraph, i64)> {
    let g = generate_synthetic(nodes, density, (0, max_weight), seed)?;
    let lambda =
        default_lambda(&g).ok_or_else(|| Error::Config("graph has no triangles".into()))?;
    Ok((g, lambda))
}

/// Sensitivities of the node with the most assigned triangles.
///
/// Output: `[node, λ, LS, GS, S*(β_1), S*(β_2), ...]`.
pub fn sensitivity_curve(
    nodes: usize,
    density: f64,
    max_weight: i64,
    seed: u64,
    eps1: f64,
    unbiased: bool,
    betas: &[f64],
) -> Result<Vec<f64>> {
    let (g, lambda) = graph(nodes, density, max_weight, seed)?;
    let kind = if unbiased {
        EstimatorKind::unbiased_for_epsilon(eps1)?
    } else {
        EstimatorKind::Biased
    };
    let ctx = ProtocolContext::new(&g);
    let release = release_weights(&g, eps1, &RandomSource::new(seed))?;
    let v = (0..g.node_count())
        .max_by_key(|&v| ctx.assignment().triangles_of(v).len())
        .ok_or_else(|| Error::Config("empty graph".into()))?;
    let inst = node_view(&ctx, &release, v, lambda, 1.0, kind)?;
    let mut out = vec![
        v as f64,
        lambda as f64,
        local_sensitivity(&inst),
        inst.global_sensitivity(),
    ];
    for &beta in betas {
        out.push(smooth_sensitivity(&inst.with_beta(beta)?));
    }
    Ok(out)
}

/// Rows of `[w_T - λ, E[biased], Var[biased], Var[unbiased]]` for
/// `w_T - λ` in `lo..=hi`.
pub fn estimator_moments(p: f64, lo: i64, hi: i64) -> Result<Vec<f64>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} not in (0, 1)")));
    }
    if hi < lo || hi - lo > 1000 {
        return Err(Error::Domain(format!("bad range {lo}..={hi}")));
    }
    Ok((lo..=hi)
        .flat_map(|d| {
            [
                d as f64,
                expected_biased(d, 0, p),
                biased_variance(d, 0, p),
                unbiased_variance_exact(d, 0, p),
            ]
        })
        .collect())
}

/// A two-step run and a baseline run on the same graph.
///
/// Output: `[f(G), two-step k~, baseline k~, weight uploads, downloads,
/// count uploads, |Δ|]`.
pub fn protocol_run(
    nodes: usize,
    density: f64,
    max_weight: i64,
    seed: u64,
    eps: f64,
    unbiased: bool,
    smooth: bool,
) -> Result<Vec<f64>> {
    let (g, lambda) = graph(nodes, density, max_weight, seed)?;
    let budget = PrivacyBudget::even(eps)?;
    let kind = if unbiased {
        EstimatorKind::unbiased(budget.p())?
    } else {
        EstimatorKind::Biased
    };
    let mechanism = if smooth {
        Mechanism::SmoothSensitivity
    } else {
        Mechanism::GlobalLaplace
    };
    let ctx = ProtocolContext::new(&g);
    let rng = RandomSource::new(seed.wrapping_add(1));
    let run = run_two_step_in(&ctx, lambda, budget, kind, mechanism, &rng)?;
    let base = run_baseline_in(&ctx, lambda, eps, &rng)?;
    Ok(vec![
        run.exact as f64,
        run.estimate,
        base.estimate,
        run.messages.weight_uploads as f64,
        run.messages.downloads as f64,
        run.messages.count_uploads as f64,
        ctx.triangles().len() as f64,
    ])
}

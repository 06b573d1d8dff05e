//! The efficient smooth-sensitivity algorithms.
//!
//! Both work per incident edge `i` and per base target: `λ - 1 - w_i` for a
//! unit increase of `w_i` and `λ - w_i` for a unit decrease. Values are kept
//! as natural logs so large shift costs underflow gracefully.

use super::distance::{joint_kth_distance, joint_sum_smallest, DoubleTargetIndex, LeftOf, RightOf};
use super::tree::OrderStatTree;
use super::SmoothSensInstance;

fn base_targets(inst: &SmoothSensInstance, i: usize) -> [i64; 2] {
    let w = inst.weights()[i];
    [inst.lambda() - 1 - w, inst.lambda() - w]
}

fn finish(best_log: f64) -> f64 {
    if best_log == f64::NEG_INFINITY {
        0.0
    } else {
        best_log.exp()
    }
}

/// First `k` in `[lo, hi)` where a prefix-true predicate fails, or `hi`.
/// Gallops from `lo` so the cost is logarithmic in the answer, which is
/// usually small because distant values are not worth shifting.
fn first_false(lo: usize, hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    let mut known_true = None;
    let mut step = 1;
    let mut probe = lo;
    while probe < hi && pred(probe) {
        known_true = Some(probe);
        probe = lo + step;
        step *= 2;
    }
    let (mut a, mut b) = (known_true.map_or(lo, |k| k + 1), probe.min(hi));
    while a < b {
        let mid = a + (b - a) / 2;
        if pred(mid) {
            a = mid + 1;
        } else {
            b = mid;
        }
    }
    a
}

pub(super) fn biased(inst: &SmoothSensInstance) -> f64 {
    let beta = inst.beta();
    let mut best = f64::NEG_INFINITY;
    for i in 0..inst.degree() {
        let c = inst.partial_sums(i);
        if c.is_empty() {
            continue;
        }
        for t0 in base_targets(inst, i) {
            best = best.max(biased_edge(&c, t0, beta));
        }
    }
    finish(best)
}

/// `max_t max_k ln k - β(|t - t0| + sum of the k smallest |c_j - t|)`
/// over targets `t in c ∪ {t0}`.
fn biased_edge(c: &[i64], t0: i64, beta: f64) -> f64 {
    let mut targets: Vec<i64> = c.iter().copied().chain([t0]).collect();
    targets.sort_unstable();
    targets.dedup();

    let s = c.len();
    let mut left = OrderStatTree::new();
    let mut right = OrderStatTree::from_keys(c.iter().copied());
    let mut best = f64::NEG_INFINITY;
    for t in targets {
        while let Some(m) = right.min() {
            if m > t {
                break;
            }
            right.remove(m);
            left.insert(m);
        }
        let lv = LeftOf {
            tree: &left,
            target: t,
        };
        let rv = RightOf {
            tree: &right,
            target: t,
        };
        let d = |k: usize| joint_kth_distance(&lv, &rv, k).expect("k within size").0;

        // Obj(k+1) >= Obj(k) iff k/(k+1) <= e^{-β d(k+1)}; true for a prefix of k
        let k = first_false(1, s, |k| {
            (k as f64 / (k + 1) as f64).ln() <= -beta * d(k + 1) as f64
        });
        let cost = (t - t0).unsigned_abs() as f64
            + joint_sum_smallest(&lv, &rv, k).expect("k within size") as f64;
        best = best.max((k as f64).ln() - beta * cost);
    }
    best
}

pub(super) fn unbiased(inst: &SmoothSensInstance, x: f64) -> f64 {
    let beta = inst.beta();
    let mut best = f64::NEG_INFINITY;
    for i in 0..inst.degree() {
        let c = inst.partial_sums(i);
        if c.is_empty() {
            continue;
        }
        for t0 in base_targets(inst, i) {
            best = best.max(unbiased_edge(&c, t0, beta, x));
        }
    }
    finish(best)
}

/// Best `(a + b k) e^{-β (base + k)}` over integer `k in [0, cap]`. The
/// real stationary point is `1/β - a/b`; the function is unimodal so the
/// optimum is one of its clamped integer neighbors.
fn linear_branch(a: f64, b: f64, cap: usize, base: f64, beta: f64) -> f64 {
    let k_star = 1.0 / beta - a / b;
    let mut best = f64::NEG_INFINITY;
    for k in [k_star.floor(), k_star.ceil()] {
        let k = k.clamp(0.0, cap as f64);
        let val = a + b * k;
        if val > 0.0 {
            best = best.max(val.ln() - beta * (base + k));
        }
    }
    best
}

/// Best `coeff * (q + k) e^{-β (base + D_O(k))}` over `k in [0, len_o]`,
/// where `d(j)` is the j-th smallest distance of the remaining values
/// (1-indexed) and `sum(k)` the sum of the `k` smallest.
fn shift_branch(
    coeff: f64,
    q: usize,
    len_o: usize,
    base: f64,
    beta: f64,
    d: impl Fn(usize) -> i64,
    sum: impl Fn(usize) -> i128,
) -> f64 {
    // (q+k)/(q+k+1) <= e^{-β d(k+1)} holds on a prefix of k
    let k = first_false(0, len_o, |k| {
        (((q + k) as f64) / ((q + k + 1) as f64)).ln() <= -beta * d(k + 1) as f64
    });
    let n = (q + k) as f64;
    if n == 0.0 {
        return f64::NEG_INFINITY;
    }
    (coeff * n).ln() - beta * (base + sum(k) as f64)
}

/// Positive and negative contribution problems for one edge and base
/// target. At target `t` the contribution of a value finally at `t ± 1` is
/// `x`, at `t` it is `-(1 + 2x)`, and 0 elsewhere; the negative problem
/// flips the signs.
fn unbiased_edge(c: &[i64], t0: i64, beta: f64, x: f64) -> f64 {
    let mut targets: Vec<i64> = c
        .iter()
        .flat_map(|&v| [v - 1, v, v + 1])
        .chain([t0])
        .collect();
    targets.sort_unstable();
    targets.dedup();

    let n = c.len();
    let b = 1.0 + 3.0 * x;
    let on = 1.0 + 2.0 * x;
    let mut dbl = DoubleTargetIndex::new(c, targets[0]);
    let mut sgl = DoubleTargetIndex::single_target(c, targets[0]);
    let mut best = f64::NEG_INFINITY;
    for t in targets {
        dbl.update_target(t);
        sgl.update_target(t);
        let base = (t - t0).unsigned_abs() as f64;
        let m = dbl.zero_count();
        let nn = dbl.on_target_count();
        let o = n - m - nn;
        let q = m + nn;

        // positive: move k of N to t ± 1 (cost 1 each); only once all of N
        // has moved is it worth moving O values to t ± 1
        let a = x * m as f64 - on * nn as f64;
        best = best.max(linear_branch(a, b, nn, base, beta));
        best = best.max(shift_branch(
            x,
            q,
            o,
            base + nn as f64,
            beta,
            |j| dbl.kth_distance(q + j).expect("k within size"),
            |k| dbl.sum_k_distances(q + k).expect("k within size") - nn as i128,
        ));

        // negative: move k of M onto t (cost 1 each), then O values onto t
        let a = on * nn as f64 - x * m as f64;
        best = best.max(linear_branch(a, b, m, base, beta));
        best = best.max(shift_branch(
            on,
            q,
            o,
            base + m as f64,
            beta,
            |j| sgl.kth_distance(q + j).expect("k within size"),
            |k| sgl.sum_k_distances(q + k).expect("k within size") - m as i128,
        ));
    }
    best
}

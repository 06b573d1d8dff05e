//! Exhaustive smooth sensitivity for small nodes.
//!
//! For each incident edge, sign and integer target `t` in the hull of the
//! partial sums (widened by a radius), every value picks a final position;
//! a DP over how many values land in each nonzero-contribution class gives
//! the cheapest shift for every achievable sum. Contributions come straight
//! from the estimator, so this shares nothing with the fast path.

use std::collections::HashMap;

use super::SmoothSensInstance;
use crate::error::{Error, Result};

pub const ORACLE_DEGREE_LIMIT: usize = 12;

/// Radius beyond the hull of `c ∪ {t0}`; any radius >= 3 is exact because
/// farther targets only add cost.
pub const DEFAULT_RADIUS: i64 = 4;

/// Offsets from the target where a value can still change the estimate.
const REACH: i64 = 2;

pub fn smooth_sensitivity_bruteforce(inst: &SmoothSensInstance, radius: i64) -> Result<f64> {
    if inst.degree() > ORACLE_DEGREE_LIMIT {
        return Err(Error::TooLarge {
            what: "degree",
            size: inst.degree(),
            limit: ORACLE_DEGREE_LIMIT,
        });
    }
    let kind = inst.kind();
    let lambda = inst.lambda();
    let beta = inst.beta();
    let mut best = 0.0f64;
    for i in 0..inst.degree() {
        let c = inst.partial_sums(i);
        if c.is_empty() {
            continue;
        }
        let w_i = inst.weights()[i];
        // target t means w_i + z_i = λ - 1 - t, so a value finally at
        // t + s sits in a triangle of weight λ - 1 + s
        let t0 = lambda - 1 - w_i;
        let lo = c.iter().copied().chain([t0]).min().unwrap() - radius;
        let hi = c.iter().copied().chain([t0]).max().unwrap() + radius;
        for b in [1i64, -1] {
            let y = |s: i64| {
                let w = lambda - 1 + s;
                kind.estimate(w + b, lambda) - kind.estimate(w, lambda)
            };
            // nonzero contribution classes, merged up to rounding
            let mut classes: Vec<f64> = Vec::new();
            let mut class_of = [None; (2 * REACH + 1) as usize];
            for s in -REACH..=REACH {
                let v = y(s);
                if v.abs() < 1e-12 {
                    continue;
                }
                let id = match classes
                    .iter()
                    .position(|&u| (u - v).abs() <= 1e-9 * u.abs())
                {
                    Some(id) => id,
                    None => {
                        classes.push(v);
                        classes.len() - 1
                    }
                };
                class_of[(s + REACH) as usize] = Some(id);
            }
            for t in lo..=hi {
                let table = cheapest_by_class(&c, t, &class_of, classes.len());
                for (counts, cost) in table {
                    let total: f64 = counts
                        .iter()
                        .zip(&classes)
                        .map(|(&n, &v)| n as f64 * v)
                        .sum();
                    let shift = (t - t0).abs() + cost;
                    best = best.max(total.abs() * (-beta * shift as f64).exp());
                }
            }
        }
    }
    Ok(best)
}

/// Minimum total shift for each vector of class counts.
fn cheapest_by_class(
    c: &[i64],
    t: i64,
    class_of: &[Option<usize>],
    classes: usize,
) -> HashMap<Vec<usize>, i64> {
    let mut table: HashMap<Vec<usize>, i64> = HashMap::from([(vec![0; classes], 0)]);
    for &v in c {
        // cheapest way to land in each class, and to contribute nothing
        let mut to_class = vec![i64::MAX; classes];
        // any offset beyond REACH contributes nothing
        let mut to_zero = (REACH + 1 - (v - t).abs()).max(0);
        for s in -REACH..=REACH {
            let cost = (v - (t + s)).abs();
            match class_of[(s + REACH) as usize] {
                Some(id) => to_class[id] = to_class[id].min(cost),
                None => to_zero = to_zero.min(cost),
            }
        }
        let mut next: HashMap<Vec<usize>, i64> = HashMap::new();
        for (counts, cost) in &table {
            let mut relax = |key: Vec<usize>, val: i64| {
                let e = next.entry(key).or_insert(i64::MAX);
                *e = (*e).min(val);
            };
            relax(counts.clone(), cost + to_zero);
            for (id, &extra) in to_class.iter().enumerate() {
                if extra < i64::MAX {
                    let mut key = counts.clone();
                    key[id] += 1;
                    relax(key, cost + extra);
                }
            }
        }
        table = next;
    }
    table
}

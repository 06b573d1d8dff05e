//! Per-triangle below-threshold estimators and their closed-form moments.
//!
//! The responsible node sees its two true incident weights and one noisy
//! weight `w' = w + DLap(p)`, so the estimated triangle weight is
//! `w_T + Z`. The biased estimator thresholds that directly; the unbiased
//! one reweights the two values next to the threshold so the expectation
//! is exactly the indicator `1{w_T < lambda}`.

use crate::error::{Error, Result};

/// Which estimator a node applies to its assigned triangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorKind {
    Biased,
    /// Unbiased estimator for weight-release noise `DLap(p)`.
    Unbiased {
        p: f64,
    },
}

impl EstimatorKind {
    pub fn unbiased(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(Self::Unbiased { p })
        } else {
            Err(Error::Domain(format!(
                "unbiased estimator needs p in (0, 1), got {p}"
            )))
        }
    }

    pub fn unbiased_for_epsilon(eps1: f64) -> Result<Self> {
        Self::unbiased((-eps1).exp())
    }

    /// Estimate for one triangle whose (partially noisy) weight is `m`.
    pub fn estimate(&self, m: i64, lambda: i64) -> f64 {
        match *self {
            EstimatorKind::Biased => f64::from(u8::from(m < lambda)),
            EstimatorKind::Unbiased { p } => h_value(m, lambda, p),
        }
    }

    /// Largest change of one triangle's estimate when `m` moves by one.
    pub fn unit_sensitivity(&self) -> f64 {
        match *self {
            EstimatorKind::Biased => 1.0,
            EstimatorKind::Unbiased { p } => 1.0 + 2.0 * x_of(p),
        }
    }

    pub fn is_biased(&self) -> bool {
        matches!(self, EstimatorKind::Biased)
    }

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Biased => "biased",
            EstimatorKind::Unbiased { .. } => "unbiased",
        }
    }
}

/// `x = p / (1-p)^2`.
pub fn x_of(p: f64) -> f64 {
    p / ((1.0 - p) * (1.0 - p))
}

/// `1{w_vu + w_vx + w'_ux < lambda}`.
pub fn biased_indicator(w_vu: i64, w_vx: i64, noisy_ux: i64, lambda: i64) -> u8 {
    u8::from(w_vu + w_vx + noisy_ux < lambda)
}

pub fn h_value(m: i64, lambda: i64, p: f64) -> f64 {
    let x = x_of(p);
    match m.cmp(&lambda) {
        std::cmp::Ordering::Greater => 0.0,
        std::cmp::Ordering::Equal => -x,
        std::cmp::Ordering::Less if m == lambda - 1 => 1.0 + x,
        std::cmp::Ordering::Less => 1.0,
    }
}

/// `p^k` for `k >= 0`, computed as `exp(k ln p)` and flushed to zero below
/// `1e-300`.
fn pow_flush(p: f64, k: i64) -> f64 {
    debug_assert!(k >= 0);
    let v = (k as f64 * p.ln()).exp();
    if v < 1e-300 {
        0.0
    } else {
        v
    }
}

/// `Pr[w_T + Z < lambda]` for `Z ~ DLap(p)`.
pub fn expected_biased(w_t: i64, lambda: i64, p: f64) -> f64 {
    if w_t < lambda {
        1.0 - pow_flush(p, lambda - w_t) / (1.0 + p)
    } else {
        pow_flush(p, w_t - lambda + 1) / (1.0 + p)
    }
}

/// `E[B'_T] - 1{w_T < lambda}`.
pub fn biased_bias(w_t: i64, lambda: i64, p: f64) -> f64 {
    expected_biased(w_t, lambda, p) - f64::from(u8::from(w_t < lambda))
}

pub fn biased_variance(w_t: i64, lambda: i64, p: f64) -> f64 {
    let e = expected_biased(w_t, lambda, p);
    e * (1.0 - e)
}

/// Covariance of two biased estimators that read the same noisy weight:
/// `Pr[Z < lambda - max(w_T, w_T')] - E[B'_T] E[B'_T']`.
pub fn biased_covariance(w_t: i64, w_t2: i64, lambda: i64, p: f64) -> f64 {
    expected_biased(w_t.max(w_t2), lambda, p)
        - expected_biased(w_t, lambda, p) * expected_biased(w_t2, lambda, p)
}

/// Variance of `U'_T` in the published closed form
/// `4 p^(|w_T - lambda| + 1) (p/(1-p)^3 + 1 - p)`.
///
/// This is an envelope rather than the exact second moment; see
/// [`unbiased_variance_exact`].
pub fn unbiased_variance_formula(w_t: i64, lambda: i64, p: f64) -> f64 {
    4.0 * pow_flush(p, (w_t - lambda).abs() + 1) * unbiased_factor(p)
}

fn unbiased_factor(p: f64) -> f64 {
    p / (1.0 - p).powi(3) + 1.0 - p
}

/// Exact `Var[U'_T]`.
///
/// With `q = (1-p)/(1+p)` the variance at `w_T = lambda` is
/// `C = q x^2 + q p (1+x)^2 + q p^2/(1-p)`, and it decays as `C p^k` where
/// `k` is the distance from `w_T` to the nearer of `lambda - 1`, `lambda`.
pub fn unbiased_variance_exact(w_t: i64, lambda: i64, p: f64) -> f64 {
    let x = x_of(p);
    let q = (1.0 - p) / (1.0 + p);
    let c = q * x * x + q * p * (1.0 + x) * (1.0 + x) + q * p * p / (1.0 - p);
    let k = if w_t >= lambda {
        w_t - lambda
    } else {
        lambda - 1 - w_t
    };
    c * pow_flush(p, k)
}

/// Cauchy–Schwarz bound on the covariance of two unbiased estimators that
/// read the same noisy weight.
pub fn unbiased_covariance_bound(w_t: i64, w_t2: i64, lambda: i64, p: f64) -> f64 {
    let k = (w_t - lambda).abs() + (w_t2 - lambda).abs() + 2;
    4.0 * unbiased_factor(p) * (k as f64 * p.ln() / 2.0).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// Variance of the first triangle's estimator.
    pub variance: f64,
    /// Covariance with a second triangle sharing the noisy edge.
    pub covariance: f64,
    /// `true` when `covariance` is an upper bound rather than exact.
    pub covariance_is_bound: bool,
}

/// Published per-triangle variance and `C'_4` covariance for either
/// estimator, at weight-release noise parameter `p` (which takes precedence
/// over the `p` carried by an unbiased `kind`).
pub fn closed_form_moments(
    kind: EstimatorKind,
    w_t: i64,
    w_t2: i64,
    lambda: i64,
    p: f64,
) -> Moments {
    match kind {
        EstimatorKind::Biased => Moments {
            variance: biased_variance(w_t, lambda, p),
            covariance: biased_covariance(w_t, w_t2, lambda, p),
            covariance_is_bound: false,
        },
        EstimatorKind::Unbiased { .. } => Moments {
            variance: unbiased_variance_formula(w_t, lambda, p),
            covariance: unbiased_covariance_bound(w_t, w_t2, lambda, p),
            covariance_is_bound: true,
        },
    }
}

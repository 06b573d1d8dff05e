//! Randomized primitives: discrete Laplace (geometric) noise, continuous
//! Laplace noise, and the heavy-tailed `1/(1+z^4)` noise used with smooth
//! sensitivity. All sampling goes through [`RandomSource`] substreams.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Geometric};

use crate::budget::Round;
use crate::error::{Error, Result};

/// Master seed from which every party derives its own generator.
///
/// The stream for `(node, round)` is a ChaCha8 keystream keyed by the master
/// seed with stream id `node << 2 | round`, so runs are reproducible and
/// distinct parties never share randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSource {
    seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream(&self, node: usize, round: Round) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((node as u64) << 2) | round.stream_tag());
        rng
    }

    /// Generator for work that is not tied to a node (e.g. graph sampling).
    pub fn auxiliary(&self, tag: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((tag << 2) | 3);
        rng
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "discrete Laplace parameter p = {p} not in (0, 1)"
        )))
    }
}

/// `Pr[DLap(p) = i] = (1-p)/(1+p) * p^|i|`.
pub fn dlap_pmf(i: i64, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((1.0 - p) / (1.0 + p) * p.powf(i.unsigned_abs() as f64))
}

/// `Pr[DLap(p) < k]`.
pub fn dlap_cdf(k: i64, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(if k >= 1 {
        1.0 - p.powf(k as f64) / (1.0 + p)
    } else {
        p.powf((1 - k) as f64) / (1.0 + p)
    })
}

/// Discrete Laplace distribution, sampled as the difference of two
/// independent geometric variables with success probability `1 - p`.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteLaplace {
    p: f64,
    geometric: Geometric,
}

impl DiscreteLaplace {
    pub fn new(p: f64) -> Result<Self> {
        check_p(p)?;
        let geometric =
            Geometric::new(1.0 - p).map_err(|e| Error::Domain(format!("geometric: {e}")))?;
        Ok(Self { p, geometric })
    }

    /// `DLap(exp(-epsilon))`.
    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        Self::new((-epsilon).exp())
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn variance(&self) -> f64 {
        2.0 * self.p / ((1.0 - self.p) * (1.0 - self.p))
    }
}

impl Distribution<i64> for DiscreteLaplace {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let a = self.geometric.sample(rng) as i64;
        let b = self.geometric.sample(rng) as i64;
        a - b
    }
}

pub fn dlap_sample<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<i64> {
    Ok(DiscreteLaplace::new(p)?.sample(rng))
}

/// Continuous Laplace distribution with scale `b`, sampled as
/// `b * (E1 - E2)` for two standard exponentials.
#[derive(Debug, Clone, Copy)]
pub struct Laplace {
    scale: f64,
}

impl Laplace {
    pub fn new(scale: f64) -> Result<Self> {
        if scale.is_finite() && scale > 0.0 {
            Ok(Self { scale })
        } else {
            Err(Error::Domain(format!(
                "Laplace scale must be positive, got {scale}"
            )))
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl Distribution<f64> for Laplace {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a: f64 = Exp1.sample(rng);
        let b: f64 = Exp1.sample(rng);
        self.scale * (a - b)
    }
}

pub fn laplace_sample<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> Result<f64> {
    Ok(Laplace::new(scale)?.sample(rng))
}

/// Noise with density proportional to `1 / (1 + |z|^gamma)`.
///
/// Only `gamma = 4` is supported: the normalized density is then
/// `(sqrt(2)/pi) / (1 + z^4)` and the variance is exactly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothNoiseConfig {
    gamma: f64,
}

impl Default for SmoothNoiseConfig {
    fn default() -> Self {
        Self { gamma: 4.0 }
    }
}

/// `integral_0^z dt / (1 + t^4)` for `z >= 0`.
fn quartic_antiderivative(z: f64) -> f64 {
    let s = SQRT_2 * z;
    let log_term = ((z * z + s + 1.0) / (z * z - s + 1.0)).ln();
    log_term / (4.0 * SQRT_2) + ((s + 1.0).atan() + (s - 1.0).atan()) / (2.0 * SQRT_2)
}

const HALF_MASS: f64 = PI / (2.0 * SQRT_2);

impl SmoothNoiseConfig {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma == 4.0 {
            Ok(Self { gamma })
        } else {
            Err(Error::Unsupported(format!(
                "smooth-sensitivity noise exponent gamma = {gamma}; only 4 is supported"
            )))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Smoothing parameter `beta = eps2 / (2 (gamma - 1))`.
    pub fn beta(&self, eps2: f64) -> f64 {
        eps2 / (2.0 * (self.gamma - 1.0))
    }

    /// Multiplier `2 (gamma-1)^((gamma-1)/gamma) / eps2` applied to the
    /// smooth sensitivity.
    pub fn scale(&self, eps2: f64) -> f64 {
        let g = self.gamma;
        2.0 * (g - 1.0).powf((g - 1.0) / g) / eps2
    }

    pub fn density(&self, z: f64) -> f64 {
        SQRT_2 / PI / (1.0 + z.powi(4))
    }

    /// `Pr[Z <= z]`.
    pub fn cdf(&self, z: f64) -> f64 {
        let half = quartic_antiderivative(z.abs()) / HALF_MASS / 2.0;
        if z >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    /// Inverts the closed-form CDF of `|Z|` by bisection.
    fn inverse_abs(&self, u: f64) -> f64 {
        let target = u * HALF_MASS;
        let mut hi = 1.0;
        while quartic_antiderivative(hi) < target {
            hi *= 2.0;
            if hi > 1e12 {
                return hi;
            }
        }
        let mut lo = 0.0;
        while hi - lo > 1e-12 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if quartic_antiderivative(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

impl Distribution<f64> for SmoothNoiseConfig {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let z = self.inverse_abs(u);
        if rng.random_bool(0.5) {
            z
        } else {
            -z
        }
    }
}

pub fn smooth_noise_sample<R: Rng + ?Sized>(cfg: &SmoothNoiseConfig, rng: &mut R) -> f64 {
    cfg.sample(rng)
}

/// Adds i.i.d. `DLap(exp(-eps1))` noise to every entry of `w`.
pub fn privatize_weight_vector<R: Rng + ?Sized>(
    w: &[i64],
    eps1: f64,
    rng: &mut R,
) -> Result<Vec<i64>> {
    if !(eps1.is_finite() && eps1 > 0.0) {
        return Err(Error::Domain(format!(
            "epsilon_1 must be positive, got {eps1}"
        )));
    }
    let noise = DiscreteLaplace::with_epsilon(eps1)?;
    Ok(w.iter().map(|&x| x + noise.sample(rng)).collect())
}

/// Whether releases add calibrated noise. `Disabled` is reachable only via
/// [`crate::debug`], for end-to-end identity tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) enum NoiseMode {
    #[default]
    Calibrated,
    Disabled,
}

impl NoiseMode {
    pub(crate) fn privatize<R: Rng + ?Sized>(
        self,
        w: &[i64],
        eps1: f64,
        rng: &mut R,
    ) -> Result<Vec<i64>> {
        match self {
            NoiseMode::Calibrated => privatize_weight_vector(w, eps1, rng),
            NoiseMode::Disabled => Ok(w.to_vec()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        RandomSource::new(seed).substream(0, Round::WeightRelease)
    }

    #[test]
    fn pmf_values() {
        assert!((dlap_pmf(0, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((dlap_pmf(1, 0.5).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        for i in -30..30 {
            assert_eq!(dlap_pmf(i, 0.3).unwrap(), dlap_pmf(-i, 0.3).unwrap());
        }
        assert!(dlap_pmf(0, 0.0).is_err());
        assert!(dlap_pmf(0, 1.0).is_err());
        assert!(dlap_cdf(0, -0.1).is_err());
        assert!(DiscreteLaplace::new(1.5).is_err());
    }

    #[test]
    fn pmf_sums_to_one() {
        for &p in &[0.1, 0.5, 0.9] {
            let s: f64 = (-2000..=2000).map(|i| dlap_pmf(i, p).unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-12, "p={p}: {s}");
        }
    }

    #[test]
    fn cdf_values() {
        assert!((dlap_cdf(1, 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((dlap_cdf(0, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cdf_matches_partial_sums() {
        for &p in &[0.2, 0.5, (-1.0f64).exp()] {
            for k in -60..=60i64 {
                let partial: f64 = (-3000..k).map(|i| dlap_pmf(i, p).unwrap()).sum();
                assert!(
                    (dlap_cdf(k, p).unwrap() - partial).abs() < 1e-12,
                    "p={p} k={k}"
                );
                let upper: f64 = (k..3000).map(|i| dlap_pmf(i, p).unwrap()).sum();
                assert!((dlap_cdf(k, p).unwrap() + upper - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pmf_ratio_bounded_by_epsilon() {
        for &eps in &[0.1f64, 0.5, 1.0, 2.0] {
            let p = (-eps).exp();
            for i in -50..=50 {
                let r = dlap_pmf(i, p).unwrap() / dlap_pmf(i - 1, p).unwrap();
                assert!(r <= eps.exp() * (1.0 + 1e-12) && r >= (-eps).exp() * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn dlap_samples_match_pmf() {
        let p = 0.5;
        let d = DiscreteLaplace::new(p).unwrap();
        let mut r = rng(11);
        let n = 1_000_000;
        let (mut zeros, mut sum) = (0u64, 0i64);
        for _ in 0..n {
            let x = d.sample(&mut r);
            sum += x;
            if x == 0 {
                zeros += 1;
            }
        }
        let q = dlap_pmf(0, p).unwrap();
        let se = (q * (1.0 - q) / n as f64).sqrt();
        assert!(((zeros as f64 / n as f64) - q).abs() < 3.0 * se);
        let sd = d.variance().sqrt();
        assert!((sum as f64 / n as f64).abs() < 0.01 * sd);
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let src = RandomSource::new(42);
        let d = DiscreteLaplace::new(0.4).unwrap();
        let draw = |node, round| {
            let mut r = src.substream(node, round);
            (0..100).map(|_| d.sample(&mut r)).collect::<Vec<i64>>()
        };
        let a = draw(3, Round::WeightRelease);
        assert_eq!(a, draw(3, Round::WeightRelease));
        assert_ne!(a, draw(4, Round::WeightRelease));
        assert_ne!(a, draw(3, Round::CountRelease));
    }

    #[test]
    fn laplace_moments() {
        assert!(Laplace::new(0.0).is_err());
        assert!(laplace_sample(-1.0, &mut rng(0)).is_err());
        let b = 2.5;
        let lap = Laplace::new(b).unwrap();
        let mut r = rng(5);
        let n = 1_000_000;
        let mut xs: Vec<f64> = (0..n).map(|_| lap.sample(&mut r)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((var / (2.0 * b * b) - 1.0).abs() < 0.05);
        xs.sort_by(f64::total_cmp);
        assert!(xs[n / 2].abs() < 0.02 * b);
        let again: Vec<f64> = {
            let mut r = rng(5);
            (0..10).map(|_| lap.sample(&mut r)).collect()
        };
        assert_eq!(again, {
            let mut r = rng(5);
            (0..10).map(|_| lap.sample(&mut r)).collect::<Vec<_>>()
        });
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn smooth_noise_rejects_other_gamma() {
        assert!(matches!(
            SmoothNoiseConfig::new(3.0),
            Err(Error::Unsupported(_))
        ));
        assert!(SmoothNoiseConfig::new(4.0).is_ok());
    }

    #[test]
    fn smooth_noise_density_integrates_to_one() {
        let cfg = SmoothNoiseConfig::default();
        // substitute z = tan(theta) to integrate over the whole line
        let total = simpson(
            |th: f64| {
                let z = th.tan();
                cfg.density(z) * (1.0 + z * z)
            },
            -PI / 2.0 + 1e-9,
            PI / 2.0 - 1e-9,
            200_000,
        );
        assert!((total - 1.0).abs() < 1e-6, "{total}");
        let second = simpson(
            |th: f64| {
                let z = th.tan();
                z * z * cfg.density(z) * (1.0 + z * z)
            },
            -PI / 2.0 + 1e-6,
            PI / 2.0 - 1e-6,
            200_000,
        );
        assert!((second - 1.0).abs() < 1e-4, "{second}");
    }

    #[test]
    fn smooth_noise_cdf_matches_quadrature() {
        let cfg = SmoothNoiseConfig::default();
        for &z in &[-3.0, -1.0, -0.2, 0.0, 0.5, 1.0, 2.0, 10.0] {
            let q = 0.5 + simpson(|t| cfg.density(t), 0.0, z, 20_000);
            assert!((cfg.cdf(z) - q).abs() < 1e-9, "z={z}");
        }
        // frozen from adaptive quadrature of the density over [-1, 1]
        assert!((cfg.cdf(1.0) - cfg.cdf(-1.0) - 0.780_549_926_169_590_1).abs() < 1e-12);
    }

    #[test]
    fn smooth_noise_moments() {
        let cfg = SmoothNoiseConfig::default();
        let mut r = rng(99);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| smooth_noise_sample(&cfg, &mut r)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.05, "var={var}");
        assert!(mean.abs() < 0.01, "mean={mean}");
        let inside = simpson(|t| cfg.density(t), -1.0, 1.0, 20_000);
        let hits = xs.iter().filter(|x| x.abs() <= 1.0).count() as f64 / n as f64;
        let se = (inside * (1.0 - inside) / n as f64).sqrt();
        assert!((hits - inside).abs() < 3.0 * se);
    }

    #[test]
    fn smooth_scale_and_beta() {
        let cfg = SmoothNoiseConfig::default();
        assert!((cfg.beta(1.2) - 0.2).abs() < 1e-15);
        assert!((cfg.scale(1.0) - 2.0 * 3f64.powf(0.75)).abs() < 1e-12);
    }

    #[test]
    fn privatize_preserves_length_and_mean() {
        let w = vec![3, -2, 10, 0];
        let mut r = rng(1);
        assert_eq!(privatize_weight_vector(&w, 1.0, &mut r).unwrap().len(), 4);
        assert_eq!(NoiseMode::Disabled.privatize(&w, 1.0, &mut r).unwrap(), w);
        assert!(privatize_weight_vector(&w, 0.0, &mut r).is_err());

        let trials = 20_000;
        let mut sums = vec![0i64; w.len()];
        for _ in 0..trials {
            for (s, x) in sums
                .iter_mut()
                .zip(privatize_weight_vector(&w, 1.0, &mut r).unwrap())
            {
                *s += x;
            }
        }
        let sd = DiscreteLaplace::with_epsilon(1.0)
            .unwrap()
            .variance()
            .sqrt();
        let se = sd / (trials as f64).sqrt();
        for (s, &x) in sums.iter().zip(&w) {
            assert!((*s as f64 / trials as f64 - x as f64).abs() < 3.5 * se);
        }
    }
}

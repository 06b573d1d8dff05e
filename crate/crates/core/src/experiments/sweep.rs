//! Error sweeps over ε, λ or graph size, written as CSV.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use super::synth::{default_lambda, induced_subsample};
use crate::budget::PrivacyBudget;
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::graph::WeightedGraph;
use crate::mechanisms::RandomSource;
use crate::protocol::{self, Mechanism, ProtocolContext, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Total budget; the two-step methods split it evenly.
    Epsilon,
    Lambda,
    /// Number of nodes in a uniformly sampled induced subgraph.
    Size,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps" | "epsilon" => Ok(Self::Epsilon),
            "lambda" => Ok(Self::Lambda),
            "size" => Ok(Self::Size),
            _ => Err(Error::Config(format!(
                "unknown sweep axis `{s}` (eps, lambda, size)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Baseline,
    TwoStep {
        unbiased: bool,
        mechanism: Mechanism,
    },
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Baseline,
        Method::TwoStep {
            unbiased: false,
            mechanism: Mechanism::GlobalLaplace,
        },
        Method::TwoStep {
            unbiased: true,
            mechanism: Mechanism::GlobalLaplace,
        },
        Method::TwoStep {
            unbiased: false,
            mechanism: Mechanism::SmoothSensitivity,
        },
        Method::TwoStep {
            unbiased: true,
            mechanism: Mechanism::SmoothSensitivity,
        },
    ];

    /// Runs this method once. The two-step methods split `epsilon` evenly.
    pub fn run(
        &self,
        ctx: &ProtocolContext<'_>,
        lambda: i64,
        epsilon: f64,
        rng: &RandomSource,
    ) -> Result<RunReport> {
        self.run_with(ctx, lambda, epsilon, rng, false)
    }

    fn run_with(
        &self,
        ctx: &ProtocolContext<'_>,
        lambda: i64,
        epsilon: f64,
        rng: &RandomSource,
        noiseless: bool,
    ) -> Result<RunReport> {
        match *self {
            Method::Baseline if noiseless => {
                protocol::noiseless::run_baseline(ctx, lambda, epsilon)
            }
            Method::Baseline => protocol::run_baseline_in(ctx, lambda, epsilon, rng),
            Method::TwoStep {
                unbiased,
                mechanism,
            } => {
                let budget = PrivacyBudget::even(epsilon)?;
                let kind = if unbiased {
                    EstimatorKind::unbiased(budget.p())?
                } else {
                    EstimatorKind::Biased
                };
                if noiseless {
                    protocol::noiseless::run_two_step(ctx, lambda, budget, kind, mechanism)
                } else {
                    protocol::run_two_step_in(ctx, lambda, budget, kind, mechanism, rng)
                }
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Baseline => f.write_str("baseline"),
            Method::TwoStep {
                unbiased,
                mechanism,
            } => {
                write!(
                    f,
                    "{}-{}",
                    mechanism.name(),
                    if *unbiased { "unbiased" } else { "biased" }
                )
            }
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    /// Fixed threshold for the ε and size sweeps; defaults to the 90th
    /// percentile of triangle weights.
    pub lambda: Option<i64>,
    /// Fixed total budget for the λ and size sweeps.
    pub epsilon: f64,
}

impl ExperimentConfig {
    pub fn new(axis: SweepAxis, values: Vec<f64>) -> Self {
        Self {
            axis,
            values,
            trials: 10,
            methods: Method::ALL.to_vec(),
            seed: 0,
            lambda: None,
            epsilon: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.values.is_empty() {
            return Err(Error::Config("no sweep values".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods".into()));
        }
        let integral = |v: f64| v.fract() == 0.0 && v.is_finite();
        for &v in &self.values {
            let ok = match self.axis {
                SweepAxis::Epsilon => v.is_finite() && v > 0.0,
                SweepAxis::Lambda => integral(v),
                SweepAxis::Size => integral(v) && v >= 0.0,
            };
            if !ok {
                return Err(Error::Config(format!("invalid value {v} for this sweep")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub x: f64,
    /// Mean relative error per method over the trials with `f(G) > 0`;
    /// `None` when no trial had a nonzero true count.
    pub errors: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub methods: Vec<Method>,
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x");
        for m in &self.methods {
            out.push_str(&format!(",{m}_l2_rel"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.x.to_string());
            for e in &row.errors {
                match e {
                    Some(v) => out.push_str(&format!(",{v}")),
                    None => out.push_str(",NA"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Seed of one trial; the same for every method so they see identical
/// step-1 noise wherever their budgets coincide.
fn trial_seed(seed: u64, trial: usize) -> u64 {
    RandomSource::new(seed).auxiliary(trial as u64).next_u64()
}

pub fn run_sweep(cfg: &ExperimentConfig, graph: &WeightedGraph) -> Result<ErrorReport> {
    sweep(cfg, graph, false)
}

pub(crate) fn sweep(
    cfg: &ExperimentConfig,
    graph: &WeightedGraph,
    noiseless: bool,
) -> Result<ErrorReport> {
    cfg.validate()?;
    let lambda = match cfg.lambda {
        Some(l) => l,
        None if cfg.axis == SweepAxis::Lambda => 0,
        None => default_lambda(graph)
            .ok_or_else(|| Error::Config("graph has no triangles to set lambda from".into()))?,
    };
    let full = ProtocolContext::new(graph);
    let mut values = cfg.values.clone();
    values.sort_by(f64::total_cmp);

    let mut rows = Vec::with_capacity(values.len());
    for &x in &values {
        let mut sums = vec![0.0; cfg.methods.len()];
        let mut counts = vec![0usize; cfg.methods.len()];
        for trial in 0..cfg.trials {
            let seed = trial_seed(cfg.seed, trial);
            let rng = RandomSource::new(seed);
            let sub;
            let (ctx, lambda, epsilon) = match cfg.axis {
                SweepAxis::Epsilon => (full.clone(), lambda, x),
                SweepAxis::Lambda => (full.clone(), x as i64, cfg.epsilon),
                SweepAxis::Size => {
                    sub = induced_subsample(graph, x as usize, &mut rng.auxiliary(0))?;
                    (ProtocolContext::new(&sub), lambda, cfg.epsilon)
                }
            };
            for (i, m) in cfg.methods.iter().enumerate() {
                if let Some(e) = m
                    .run_with(&ctx, lambda, epsilon, &rng, noiseless)?
                    .relative_error()
                {
                    sums[i] += e;
                    counts[i] += 1;
                }
            }
        }
        let errors = sums
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| (c > 0).then(|| s / c as f64))
            .collect();
        rows.push(ErrorRow { x, errors });
    }
    Ok(ErrorReport {
        methods: cfg.methods.clone(),
        rows,
    })
}

//! Per-node privacy budgets and the ledger that records every query.

use crate::error::{Error, Result};

/// Split of a node's budget between the weight release (`eps1`) and the
/// count release (`eps2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyBudget {
    total: f64,
    eps1: f64,
    eps2: f64,
}

impl PrivacyBudget {
    pub fn new(total: f64, eps1: f64, eps2: f64) -> Result<Self> {
        for (name, v) in [("epsilon", total), ("epsilon_1", eps1), ("epsilon_2", eps2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        // allow rounding slack from callers that split a decimal total
        if eps1 + eps2 > total * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "epsilon_1 + epsilon_2 = {} exceeds epsilon = {total}",
                eps1 + eps2
            )));
        }
        Ok(Self { total, eps1, eps2 })
    }

    /// `eps1 = eps2 = total / 2`.
    pub fn even(total: f64) -> Result<Self> {
        Self::new(total, total / 2.0, total / 2.0)
    }

    /// Budget whose total is exactly `eps1 + eps2`.
    pub fn from_parts(eps1: f64, eps2: f64) -> Result<Self> {
        Self::new(eps1 + eps2, eps1, eps2)
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    /// `p = exp(-eps1)`, the discrete Laplace parameter of the weight release.
    pub fn p(&self) -> f64 {
        (-self.eps1).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Round {
    WeightRelease,
    CountRelease,
}

impl Round {
    pub(crate) fn stream_tag(self) -> u64 {
        match self {
            Round::WeightRelease => 1,
            Round::CountRelease => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Charge {
    pub round: Round,
    pub epsilon: f64,
}

/// Sequential-composition ledger: one list of charges per node, refusing any
/// charge that would push a node past its total.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetLedger {
    limit: f64,
    charges: Vec<Vec<Charge>>,
}

impl BudgetLedger {
    pub fn new(nodes: usize, limit: f64) -> Self {
        Self {
            limit,
            charges: vec![Vec::new(); nodes],
        }
    }

    pub fn charge(&mut self, node: usize, round: Round, epsilon: f64) -> Result<()> {
        let spent = self.spent(node);
        if spent + epsilon > self.limit * (1.0 + 1e-12) {
            return Err(Error::BudgetExceeded {
                node,
                spent,
                request: epsilon,
                total: self.limit,
            });
        }
        self.charges[node].push(Charge { round, epsilon });
        Ok(())
    }

    pub fn spent(&self, node: usize) -> f64 {
        self.charges[node].iter().map(|c| c.epsilon).sum()
    }

    pub fn charges(&self, node: usize) -> &[Charge] {
        &self.charges[node]
    }

    pub fn nodes(&self) -> usize {
        self.charges.len()
    }

    pub fn limit(&self) -> f64 {
        self.limit
    }
}

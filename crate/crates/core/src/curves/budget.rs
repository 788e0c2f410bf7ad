use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::tanh_half;

/// Slack allowed on the TV feasibility cap.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// A joint guarantee: (ε, δ)-DP together with η total variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBudget", into = "RawBudget")]
pub struct PrivacyBudget {
    epsilon: f64,
    delta: f64,
    eta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawBudget {
    eps: f64,
    delta: f64,
    eta: f64,
}

impl TryFrom<RawBudget> for PrivacyBudget {
    type Error = Error;
    fn try_from(r: RawBudget) -> Result<Self> {
        PrivacyBudget::new(r.eps, r.delta, r.eta)
    }
}

impl From<PrivacyBudget> for RawBudget {
    fn from(b: PrivacyBudget) -> Self {
        RawBudget {
            eps: b.epsilon,
            delta: b.delta,
            eta: b.eta,
        }
    }
}

impl PrivacyBudget {
    /// Validates `eps ≥ 0`, `delta, eta ∈ [0,1]` and the TV cap
    /// `eta ≤ delta + (1-delta)(e^eps-1)/(e^eps+1)`.
    pub fn new(epsilon: f64, delta: f64, eta: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || epsilon.is_infinite() {
            return Err(Error::Validation(format!(
                "eps must be finite and non-negative (got {epsilon})"
            )));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::Validation(format!("delta must lie in [0, 1] (got {delta})")));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Validation(format!("eta must lie in [0, 1] (got {eta})")));
        }
        let cap = Self::max_eta(epsilon, delta);
        if eta > cap + FEASIBILITY_TOL {
            return Err(Error::Validation(format!(
                "eta exceeds delta + (1-delta)(e^eps-1)/(e^eps+1) (eta = {eta}, bound = {cap})"
            )));
        }
        Ok(PrivacyBudget {
            epsilon,
            delta,
            eta: eta.min(cap.max(delta)).min(1.0),
        })
    }

    /// Pure DP with a TV constraint.
    pub fn pure(epsilon: f64, eta: f64) -> Result<Self> {
        Self::new(epsilon, 0.0, eta)
    }

    /// (ε, δ)-DP with the TV constraint inactive.
    pub fn unconstrained_tv(epsilon: f64, delta: f64) -> Result<Self> {
        Self::new(epsilon, delta, Self::max_eta(epsilon, delta))
    }

    /// Largest TV compatible with (ε, δ)-DP.
    pub fn max_eta(epsilon: f64, delta: f64) -> f64 {
        (delta + (1.0 - delta) * tanh_half(epsilon)).min(1.0)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Composition needs `eta ≥ delta`.
    pub fn require_composable(&self) -> Result<()> {
        if self.eta + FEASIBILITY_TOL < self.delta {
            return Err(Error::Validation(format!(
                "composition requires eta >= delta (eta = {}, delta = {})",
                self.eta, self.delta
            )));
        }
        Ok(())
    }
}

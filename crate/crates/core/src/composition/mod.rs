//! k-fold composition under joint (ε, δ, η) constraints.

mod exact;
mod oracle;
mod types;

pub use exact::{compose_exact, compose_kairouz};
pub use oracle::{oracle_compose, oracle_compose_with, OracleMode, DIRECT_CAPACITY, TYPED_MAX_K};
pub use types::compose_types_approx;

use serde::Serialize;

use crate::curves::{budget_lines, Line, PrivacyBudget, TradeoffCurve};
use crate::error::{Error, Result};

/// One `(jε, δ'_j)` guarantee of the composed mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub j: usize,
    pub eps: f64,
    pub delta: f64,
    /// Set when the computed value reached 1 and was clamped.
    #[serde(skip)]
    pub clamped: bool,
}

/// The family of guarantees after `k` compositions, plus composed TV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionLedger {
    pub k: usize,
    #[serde(skip)]
    pub base: PrivacyBudget,
    pub entries: Vec<LedgerEntry>,
    pub eta: f64,
}

impl CompositionLedger {
    /// Wraps raw inner sums `δ_j` as `1 − (1−δ)^k (1−δ_j)`.
    pub(crate) fn from_inner(
        k: usize,
        base: PrivacyBudget,
        inner: impl IntoIterator<Item = (usize, f64)>,
        eta_inner: f64,
    ) -> Self {
        let lead = k as f64 * (-base.delta()).ln_1p();
        let wrap = |d: f64| -> (f64, bool) {
            if d >= 1.0 {
                return (1.0, true);
            }
            let v = -(lead + (-d.max(0.0)).ln_1p()).exp_m1();
            if v >= 1.0 {
                (1.0, true)
            } else {
                (v, false)
            }
        };
        let entries = inner
            .into_iter()
            .map(|(j, d)| {
                let (delta, clamped) = wrap(d);
                LedgerEntry {
                    j,
                    eps: j as f64 * base.epsilon(),
                    delta,
                    clamped,
                }
            })
            .collect();
        CompositionLedger {
            k,
            base,
            entries,
            eta: wrap(eta_inner).0,
        }
    }

    /// Entry for a given `j`, if present.
    pub fn entry(&self, j: usize) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.j == j)
    }

    /// Region cut out by all `(ε_j, δ'_j)` half-planes.
    pub fn to_curve(&self) -> TradeoffCurve {
        let lines: Vec<Line> = self
            .entries
            .iter()
            .flat_map(|e| {
                let [a, b, _] = budget_lines(e.eps, 1.0 - e.delta, 1.0);
                [a, b]
            })
            .collect();
        TradeoffCurve::from_lines(&lines)
    }
}

/// Same as [`CompositionLedger::to_curve`].
pub fn ledger_to_curve(ledger: &CompositionLedger) -> TradeoffCurve {
    ledger.to_curve()
}

/// TV after `k` compositions: `1 − (1−δ)^k (1−δ_0)`.
pub fn composed_tv(budget: &PrivacyBudget, k: usize) -> Result<f64> {
    Ok(compose_exact(budget, k)?.eta)
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    Ok(())
}

/// Softplus `ln(1 + e^x)`.
pub(crate) fn ln1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

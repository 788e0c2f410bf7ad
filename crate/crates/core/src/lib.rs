//! Privacy accounting for mechanisms constrained jointly by (ε, δ)-DP and
//! η total variation.
//!
//! The central object is the [`TradeoffCurve`]: a piecewise-linear convex
//! ROC curve whose epigraph is the privacy region. Budgets, discrete
//! mechanism pairs, composition ledgers and subsampled budgets all map to
//! such curves, and every closed form can be checked against the
//! Neyman–Pearson curve of an explicit pair.

pub mod amplification;
pub mod asymptotics;
pub mod cli;
pub mod composition;
pub mod curves;
pub mod divergences;
pub mod dpsgd;
mod error;
pub mod localdp;
pub mod mechanisms;
pub mod numeric;

pub use curves::{PrivacyBudget, TradeoffCurve};
pub use composition::CompositionLedger;
pub use divergences::{DiscretePair, DivergenceSpec};
pub use error::{Error, Result};
pub use localdp::Channel;

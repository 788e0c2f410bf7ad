//! Whole-run accounting for noisy SGD with per-step Gaussian DP.
//!
//! Each grid value ε turns the per-step μ-GDP guarantee into an
//! (ε, δ(ε), η) budget, which is amplified by subsampling at rate
//! `batch/n`, composed over all steps, and converted to a region. The
//! regions for all ε are intersected.

use std::thread;

use serde::Serialize;

use crate::amplification::subsample;
use crate::composition::{compose_kairouz, compose_types_approx, CompositionLedger};
use crate::curves::{PrivacyBudget, TradeoffCurve};
use crate::error::{check_positive, Error, Result};
use crate::mechanisms::{gaussian_delta, gaussian_tv, GaussianParams};

/// Relative tolerance handed to the types composer.
pub const SGD_TYPES_TOL: f64 = 1e-9;

/// Reference point reported by the moments accountant for the MNIST run.
pub const MOMENTS_ACCOUNTANT_REFERENCE: (f64, f64) = (1.19, 1e-5);

/// Training run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SgdConfig {
    pub n: usize,
    pub batch: usize,
    pub epochs: f64,
    pub step_mu: f64,
    pub epsilon_grid: Vec<f64>,
}

impl SgdConfig {
    pub fn new(n: usize, batch: usize, epochs: f64, step_mu: f64, epsilon_grid: Vec<f64>) -> Result<Self> {
        if n == 0 || batch == 0 || batch > n {
            return Err(Error::Validation(format!("batch size must lie in [1, n] (n = {n}, batch = {batch})")));
        }
        check_positive("epochs", epochs)?;
        check_positive("mu", step_mu)?;
        if epsilon_grid.is_empty() {
            return Err(Error::Validation("epsilon grid is empty".into()));
        }
        if epsilon_grid.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::Validation("epsilon grid values must be positive".into()));
        }
        if epsilon_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("epsilon grid must be strictly increasing".into()));
        }
        let cfg = SgdConfig {
            n,
            batch,
            epochs,
            step_mu,
            epsilon_grid,
        };
        if cfg.steps() == 0 {
            return Err(Error::Validation("epochs * n / batch rounds to zero steps".into()));
        }
        Ok(cfg)
    }

    /// `round(epochs · n / batch)`.
    pub fn steps(&self) -> usize {
        (self.epochs * self.n as f64 / self.batch as f64).round() as usize
    }

    /// Sampling rate `batch / n`.
    pub fn rate(&self) -> f64 {
        self.batch as f64 / self.n as f64
    }

    /// Grid `from, from+step, …, ≤ to` built from integer multiples.
    pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
        check_positive("eps-step", step)?;
        if !(to >= from) {
            return Err(Error::Validation(format!("eps-to ({to}) is below eps-from ({from})")));
        }
        let count = ((to - from) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| from + i as f64 * step).collect())
    }
}

/// Per-step budget `(ε, δ(ε), TV)` of a μ-GDP step; the flag reports
/// that η had to be lowered to the feasibility cap.
pub fn step_budget(step_mu: f64, epsilon: f64) -> Result<(PrivacyBudget, bool)> {
    check_positive("eps", epsilon)?;
    let g = GaussianParams::new(step_mu)?;
    let delta = gaussian_delta(&g, epsilon);
    let tv = gaussian_tv(&g).max(delta);
    let cap = PrivacyBudget::max_eta(epsilon, delta);
    let clamped = tv > cap;
    Ok((PrivacyBudget::new(epsilon, delta, tv.min(cap))?, clamped))
}

/// Intersected region with the ledgers behind it.
#[derive(Debug, Clone)]
pub struct SgdRegion {
    pub curve: TradeoffCurve,
    pub steps: usize,
    /// `(grid ε, ledger)`.
    pub ledgers: Vec<(f64, CompositionLedger)>,
}

fn per_epsilon<F>(config: &SgdConfig, f: F) -> Result<Vec<(f64, CompositionLedger)>>
where
    F: Fn(f64) -> Result<CompositionLedger> + Sync,
{
    let workers = thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(config.epsilon_grid.len());
    let chunk = config.epsilon_grid.len().div_ceil(workers);
    let results: Vec<Result<Vec<(f64, CompositionLedger)>>> = thread::scope(|s| {
        let handles: Vec<_> = config
            .epsilon_grid
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                s.spawn(move || part.iter().map(|&e| f(e).map(|l| (e, l))).collect::<Result<Vec<_>>>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(config.epsilon_grid.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn assemble(steps: usize, ledgers: Vec<(f64, CompositionLedger)>) -> Result<SgdRegion> {
    let curves: Vec<TradeoffCurve> = ledgers.iter().map(|(_, l)| l.to_curve()).collect();
    Ok(SgdRegion {
        curve: TradeoffCurve::intersect(&curves)?,
        steps,
        ledgers,
    })
}

/// Region from the joint-TV composition theorem, intersected over the grid.
pub fn sgd_region(config: &SgdConfig) -> Result<SgdRegion> {
    let k = config.steps();
    let p = config.rate();
    let ledgers = per_epsilon(config, |e| {
        let (b, _) = step_budget(config.step_mu, e)?;
        compose_types_approx(&subsample(&b, p)?, k, SGD_TYPES_TOL)
    })?;
    assemble(k, ledgers)
}

/// Same pipeline with the (ε, δ)-only composition theorem.
pub fn sgd_baseline_region(config: &SgdConfig) -> Result<SgdRegion> {
    let k = config.steps();
    let p = config.rate();
    let ledgers = per_epsilon(config, |e| {
        let (b, _) = step_budget(config.step_mu, e)?;
        let s = subsample(&b, p)?;
        compose_kairouz(s.epsilon(), s.delta(), k)
    })?;
    assemble(k, ledgers)
}

/// δ implied by both regions at one ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparePoint {
    pub eps: f64,
    pub refined_delta: f64,
    pub baseline_delta: f64,
}

/// Refined-vs-baseline comparison of a run.
#[derive(Debug, Clone, Serialize)]
pub struct SgdReport {
    pub steps: usize,
    pub rate: f64,
    pub refined_tv: f64,
    pub baseline_tv: f64,
    pub points: Vec<ComparePoint>,
    /// `(ε, δ)` of the moments accountant, for reference only.
    pub moments_accountant: (f64, f64),
}

/// ε values reported by [`sgd_compare`].
pub const COMPARE_EPSILONS: [f64; 5] = [0.5, 1.0, 1.19, 2.0, 3.0];

pub fn sgd_compare(config: &SgdConfig) -> Result<SgdReport> {
    let refined = sgd_region(config)?;
    let baseline = sgd_baseline_region(config)?;
    Ok(report(config, &refined, &baseline))
}

pub fn report(config: &SgdConfig, refined: &SgdRegion, baseline: &SgdRegion) -> SgdReport {
    SgdReport {
        steps: config.steps(),
        rate: config.rate(),
        refined_tv: refined.curve.tv(),
        baseline_tv: baseline.curve.tv(),
        points: COMPARE_EPSILONS
            .iter()
            .map(|&e| ComparePoint {
                eps: e,
                refined_delta: refined.curve.delta_for_epsilon(e),
                baseline_delta: baseline.curve.delta_for_epsilon(e),
            })
            .collect(),
        moments_accountant: MOMENTS_ACCOUNTANT_REFERENCE,
    }
}

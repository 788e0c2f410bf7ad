//! Subsampling amplification and the erasure channel.

use crate::curves::{curve_from_pair, PrivacyBudget, TradeoffCurve};
use crate::divergences::DiscretePair;
use crate::error::{check_unit, range, Result};
use crate::mechanisms::dominating_approx;

fn check_rate(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(range("p", p, "(0, 1]"))
    }
}

/// Budget after uniform subsampling with rate `p = m/n`:
/// `(ln(1 + p(e^ε − 1)), pδ, pη)`.
pub fn subsample(budget: &PrivacyBudget, p: f64) -> Result<PrivacyBudget> {
    check_rate(p)?;
    let eps = (p * budget.epsilon().exp_m1()).ln_1p();
    PrivacyBudget::new(eps, p * budget.delta(), p * budget.eta())
}

/// The two extremal pairs after subsampling the dominating mechanism:
/// `(pP₀ + (1−p)P₁, P₁)` and `(P₀, pP₁ + (1−p)P₀)`.
///
/// Their worst case, [`subsampled_worst_case`], is exactly the region of
/// [`subsample`].
pub fn subsample_tightness_pair(epsilon: f64, delta: f64, eta: f64, p: f64) -> Result<(DiscretePair, DiscretePair)> {
    check_rate(p)?;
    let base = dominating_approx(&PrivacyBudget::new(epsilon, delta, eta)?)?;
    let mix = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(a, b)| p * a + (1.0 - p) * b).collect() };
    let first = DiscretePair::new(mix(base.p0(), base.p1()), base.p1().to_vec())?;
    let second = DiscretePair::new(base.p0().to_vec(), mix(base.p1(), base.p0()))?;
    Ok((first, second))
}

/// Largest convex curve below both tightness pairs.
pub fn subsampled_worst_case(pairs: &(DiscretePair, DiscretePair)) -> TradeoffCurve {
    let curves = [curve_from_pair(&pairs.0), curve_from_pair(&pairs.1)];
    TradeoffCurve::worst_case(&curves).expect("two curves")
}

/// Appends an erasure symbol of mass `alpha` and scales the rest by
/// `1 − alpha`.
pub fn erase_pair(pair: &DiscretePair, alpha: f64) -> Result<DiscretePair> {
    check_unit("alpha", alpha)?;
    let erase = |p: &[f64]| -> Vec<f64> {
        p.iter().map(|v| (1.0 - alpha) * v).chain(std::iter::once(alpha)).collect()
    };
    DiscretePair::new(erase(pair.p0()), erase(pair.p1()))
}

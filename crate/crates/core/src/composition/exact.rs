use super::{check_k, ln1p_exp, CompositionLedger};
use crate::curves::PrivacyBudget;
use crate::error::{Error, Result};
use crate::mechanisms::alpha_from_budget;
use crate::numeric::{LnFactorial, LogSum};

/// Largest number of summands `compose_exact` will evaluate.
const EXACT_TERM_BUDGET: f64 = 3e9;

/// Exact ledger of the k-fold composition.
///
/// `δ_j = Σ_a Σ_ℓ C(k,a) C(k−a,ℓ) ((1−α)/(1+e^ε))^{k−a} α^a
/// (e^{(k−ℓ−a)ε} − e^{(ℓ+j)ε})` over `a ≤ k−j−1`, `ℓ < ⌈(k−j−a)/2⌉`,
/// every summand in log space.
pub fn compose_exact(budget: &PrivacyBudget, k: usize) -> Result<CompositionLedger> {
    check_k(k)?;
    budget.require_composable()?;
    let eps = budget.epsilon();
    if eps == 0.0 {
        // feasibility forces eta = delta: only the product rule remains
        return Ok(CompositionLedger::from_inner(k, *budget, [(0, 0.0)], 0.0));
    }
    let alpha = alpha_from_budget(budget)?;
    if alpha == 1.0 {
        return Ok(CompositionLedger::from_inner(k, *budget, (0..=k).map(|j| (j, 0.0)), 0.0));
    }
    let kf = k as f64;
    let cost = if alpha == 0.0 { kf * kf / 4.0 } else { kf * kf * kf / 12.0 };
    if cost > EXACT_TERM_BUDGET {
        return Err(Error::Capacity(format!(
            "exact composition at k = {k} needs about {cost:.1e} terms; use the types mode"
        )));
    }

    let lf = LnFactorial::new(k);
    let ln_q = (1.0 - alpha).ln() - ln1p_exp(eps);
    let ln_alpha = alpha.ln();
    // ln(1 − e^{−nε}) for n = 1..=k
    let bracket: Vec<f64> = (0..=k)
        .map(|n| if n == 0 { f64::NEG_INFINITY } else { (-(-(n as f64) * eps).exp_m1()).ln() })
        .collect();
    let a_max = if alpha == 0.0 { 0 } else { k };

    let inner: Vec<(usize, f64)> = (0..=k)
        .map(|j| {
            let mut acc = LogSum::new();
            for a in 0..=a_max.min(k.saturating_sub(j + 1)) {
                if a + j >= k {
                    break;
                }
                let m = k - a;
                let head = lf.ln_choose(k, a)
                    + m as f64 * ln_q
                    + if a == 0 { 0.0 } else { a as f64 * ln_alpha };
                let l_end = (m - j).div_ceil(2);
                for l in 0..l_end {
                    let n = m - 2 * l - j;
                    acc.add(head + lf.ln_choose(m, l) + (m - l) as f64 * eps + bracket[n]);
                }
            }
            (j, acc.ln().exp())
        })
        .collect();
    let eta_inner = inner[0].1;
    Ok(CompositionLedger::from_inner(k, *budget, inner, eta_inner))
}

/// Ledger of the (ε, δ)-DP composition theorem without a TV constraint:
/// entries for `j = k, k−2, …`.
pub fn compose_kairouz(epsilon: f64, delta: f64, k: usize) -> Result<CompositionLedger> {
    check_k(k)?;
    let base = PrivacyBudget::unconstrained_tv(epsilon, delta)?;
    let lf = LnFactorial::new(k);
    let ln_norm = k as f64 * ln1p_exp(epsilon);
    let inner_at = |j: usize| -> f64 {
        if epsilon == 0.0 {
            return 0.0;
        }
        let mut acc = LogSum::new();
        for l in 0..(k - j).div_ceil(2) {
            let n = k - 2 * l - j;
            let bracket = (-(-(n as f64) * epsilon).exp_m1()).ln();
            acc.add(lf.ln_choose(k, l) + (k - l) as f64 * epsilon + bracket - ln_norm);
        }
        acc.ln().exp()
    };
    let inner: Vec<(usize, f64)> = (0..=k / 2).map(|i| k - 2 * i).rev().map(|j| (j, inner_at(j))).collect();
    // TV of the unconstrained class is the j = 0 value of the same sum
    let eta_inner = inner_at(0);
    Ok(CompositionLedger::from_inner(k, base, inner, eta_inner))
}

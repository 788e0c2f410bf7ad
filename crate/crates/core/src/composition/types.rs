use super::{check_k, ln1p_exp, CompositionLedger};
use crate::curves::PrivacyBudget;
use crate::error::{Error, Result};
use crate::mechanisms::alpha_from_budget;
use crate::numeric::{log_add_exp, log_sub_exp, LogSum};

/// `ln n! − (n ln n − n)`.
fn stirling_remainder(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let x = n as f64;
    if n < 16 {
        return libm::lgamma(x + 1.0) - (x * x.ln() - x);
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// Log-probability of the type `(n, N−n)` under Binomial(N, p):
/// `−N·D(T‖P) + R(N) − R(n) − R(N−n)`.
fn ln_type_prob(n: usize, total: usize, ln_p: f64, ln_q: f64) -> f64 {
    let m = total - n;
    let big = total as f64;
    let mut kl = 0.0;
    if n > 0 {
        let t = n as f64 / big;
        kl += t * (t.ln() - ln_p);
    }
    if m > 0 {
        let t = m as f64 / big;
        kl += t * (t.ln() - ln_q);
    }
    if (n > 0 && ln_p == f64::NEG_INFINITY) || (m > 0 && ln_q == f64::NEG_INFINITY) {
        return f64::NEG_INFINITY;
    }
    -big * kl + stirling_remainder(total) - stirling_remainder(n) - stirling_remainder(m)
}

/// Ledger of the k-fold composition by summing over type classes.
///
/// A class with `a` erasures and `ℓ` adverse outcomes among the other
/// `k − a` symbols has probability `exp(−k·D(T‖P) + correction)`. Rows
/// `a` past the mode of the erasure count are dropped once their total
/// mass is below `tol·1e-3` of the smallest affected partial sum, so
/// every entry agrees with the exact ledger within relative `tol`.
pub fn compose_types_approx(budget: &PrivacyBudget, k: usize, tol: f64) -> Result<CompositionLedger> {
    check_k(k)?;
    if !(tol > 0.0) {
        return Err(Error::Argument(format!("tol must be positive (got {tol})")));
    }
    budget.require_composable()?;
    let eps = budget.epsilon();
    if eps == 0.0 {
        return Ok(CompositionLedger::from_inner(k, *budget, [(0, 0.0)], 0.0));
    }
    let alpha = alpha_from_budget(budget)?;
    if alpha == 1.0 {
        return Ok(CompositionLedger::from_inner(k, *budget, (0..=k).map(|j| (j, 0.0)), 0.0));
    }

    // P0 of one non-erased step: "favourable" with e^ε/(1+e^ε), adverse otherwise
    let ln_adverse = -ln1p_exp(eps);
    let ln_fav = -ln1p_exp(-eps);
    let (ln_a, ln_na) = (alpha.ln(), (-alpha).ln_1p());

    let mut acc: Vec<LogSum> = vec![LogSum::new(); k];
    let row = |a: usize, acc: &mut Vec<LogSum>| {
        let m = k - a;
        if m == 0 {
            return;
        }
        let ln_row = ln_type_prob(a, k, ln_a, ln_na);
        if ln_row == f64::NEG_INFINITY {
            return;
        }
        let p0: Vec<f64> = (0..=m).map(|l| ln_type_prob(l, m, ln_adverse, ln_fav)).collect();
        // prefix[L] = ln Σ_{ℓ<L} P0(ℓ)
        let mut prefix = Vec::with_capacity(m / 2 + 2);
        prefix.push(f64::NEG_INFINITY);
        for l in 0..=m.div_ceil(2) {
            let last = prefix[l];
            prefix.push(log_add_exp(last, p0[l.min(m)]));
        }
        // gap d = m − j; E(d) = ln Σ_{ℓ<⌈d/2⌉} P0(ℓ) e^{(2ℓ−d)ε}
        for start in [1usize, 2] {
            let mut e = f64::NEG_INFINITY;
            let mut d = start;
            while d <= m {
                let l_end = d.div_ceil(2);
                let l = l_end - 1;
                e = if d == start {
                    p0[0] - d as f64 * eps
                } else {
                    -2.0 * eps + log_add_exp(e, p0[l] + (2 * l) as f64 * eps - (d - 2) as f64 * eps)
                };
                let inner = log_sub_exp(prefix[l_end], e.min(prefix[l_end]));
                acc[m - d].add(ln_row + inner);
                d += 2;
            }
        }
    };

    let mode = ((k as f64 + 1.0) * alpha).floor().min(k as f64) as usize;
    for a in (0..=mode).rev() {
        row(a, &mut acc);
    }
    for a in mode + 1..=k {
        let ln_row = ln_type_prob(a, k, ln_a, ln_na);
        if a + 1 <= k {
            let j = k - a - 1;
            let partial = acc[j].ln();
            if ((k + 1) as f64).ln() + ln_row < (tol * 1e-3).ln() + partial {
                break;
            }
        }
        row(a, &mut acc);
    }

    let inner: Vec<(usize, f64)> = (0..=k)
        .map(|j| (j, if j < k { acc[j].ln().exp() } else { 0.0 }))
        .collect();
    let eta_inner = inner[0].1;
    Ok(CompositionLedger::from_inner(k, *budget, inner, eta_inner))
}

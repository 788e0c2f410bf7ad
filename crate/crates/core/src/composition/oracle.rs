use std::collections::HashMap;

use super::check_k;
use crate::curves::{curve_from_masses, curve_from_pair, TradeoffCurve};
use crate::divergences::DiscretePair;
use crate::error::{Error, Result};
use crate::numeric::LnFactorial;

/// Most product outcomes the direct mode will enumerate.
pub const DIRECT_CAPACITY: f64 = 1e7;
/// Largest `k` accepted by the typed mode.
pub const TYPED_MAX_K: usize = 10_000;
const TYPED_CLASS_CAPACITY: f64 = 1e8;

/// How [`oracle_compose_with`] enumerates the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Every outcome of the k-fold product.
    Direct,
    /// Symbol-count classes, merged by likelihood ratio.
    Typed,
    /// Direct when it fits, typed otherwise.
    Auto,
}

/// Exact ROC of `(P₀^{⊗k}, P₁^{⊗k})`.
pub fn oracle_compose(pair: &DiscretePair, k: usize) -> Result<TradeoffCurve> {
    oracle_compose_with(pair, k, OracleMode::Auto)
}

pub fn oracle_compose_with(pair: &DiscretePair, k: usize, mode: OracleMode) -> Result<TradeoffCurve> {
    check_k(k)?;
    if k == 1 {
        return Ok(curve_from_pair(pair));
    }
    let n = pair.alphabet_size() as f64;
    let outcomes = n.powi(k as i32);
    match mode {
        OracleMode::Direct => {
            if outcomes > DIRECT_CAPACITY {
                return Err(Error::Capacity(format!(
                    "direct enumeration needs {outcomes:.3e} outcomes (limit 1e7); use typed mode"
                )));
            }
            Ok(direct(pair, k))
        }
        OracleMode::Typed => typed(pair, k),
        OracleMode::Auto => {
            if outcomes <= DIRECT_CAPACITY {
                Ok(direct(pair, k))
            } else {
                typed(pair, k)
            }
        }
    }
}

fn direct(pair: &DiscretePair, k: usize) -> TradeoffCurve {
    let base: Vec<(f64, f64)> = pair
        .p0()
        .iter()
        .zip(pair.p1())
        .map(|(&a, &b)| (a, b))
        .filter(|&(a, b)| a > 0.0 || b > 0.0)
        .collect();
    let mut cur = vec![(1.0, 1.0)];
    for _ in 0..k {
        let mut next = Vec::with_capacity(cur.len() * base.len());
        for &(x0, x1) in &cur {
            for &(b0, b1) in &base {
                next.push((x0 * b0, x1 * b1));
            }
        }
        cur = next;
    }
    curve_from_masses(cur)
}

// symbols grouped by likelihood ratio
struct Groups {
    p0_only: f64,
    p1_only: f64,
    finite: Vec<(f64, f64)>,
}

fn group(pair: &DiscretePair) -> Groups {
    let mut g = Groups {
        p0_only: 0.0,
        p1_only: 0.0,
        finite: Vec::new(),
    };
    for (&a, &b) in pair.p0().iter().zip(pair.p1()) {
        if a > 0.0 && b == 0.0 {
            g.p0_only += a;
        } else if b > 0.0 && a == 0.0 {
            g.p1_only += b;
        } else if a > 0.0 {
            match g.finite.iter_mut().find(|f| f.0 * b == a * f.1) {
                Some(f) => {
                    f.0 += a;
                    f.1 += b;
                }
                None => g.finite.push((a, b)),
            }
        }
    }
    g
}

// integer multiples of a common log-ratio step, if one exists
fn lattice(finite: &[(f64, f64)]) -> Option<Vec<i64>> {
    let logs: Vec<f64> = finite.iter().map(|&(a, b)| (a / b).ln()).collect();
    let step = logs
        .iter()
        .map(|l| l.abs())
        .filter(|&l| l > 1e-12)
        .fold(f64::INFINITY, f64::min);
    if !step.is_finite() {
        return Some(vec![0; logs.len()]);
    }
    logs.iter()
        .map(|l| {
            let r = l / step;
            let n = r.round();
            ((r - n).abs() <= 1e-9 && n.abs() <= 1e6).then_some(n as i64)
        })
        .collect()
}

fn typed(pair: &DiscretePair, k: usize) -> Result<TradeoffCurve> {
    if k > TYPED_MAX_K {
        return Err(Error::Capacity(format!(
            "typed enumeration supports k <= {TYPED_MAX_K} (got {k}); use compose_exact or the types approximation"
        )));
    }
    let g = group(pair);
    let r = g.finite.len();
    let classes = count_classes(k, r);
    if classes > TYPED_CLASS_CAPACITY {
        return Err(Error::Capacity(format!(
            "typed enumeration needs {classes:.3e} classes (limit 1e8); use compose_exact or the types approximation"
        )));
    }
    let lf = LnFactorial::new(k);
    let ln0: Vec<f64> = g.finite.iter().map(|f| f.0.ln()).collect();
    let ln1: Vec<f64> = g.finite.iter().map(|f| f.1.ln()).collect();
    let keys = lattice(&g.finite);
    let mut merged: HashMap<i64, (f64, f64)> = HashMap::new();
    let mut loose: Vec<(f64, f64)> = Vec::new();

    // outcomes drawn only from finite-ratio groups
    if r > 0 {
        let mut counts = vec![0usize; r];
        for_each_composition(&mut counts, 0, k, &mut |counts| {
            let mut lm = lf.ln_fact(k);
            let (mut l0, mut l1) = (0.0, 0.0);
            for (i, &c) in counts.iter().enumerate() {
                lm -= lf.ln_fact(c);
                if c > 0 {
                    l0 += c as f64 * ln0[i];
                    l1 += c as f64 * ln1[i];
                }
            }
            let m = ((lm + l0).exp(), (lm + l1).exp());
            match &keys {
                Some(ks) => {
                    let key: i64 = counts.iter().zip(ks).map(|(&c, &s)| c as i64 * s).sum();
                    let e = merged.entry(key).or_insert((0.0, 0.0));
                    e.0 += m.0;
                    e.1 += m.1;
                }
                None => loose.push(m),
            }
        });
    }
    let mut masses: Vec<(f64, f64)> = merged.into_values().chain(loose).collect();
    // any P0-only symbol makes the outcome impossible under P1, and vice versa
    masses.push((-(k as f64 * (-g.p0_only).ln_1p()).exp_m1(), 0.0));
    masses.push((0.0, -(k as f64 * (-g.p1_only).ln_1p()).exp_m1()));
    Ok(curve_from_masses(masses))
}

fn count_classes(k: usize, r: usize) -> f64 {
    if r == 0 {
        return 1.0;
    }
    // C(k + r − 1, r − 1)
    let mut c = 1.0;
    for i in 1..r {
        c *= (k + i) as f64 / i as f64;
    }
    c
}

// calls `f` on every vector with the given prefix and `counts[pos..]` summing to `left`
fn for_each_composition(counts: &mut [usize], pos: usize, left: usize, f: &mut dyn FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        f(counts);
        return;
    }
    for c in 0..=left {
        counts[pos] = c;
        for_each_composition(counts, pos + 1, left - c, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::PrivacyBudget;
    use crate::mechanisms::{dominating_approx, dominating_pure};

    #[test]
    fn enumerates_all_compositions() {
        let mut seen = Vec::new();
        for_each_composition(&mut [0; 3], 0, 4, &mut |c| {
            assert_eq!(c.iter().sum::<usize>(), 4);
            seen.push(c.to_vec());
        });
        assert_eq!(seen.len(), 15);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn typed_matches_direct() {
        let b = PrivacyBudget::new(0.5, 0.05, 0.2).unwrap();
        let p = dominating_approx(&b).unwrap();
        for k in 2..=6 {
            let d = oracle_compose_with(&p, k, OracleMode::Direct).unwrap();
            let t = oracle_compose_with(&p, k, OracleMode::Typed).unwrap();
            assert!(d.sup_distance(&t) < 1e-12, "k={k}");
        }
        let irregular = DiscretePair::new(vec![0.5, 0.3, 0.2], vec![0.2, 0.35, 0.45]).unwrap();
        let d = oracle_compose_with(&irregular, 5, OracleMode::Direct).unwrap();
        let t = oracle_compose_with(&irregular, 5, OracleMode::Typed).unwrap();
        assert!(d.sup_distance(&t) < 1e-12);
        let skew = DiscretePair::new(vec![0.6, 0.3, 0.1], vec![0.1, 0.45, 0.45]).unwrap();
        let d = oracle_compose_with(&skew, 6, OracleMode::Direct).unwrap();
        let t = oracle_compose_with(&skew, 6, OracleMode::Typed).unwrap();
        assert!(d.sup_distance(&t) < 1e-12);
    }

    #[test]
    fn capacity_errors_name_the_mode() {
        let p = dominating_pure(1.0, 0.3).unwrap();
        let e = oracle_compose_with(&p, 20, OracleMode::Direct).unwrap_err();
        assert!(matches!(&e, Error::Capacity(m) if m.contains("typed")));
        let e = oracle_compose_with(&p, 20_000, OracleMode::Typed).unwrap_err();
        assert!(matches!(&e, Error::Capacity(m) if m.contains("compose_exact")));
    }

    #[test]
    fn two_fold_tv() {
        let p = dominating_pure(1.0, 0.3234820100820068).unwrap();
        let c = oracle_compose(&p, 2).unwrap();
        assert!((c.tv() - 0.420527).abs() < 1e-6);
    }
}

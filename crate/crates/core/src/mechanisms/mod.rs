//! Concrete mechanisms: the dominating pairs, Laplace, Gaussian and
//! staircase noise.

mod staircase;

pub use staircase::{staircase_curve, staircase_gamma_for_alpha, staircase_tv, StaircaseSpec};

use serde::{Deserialize, Serialize};

use crate::curves::PrivacyBudget;
use crate::divergences::DiscretePair;
use crate::error::{check_nonneg, Error, Result};
use crate::numeric::{norm_cdf, tanh_half};

/// Parameters of the dominating mechanism: `alpha` is the mass placed on
/// the uninformative symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominatingSpec {
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
}

/// `α = 1 − (η−δ)(1+e^ε)/((1−δ)(e^ε−1))`, clamped to `[0, 1]`.
pub fn alpha_from_budget(budget: &PrivacyBudget) -> Result<f64> {
    let (eps, delta, eta) = (budget.epsilon(), budget.delta(), budget.eta());
    if eps == 0.0 {
        return Err(Error::Degenerate("alpha is undefined at eps = 0".into()));
    }
    if delta >= 1.0 {
        return Err(Error::Degenerate("alpha is undefined at delta = 1".into()));
    }
    budget.require_composable()?;
    let alpha = 1.0 - (eta - delta) / ((1.0 - delta) * tanh_half(eps));
    Ok(alpha.clamp(0.0, 1.0))
}

impl DominatingSpec {
    pub fn from_budget(budget: &PrivacyBudget) -> Result<Self> {
        Ok(DominatingSpec {
            epsilon: budget.epsilon(),
            delta: budget.delta(),
            alpha: alpha_from_budget(budget)?,
        })
    }

    /// Masses `[(1−α)e^ε/(1+e^ε), α, (1−α)/(1+e^ε)]` of the pure core.
    fn core(&self) -> [f64; 3] {
        let a = self.alpha;
        // e^ε/(1+e^ε) and 1/(1+e^ε) without overflow
        let hi = 1.0 / (1.0 + (-self.epsilon).exp());
        let lo = 1.0 / (1.0 + self.epsilon.exp());
        [(1.0 - a) * hi, a, (1.0 - a) * lo]
    }

    /// The three-symbol pair (requires `delta = 0`).
    pub fn pure_pair(&self) -> Result<DiscretePair> {
        if self.delta != 0.0 {
            return Err(Error::Validation("pure pair requires delta = 0".into()));
        }
        let p0 = self.core().to_vec();
        let p1 = p0.iter().rev().copied().collect();
        DiscretePair::new(p0, p1)
    }

    /// The five-symbol pair.
    pub fn approx_pair(&self) -> Result<DiscretePair> {
        let d = self.delta;
        let c = self.core();
        let p0 = vec![d, (1.0 - d) * c[0], (1.0 - d) * c[1], (1.0 - d) * c[2], 0.0];
        let p1 = p0.iter().rev().copied().collect();
        DiscretePair::new(p0, p1)
    }
}

/// Dominating pair for `(ε, 0)`-DP with `η`-TV.
pub fn dominating_pure(epsilon: f64, eta: f64) -> Result<DiscretePair> {
    let b = PrivacyBudget::pure(epsilon, eta)?;
    DominatingSpec::from_budget(&b)?.pure_pair()
}

/// Dominating pair for a general budget, over five symbols.
///
/// At `ε = 0` feasibility forces `η = δ`; the pair is then
/// `[δ, 0, 1−δ, 0, 0]` against its reversal.
pub fn dominating_approx(budget: &PrivacyBudget) -> Result<DiscretePair> {
    if budget.epsilon() == 0.0 {
        budget.require_composable()?;
        let d = budget.delta();
        return DiscretePair::new(vec![d, 0.0, 1.0 - d, 0.0, 0.0], vec![0.0, 0.0, 1.0 - d, 0.0, d]);
    }
    DominatingSpec::from_budget(budget)?.approx_pair()
}

/// TV between Laplace noise of scale `Δ/ε` centred `Δ` apart.
pub fn laplace_tv(epsilon: f64) -> Result<f64> {
    check_nonneg("eps", epsilon)?;
    Ok(-(-0.5 * epsilon).exp_m1())
}

/// μ-GDP parameter of a Gaussian mechanism (sensitivity over σ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    mu: f64,
}

impl GaussianParams {
    pub fn new(mu: f64) -> Result<Self> {
        check_nonneg("mu", mu)?;
        Ok(GaussianParams { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// `δ(ε) = Φ(−ε/μ + μ/2) − e^ε Φ(−ε/μ − μ/2)`; `0` when `μ = 0`.
pub fn gaussian_delta(params: &GaussianParams, epsilon: f64) -> f64 {
    let mu = params.mu;
    if mu == 0.0 {
        return 0.0;
    }
    let first = norm_cdf(-epsilon / mu + 0.5 * mu);
    let tail = norm_cdf(-epsilon / mu - 0.5 * mu);
    let second = if tail == 0.0 { 0.0 } else { (epsilon + tail.ln()).exp() };
    (first - second).clamp(0.0, 1.0)
}

/// `2Φ(μ/2) − 1`.
pub fn gaussian_tv(params: &GaussianParams) -> f64 {
    libm::erf(params.mu / (2.0 * std::f64::consts::SQRT_2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{curve_from_budget, curve_from_pair};
    use std::f64::consts::E;

    #[test]
    fn alpha_examples() {
        let b = PrivacyBudget::pure(1.0, 0.3234820100820068).unwrap();
        assert!((alpha_from_budget(&b).unwrap() - 0.3).abs() < 1e-6);
        let b = PrivacyBudget::new(1.0, 0.2, 0.2).unwrap();
        assert_eq!(alpha_from_budget(&b).unwrap(), 1.0);
        let b = PrivacyBudget::unconstrained_tv(1.0, 0.1).unwrap();
        assert!(alpha_from_budget(&b).unwrap().abs() < 1e-12);
        let b = PrivacyBudget::new(0.0, 0.1, 0.1).unwrap();
        assert!(matches!(alpha_from_budget(&b), Err(Error::Degenerate(_))));
        let b = PrivacyBudget::new(1.0, 0.2, 0.1).unwrap();
        assert!(matches!(alpha_from_budget(&b), Err(Error::Validation(_))));
    }

    #[test]
    fn pure_pair_example() {
        let p = dominating_pure(1.0, 0.3234820100820068).unwrap();
        let want = [0.511741, 0.3, 0.188259];
        for (a, b) in p.p0().iter().zip(want) {
            assert!((a - b).abs() < 1e-6);
        }
        assert_eq!(p.p1(), &[p.p0()[2], p.p0()[1], p.p0()[0]]);
        assert!((p.tv() - 0.3234820100820068).abs() < 1e-12);
        let kairouz = dominating_pure(1.0, (E - 1.0) / (E + 1.0)).unwrap();
        assert!(kairouz.p0()[1].abs() < 1e-15);
        assert!(dominating_pure(0.0, 0.0).is_err());
        assert!(dominating_pure(1.0, 0.5).is_err());
    }

    #[test]
    fn approx_pair_example() {
        let b = PrivacyBudget::new(1.0, 0.1, 0.4).unwrap();
        let p = dominating_approx(&b).unwrap();
        let alpha = 1.0 - 0.3 * (E + 1.0) / (0.9 * (E - 1.0));
        assert!((alpha - 0.278682).abs() < 1e-6);
        assert_eq!(p.p0()[0], 0.1);
        assert!((p.p0()[2] - 0.250814).abs() < 1e-6);
        assert!((p.tv() - 0.4).abs() < 1e-12);
        let c = curve_from_pair(&p);
        assert!((c.value_at(0.0) - 0.9).abs() < 1e-12);
        assert!(c.sup_distance(&curve_from_budget(&b)) < 1e-12);
    }

    #[test]
    fn approx_reduces_to_pure() {
        let b = PrivacyBudget::pure(1.0, 0.3234820100820068).unwrap();
        let a = dominating_approx(&b).unwrap();
        let p = dominating_pure(1.0, 0.3234820100820068).unwrap();
        assert_eq!(&a.p0()[1..4], p.p0());
        assert_eq!(a.p0()[0], 0.0);
        assert_eq!(a.p0()[4], 0.0);
    }

    #[test]
    fn zero_eps_pair() {
        let b = PrivacyBudget::new(0.0, 0.2, 0.2).unwrap();
        let c = curve_from_pair(&dominating_approx(&b).unwrap());
        assert!(c.sup_distance(&curve_from_budget(&b)) < 1e-15);
    }

    #[test]
    fn laplace_values() {
        assert!((laplace_tv(1.0).unwrap() - 0.393469).abs() < 1e-6);
        assert!((laplace_tv(2.0).unwrap() - (1.0 - (-1f64).exp())).abs() < 1e-15);
        assert!(laplace_tv(1e-12).unwrap() < 1e-12);
        assert!(laplace_tv(-1.0).is_err());
    }

    #[test]
    fn gaussian_values() {
        let g = GaussianParams::new(1.0 / 1.3).unwrap();
        let tv = gaussian_tv(&g);
        assert!((tv - 0.2994).abs() < 1e-4);
        assert!((gaussian_delta(&g, 0.0) - tv).abs() < 1e-15);
        let two = GaussianParams::new(2.0).unwrap();
        assert!((gaussian_tv(&two) - 0.682689).abs() < 1e-6);
        assert_eq!(gaussian_tv(&GaussianParams::new(0.0).unwrap()), 0.0);
        assert_eq!(gaussian_delta(&GaussianParams::new(0.0).unwrap(), 1.0), 0.0);
        let one = GaussianParams::new(1.0).unwrap();
        assert!(gaussian_delta(&one, 10.0) <= 1e-12);
        assert_eq!(gaussian_delta(&one, 1e6), 0.0);
        let mut prev = 1.0;
        for i in 0..100 {
            let d = gaussian_delta(&one, i as f64 * 0.1);
            assert!(d <= prev);
            prev = d;
        }
    }
}

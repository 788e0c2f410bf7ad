//! Gaussian limit of many compositions.

use crate::composition::{compose_exact, compose_types_approx};
use crate::curves::{PrivacyBudget, TradeoffCurve};
use crate::error::Result;
use crate::mechanisms::alpha_from_budget;
use crate::numeric::{norm_quantile, norm_sf, tanh_half};

/// Grid size used by [`clt_gap`].
pub const CLT_GRID: usize = 10_000;

/// `kl(f) = −∫ log|f'|` for the `(ε, 0, η)` curve: `εη`.
pub fn kl_functional(epsilon: f64, eta: f64) -> f64 {
    epsilon * eta
}

/// `κ₂(f) = ∫ log²|f'|`: `ηε²(e^ε+1)/(e^ε−1)`.
pub fn kappa2(epsilon: f64, eta: f64) -> f64 {
    if epsilon == 0.0 {
        return 0.0;
    }
    eta * epsilon * epsilon / tanh_half(epsilon)
}

/// `κ₃(f) = ∫ |log|f'||³`: `ηε³(e^ε+1)/(e^ε−1)`.
pub fn kappa3(epsilon: f64, eta: f64) -> f64 {
    epsilon * kappa2(epsilon, eta)
}

/// Gaussian tradeoff `G_μ(α) = Φ(Φ⁻¹(1−α) − μ)`.
pub fn g_mu(mu: f64, alpha: f64) -> f64 {
    if alpha <= 0.0 {
        return 1.0;
    }
    if alpha >= 1.0 {
        return 0.0;
    }
    norm_sf(norm_quantile(alpha) + mu)
}

/// Piecewise-linear interpolation of `G_μ` on `n` uniform points. Being
/// a chord approximation of a convex function it lies slightly above
/// `G_μ`.
pub fn g_mu_curve(mu: f64, n: usize) -> TradeoffCurve {
    let n = n.max(2);
    let pts = (0..n)
        .map(|i| {
            let x = i as f64 / (n - 1) as f64;
            (x, g_mu(mu, x))
        })
        .collect();
    TradeoffCurve::from_points(pts)
}

/// `μ = sqrt(2 Σ ε_i η_i)`.
pub fn clt_mu(schedule: &[(f64, f64)]) -> f64 {
    (2.0 * schedule.iter().map(|&(e, h)| kl_functional(e, h)).sum::<f64>()).sqrt()
}

/// Sup-norm distance between the k-fold composed `(ε, 0, η)` curve and
/// `G_μ` with `μ = sqrt(2kεη)`, on a `10⁴`-point grid plus the curve's
/// vertices.
pub fn clt_gap(epsilon: f64, eta: f64, k: usize) -> Result<f64> {
    let budget = PrivacyBudget::pure(epsilon, eta)?;
    let mu = clt_mu(&[(epsilon, eta)]) * (k as f64).sqrt();
    let alpha = if epsilon == 0.0 { 1.0 } else { alpha_from_budget(&budget)? };
    let ledger = if alpha == 0.0 || alpha == 1.0 || k <= 1000 {
        compose_exact(&budget, k)?
    } else {
        compose_types_approx(&budget, k, 1e-12)?
    };
    let curve = ledger.to_curve();
    let grid = (0..CLT_GRID).map(|i| i as f64 / (CLT_GRID - 1) as f64);
    let gap = grid
        .chain(curve.vertices().iter().map(|v| v.0))
        .map(|x| (curve.value_at(x) - g_mu(mu, x)).abs())
        .fold(0.0, f64::max);
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::curve_from_budget;

    const ETA: f64 = 0.3234820100820068;

    // −∫ log|f'| and ∫ log^p |f'| by summing over the linear pieces
    fn slope_integral(epsilon: f64, eta: f64, g: impl Fn(f64) -> f64) -> f64 {
        let c = curve_from_budget(&PrivacyBudget::pure(epsilon, eta).unwrap());
        c.vertices()
            .windows(2)
            .map(|w| {
                let s = -(w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                if s == 0.0 {
                    0.0
                } else {
                    (w[1].0 - w[0].0) * g(s.ln())
                }
            })
            .sum()
    }

    #[test]
    fn functionals_match_piecewise_integrals() {
        for &(e, frac) in &[(0.3, 0.5), (1.0, 0.7), (2.0, 0.2), (0.05, 1.0)] {
            let h = frac * tanh_half(e);
            assert!((kl_functional(e, h) - slope_integral(e, h, |l| -l)).abs() < 1e-6);
            assert!((kappa2(e, h) - slope_integral(e, h, |l| l * l)).abs() < 1e-6);
            assert!((kappa3(e, h) - slope_integral(e, h, |l| l.abs().powi(3))).abs() < 1e-6);
        }
        assert_eq!(kl_functional(0.0, 0.0), 0.0);
        assert_eq!(kappa2(0.0, 0.0), 0.0);
        assert!((kl_functional(1.0, ETA) - ETA).abs() < 1e-15);
        assert!((kappa2(1.0, ETA) - 0.7).abs() < 1e-6);
        assert_eq!(kappa3(1.0, ETA), kappa2(1.0, ETA));
    }

    #[test]
    fn g_mu_values() {
        assert!((g_mu(0.0, 0.3) - 0.7).abs() < 1e-15);
        assert!((g_mu(1.0, 0.5) - 0.158655).abs() < 1e-6);
        assert_eq!(g_mu(1.0, 0.0), 1.0);
        assert_eq!(g_mu(1.0, 1.0), 0.0);
        for &mu in &[0.3, 1.0, 2.5] {
            for i in 1..100 {
                let a = i as f64 / 100.0;
                assert!((g_mu(mu, g_mu(mu, a)) - a).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn g_mu_tv_matches_gaussian() {
        use crate::mechanisms::{gaussian_tv, GaussianParams};
        let mu = 1.0 / 1.3;
        let c = g_mu_curve(mu, 200_001);
        let want = gaussian_tv(&GaussianParams::new(mu).unwrap());
        assert!((c.tv() - want).abs() < 1e-8);
    }

    #[test]
    fn clt_mu_examples() {
        assert_eq!(clt_mu(&[]), 0.0);
        let n = 100_000;
        let eps = 1.0 / (n as f64).sqrt();
        let sched = vec![(eps, tanh_half(eps)); n];
        assert!((clt_mu(&sched) - 1.0).abs() < 1e-5);
        let c = 0.3f64;
        let nf = n as f64;
        let sched2 = vec![(1.0 / nf.powf(c), 0.5 / nf.powf(1.0 - c)); n];
        assert!((clt_mu(&sched2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_step_gap_is_large() {
        assert!(clt_gap(3.0, tanh_half(3.0), 1).unwrap() > 0.1);
    }
}

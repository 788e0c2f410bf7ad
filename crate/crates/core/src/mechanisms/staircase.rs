use serde::{Deserialize, Serialize};

use crate::curves::TradeoffCurve;
use crate::error::{check_positive, range, Result};
use crate::numeric::tanh_half;

/// Staircase noise: density `a·e^{−kε}` on `[kΔ, (k+γ)Δ)` and
/// `a·e^{−(k+1)ε}` on `[(k+γ)Δ, (k+1)Δ)`, mirrored around 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaircaseSpec {
    gamma: f64,
    epsilon: f64,
    sensitivity: f64,
}

impl StaircaseSpec {
    pub fn new(gamma: f64, epsilon: f64, sensitivity: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        check_positive("eps", epsilon)?;
        check_positive("sensitivity", sensitivity)?;
        Ok(StaircaseSpec {
            gamma,
            epsilon,
            sensitivity,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    /// Density normaliser `(1−e^{−ε}) / (2Δ(γ + e^{−ε}(1−γ)))`.
    pub fn a_gamma(&self) -> f64 {
        let d = (-self.epsilon).exp();
        -(-self.epsilon).exp_m1() / (2.0 * self.sensitivity * (self.gamma + d * (1.0 - self.gamma)))
    }

    // survival function of the noise in units of Δ
    fn tail(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0 - self.tail(-x);
        }
        let (g, e) = (self.gamma, self.epsilon);
        let a = self.a_gamma() * self.sensitivity;
        let k = x.floor();
        let r = x - k;
        let here = if r < g {
            a * (-k * e).exp() * (g - r) + a * (-(k + 1.0) * e).exp() * (1.0 - g)
        } else {
            a * (-(k + 1.0) * e).exp() * (1.0 - r)
        };
        here + 0.5 * (-(k + 1.0) * e).exp()
    }
}

/// Total variation between staircase noise and its `Δ`-shift.
pub fn staircase_tv(spec: &StaircaseSpec) -> f64 {
    let d = (-spec.epsilon).exp();
    let one_d = -(-spec.epsilon).exp_m1();
    let g = spec.gamma;
    let den = 2.0 * (g + d * (1.0 - g));
    if g < 0.5 {
        one_d * (2.0 * g * one_d + d) / den
    } else {
        one_d / den
    }
}

/// γ whose staircase TV equals `(1−α)(e^ε−1)/(e^ε+1)`.
///
/// The lower branch `γ < 1/2` is used whenever it reaches the target,
/// otherwise the upper branch. Both branches are inverted in closed form.
pub fn staircase_gamma_for_alpha(epsilon: f64, alpha: f64) -> Result<f64> {
    check_positive("eps", epsilon)?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(range("alpha", alpha, "[0, 1)"));
    }
    if alpha == 0.0 {
        return Ok(0.5);
    }
    let target = (1.0 - alpha) * tanh_half(epsilon);
    let d = (-epsilon).exp();
    let one_d = -(-epsilon).exp_m1();
    let gamma = if target > 0.5 * one_d {
        // (1−d)(2u+d)/(2(u+d)) = T with u = γ(1−d)
        let u = d / (2.0 - 2.0 * target / one_d) - d;
        u / one_d
    } else {
        // (1−d)/(2(d+u)) = T
        (one_d / (2.0 * target) - d) / one_d
    };
    Ok(gamma)
}

/// Region of the staircase mechanism, from the two Neyman–Pearson tests
/// `x ≥ (1−γ)Δ` and `x ≥ γΔ` joined by their chord.
pub fn staircase_curve(spec: &StaircaseSpec) -> TradeoffCurve {
    let g = spec.gamma;
    let (s1, s2) = if g <= 1.0 {
        (spec.tail(1.0 - g), spec.tail(g))
    } else {
        let tv = staircase_tv(spec);
        let em1 = spec.epsilon.exp_m1();
        let lo = tv / em1;
        (lo, 1.0 - tv - lo)
    };
    TradeoffCurve::from_points(vec![(0.0, 1.0), (s1, s2), (s2, s1), (1.0, 0.0)])
}

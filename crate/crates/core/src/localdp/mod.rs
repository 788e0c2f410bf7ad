//! Local privacy: channels, dominating channels and contraction bounds.

mod channel;
pub mod sampling;

pub use channel::Channel;

use serde::Serialize;

use crate::divergences::{le_cam, tv_distance, validate_pmf, DiscretePair, DivergenceSpec};
use crate::error::{check_unit, range, Error, Result};
use crate::numeric::tanh_half;

/// Largest log-ratio `ln Q(y|x)/Q(y|x')`; `+∞` if some column has a zero
/// next to a positive entry.
pub fn ldp_epsilon(channel: &Channel) -> f64 {
    let mut eps: f64 = 0.0;
    for y in 0..channel.cols() {
        let col = (0..channel.rows()).map(|x| channel.get(x, y));
        let (lo, hi) = col.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if hi == 0.0 {
            continue;
        }
        if lo == 0.0 {
            return f64::INFINITY;
        }
        eps = eps.max((hi / lo).ln());
    }
    eps
}

/// Largest TV between two rows (the Dobrushin coefficient).
pub fn dobrushin(channel: &Channel) -> f64 {
    let mut best: f64 = 0.0;
    for a in 0..channel.rows() {
        for b in a + 1..channel.rows() {
            best = best.max(tv_distance(channel.row(a), channel.row(b)));
        }
    }
    best
}

fn check_feasible(epsilon: f64, eta: f64) -> Result<()> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(range("eps", epsilon, "[0, inf)"));
    }
    check_unit("eta", eta)?;
    let cap = tanh_half(epsilon);
    if eta > cap + 1e-12 {
        return Err(Error::Validation(format!(
            "eta exceeds (e^eps-1)/(e^eps+1) (eta = {eta}, bound = {cap})"
        )));
    }
    Ok(())
}

/// Rows `[ηe^ε/(e^ε−1), η/(e^ε−1), 1 − η(e^ε+1)/(e^ε−1)]` and the swap.
pub fn q_star(epsilon: f64, eta: f64) -> Result<Channel> {
    if !(epsilon > 0.0) {
        return Err(range("eps", epsilon, "(0, inf)"));
    }
    check_feasible(epsilon, eta)?;
    Ok(Channel::from_rows_unchecked(vec![q_star_row(epsilon, eta, false), q_star_row(epsilon, eta, true)]))
}

fn q_star_row(epsilon: f64, eta: f64, swap: bool) -> Vec<f64> {
    if eta == 0.0 {
        return vec![0.0, 0.0, 1.0];
    }
    let hi = eta / -(-epsilon).exp_m1();
    let lo = eta / epsilon.exp_m1();
    let rest = (1.0 - eta / tanh_half(epsilon)).max(0.0);
    if swap {
        vec![lo, hi, rest]
    } else {
        vec![hi, lo, rest]
    }
}

/// `|𝒴|×3` channel sending `y` to the `q_star` row 0 when
/// `P₀(y) ≥ P₁(y)`, row 1 otherwise.
pub fn binary_erasure_mechanism(pair: &DiscretePair, epsilon: f64, eta: f64) -> Result<Channel> {
    let q = q_star(epsilon, eta)?;
    let rows = pair
        .p0()
        .iter()
        .zip(pair.p1())
        .map(|(a, b)| q.row(usize::from(b > a)).to_vec())
        .collect();
    Ok(Channel::from_rows_unchecked(rows))
}

/// Output law `Σ_x Q(·|x) prior(x)`.
pub fn push_forward(channel: &Channel, prior: &[f64]) -> Result<Vec<f64>> {
    if prior.len() != channel.rows() {
        return Err(Error::Argument(format!(
            "prior has {} entries but the channel has {} inputs",
            prior.len(),
            channel.rows()
        )));
    }
    validate_pmf("prior", prior)?;
    let mut out = vec![0.0; channel.cols()];
    for (x, &w) in prior.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (o, q) in out.iter_mut().zip(channel.row(x)) {
            *o += w * q;
        }
    }
    Ok(out)
}

/// Largest `D_f` between rows of any channel in `Q_{ε,η}`:
/// `η(f(e^ε) + e^ε f(e^{−ε}))/(e^ε − 1)`.
pub fn max_fdiv(epsilon: f64, eta: f64, spec: &DivergenceSpec) -> Result<f64> {
    check_feasible(epsilon, eta)?;
    spec.validate()?;
    if eta == 0.0 {
        return Ok(0.0);
    }
    let e = epsilon.exp();
    Ok(eta * (spec.f(e) + e * spec.f(1.0 / e)) / epsilon.exp_m1())
}

/// `sup η_KL(Q)` over `Q_{ε,η}`: `η(e^ε−1)/(e^ε+1)`.
pub fn kl_contraction_bound(epsilon: f64, eta: f64) -> f64 {
    eta * tanh_half(epsilon)
}

/// Grid estimate of `η_KL` with the maximising `β` and input pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaKlEstimate {
    pub value: f64,
    pub beta: f64,
    pub inputs: (usize, usize),
}

/// `max_{x<x'} max_β LC_β(Q(·|x) ‖ Q(·|x'))` over `β_i = i/(n+1)`.
pub fn eta_kl_estimate(channel: &Channel, beta_grid_size: usize) -> Result<f64> {
    Ok(eta_kl_estimate_detail(channel, beta_grid_size)?.value)
}

pub fn eta_kl_estimate_detail(channel: &Channel, beta_grid_size: usize) -> Result<EtaKlEstimate> {
    if beta_grid_size < 3 {
        return Err(Error::Argument(format!("beta grid needs at least 3 points (got {beta_grid_size})")));
    }
    let mut best = EtaKlEstimate {
        value: 0.0,
        beta: 0.5,
        inputs: (0, 0),
    };
    for a in 0..channel.rows() {
        for b in a + 1..channel.rows() {
            let pair = DiscretePair::new(channel.row(a).to_vec(), channel.row(b).to_vec())?;
            for i in 1..=beta_grid_size {
                let beta = i as f64 / (beta_grid_size + 1) as f64;
                let v = le_cam(&pair, beta)?;
                if v > best.value {
                    best = EtaKlEstimate {
                        value: v,
                        beta,
                        inputs: (a, b),
                    };
                }
            }
        }
    }
    Ok(best)
}

/// `χ²(M₀‖M₁) ≤ 4η(e^ε−1)(e^{−ε}+1)·TV(P₀,P₁)²`.
pub fn chi2_output_bound(epsilon: f64, eta: f64, tv_in: f64) -> Result<f64> {
    check_feasible(epsilon, eta)?;
    check_unit("tv", tv_in)?;
    Ok(4.0 * eta * epsilon.exp_m1() * ((-epsilon).exp() + 1.0) * tv_in * tv_in)
}

/// `η(e^ε+1)/(e^ε−1)`: the factor relating the optimum over `Q_{ε,η}`
/// to the one over `Q_ε`.
pub fn opt_conversion_factor(epsilon: f64, eta: f64) -> Result<f64> {
    if epsilon == 0.0 {
        return Err(Error::Degenerate("conversion factor is undefined at eps = 0".into()));
    }
    check_feasible(epsilon, eta)?;
    Ok((eta / tanh_half(epsilon)).min(1.0))
}

/// M-ary randomized response.
pub fn randomized_response(epsilon: f64, m: usize) -> Result<Channel> {
    if m < 2 {
        return Err(Error::Argument(format!("randomized response needs M >= 2 (got {m})")));
    }
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(range("eps", epsilon, "[0, inf)"));
    }
    // divide through by e^ε to stay finite for large ε
    let off = 1.0 / (epsilon.exp() + (m - 1) as f64);
    let diag = 1.0 / (1.0 + (m - 1) as f64 * (-epsilon).exp());
    let rows = (0..m)
        .map(|x| (0..m).map(|y| if x == y { diag } else { off }).collect())
        .collect();
    Ok(Channel::from_rows_unchecked(rows))
}

/// `η / (2(e^ε−1)(e^{−ε}+1))`.
pub fn be_ratio_lower_bound(epsilon: f64, eta: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(range("eps", epsilon, "(0, inf)"));
    }
    check_feasible(epsilon, eta)?;
    Ok(eta / (2.0 * epsilon.exp_m1() * ((-epsilon).exp() + 1.0)))
}

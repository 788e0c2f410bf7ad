//! Random members of `Q_ε` and `Q_{ε,η}` for stress testing.

use rand::{Rng, RngExt};

use super::Channel;
use crate::divergences::DiscretePair;
use crate::error::{range, Result};
use crate::numeric::tanh_half;

/// Random `rows × cols` channel with `ldp_epsilon ≤ ε`.
///
/// Entries are `b_y·u_{xy}` normalised per row, with `b > 0` shared by all
/// rows and `u ∈ [1, e^{ε/2}]`; both the `u` ratio and the row
/// normalisers contribute at most `e^{ε/2}`. Half of the `u` draws sit on
/// an endpoint so that near-extremal channels are common.
pub fn random_ldp_channel<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, epsilon: f64) -> Channel {
    let top = (0.5 * epsilon).exp();
    let b: Vec<f64> = (0..cols).map(|_| rng.random::<f64>() + 1e-3).collect();
    let matrix = (0..rows)
        .map(|_| {
            let raw: Vec<f64> = b
                .iter()
                .map(|&by| {
                    let u = match rng.random_range(0..4u8) {
                        0 => 1.0,
                        1 => top,
                        _ => 1.0 + (top - 1.0) * rng.random::<f64>(),
                    };
                    by * u
                })
                .collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / s).collect()
        })
        .collect();
    Channel::from_rows_unchecked(matrix)
}

/// Random member of `Q_{ε,η}`: a random `Q_ε` channel followed by the
/// erasure with `α = 1 − η(e^ε+1)/(e^ε−1)`.
pub fn random_q_eps_eta<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    epsilon: f64,
    eta: f64,
) -> Result<Channel> {
    let cap = tanh_half(epsilon);
    if !(epsilon > 0.0) || !(0.0..=cap).contains(&eta) {
        return Err(range("eta", eta, "[0, (e^eps-1)/(e^eps+1)]"));
    }
    let alpha = 1.0 - eta / cap;
    Ok(random_ldp_channel(rng, rows, cols, epsilon).erase(alpha))
}

/// Random pmf of length `n` (Dirichlet(1) via normalised exponentials),
/// occasionally with zero entries.
pub fn random_pmf<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            if n > 1 && rng.random_range(0..8u8) == 0 {
                0.0
            } else {
                -(1.0 - rng.random::<f64>()).ln()
            }
        })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[0] = 1.0;
    }
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    // push the rounding residue into the largest entry
    let resid = 1.0 - v.iter().sum::<f64>();
    let imax = (0..n).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0);
    v[imax] += resid;
    v
}

/// Random pair over an alphabet of size `n`.
pub fn random_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DiscretePair {
    loop {
        if let Ok(p) = DiscretePair::new(random_pmf(rng, n), random_pmf(rng, n)) {
            return p;
        }
    }
}

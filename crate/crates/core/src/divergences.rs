//! f-divergences between discrete distributions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{range, Error, Result};
use crate::numeric::{neumaier_sum, xlogx};

const PMF_TOL: f64 = 1e-12;

/// Two pmfs over one finite alphabet: the output laws of a mechanism on
/// two neighbouring inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct DiscretePair {
    p0: Vec<f64>,
    p1: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    p0: Vec<f64>,
    p1: Vec<f64>,
}

impl TryFrom<RawPair> for DiscretePair {
    type Error = Error;
    fn try_from(r: RawPair) -> Result<Self> {
        DiscretePair::new(r.p0, r.p1)
    }
}

impl From<DiscretePair> for RawPair {
    fn from(p: DiscretePair) -> Self {
        RawPair { p0: p.p0, p1: p.p1 }
    }
}

/// Checks that `p` is a pmf within `1e-12`.
pub fn validate_pmf(name: &str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Validation(format!("{name} is empty")));
    }
    if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::Validation(format!("{name} has a negative or non-finite entry")));
    }
    let s = neumaier_sum(p.iter().copied());
    if (s - 1.0).abs() > PMF_TOL {
        return Err(Error::Validation(format!("{name} sums to {s}, not 1")));
    }
    Ok(())
}

impl DiscretePair {
    pub fn new(p0: Vec<f64>, p1: Vec<f64>) -> Result<Self> {
        if p0.len() != p1.len() {
            return Err(Error::Validation(format!(
                "p0 and p1 have different lengths ({} vs {})",
                p0.len(),
                p1.len()
            )));
        }
        validate_pmf("p0", &p0)?;
        validate_pmf("p1", &p1)?;
        Ok(DiscretePair { p0, p1 })
    }

    pub fn alphabet_size(&self) -> usize {
        self.p0.len()
    }

    pub fn p0(&self) -> &[f64] {
        &self.p0
    }

    pub fn p1(&self) -> &[f64] {
        &self.p1
    }

    /// The pair with hypotheses exchanged.
    pub fn swapped(&self) -> Self {
        DiscretePair {
            p0: self.p1.clone(),
            p1: self.p0.clone(),
        }
    }

    /// Total variation distance.
    pub fn tv(&self) -> f64 {
        tv_distance(&self.p0, &self.p1)
    }
}

/// `Σ max(0, p − q)`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    neumaier_sum(p.iter().zip(q).map(|(a, b)| (a - b).max(0.0)))
}

/// Convex generator for a custom f-divergence.
pub type FnHandle = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Which f-divergence to evaluate.
#[derive(Clone)]
pub enum DivergenceSpec {
    Tv,
    Kl,
    ChiSquared,
    /// `LC_β`, `β ∈ (0, 1)`.
    LeCam { beta: f64 },
    /// `f` must satisfy `f(1) = 0`; `limit_slope` is `lim f(t)/t` as
    /// `t → ∞`, used for outcomes with `p1 = 0`.
    Custom { f: FnHandle, limit_slope: f64 },
}

impl fmt::Debug for DivergenceSpec {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceSpec::Tv => write!(fm, "Tv"),
            DivergenceSpec::Kl => write!(fm, "Kl"),
            DivergenceSpec::ChiSquared => write!(fm, "ChiSquared"),
            DivergenceSpec::LeCam { beta } => write!(fm, "LeCam({beta})"),
            DivergenceSpec::Custom { limit_slope, .. } => write!(fm, "Custom(limit_slope={limit_slope})"),
        }
    }
}

impl DivergenceSpec {
    /// Custom generator with `lim f(t)/t = +∞`.
    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        DivergenceSpec::Custom {
            f: Arc::new(f),
            limit_slope: f64::INFINITY,
        }
    }

    pub fn le_cam(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(range("beta", beta, "(0, 1)"));
        }
        Ok(DivergenceSpec::LeCam { beta })
    }

    /// Checks the spec is admissible.
    pub fn validate(&self) -> Result<()> {
        match self {
            DivergenceSpec::LeCam { beta } => Self::le_cam(*beta).map(|_| ()),
            DivergenceSpec::Custom { f, .. } => {
                let at_one = f(1.0);
                if !(at_one.abs() <= 1e-12) {
                    Err(Error::Spec(format!("custom f must satisfy f(1) = 0 (got {at_one})")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// The generator `f(t)`, `t ∈ [0, ∞)`.
    pub fn f(&self, t: f64) -> f64 {
        match self {
            DivergenceSpec::Tv => (t - 1.0).max(0.0),
            DivergenceSpec::Kl => xlogx(t),
            DivergenceSpec::ChiSquared => (t - 1.0) * (t - 1.0),
            DivergenceSpec::LeCam { beta } => {
                let b = *beta;
                b * (1.0 - b) * (t - 1.0) * (t - 1.0) / (b * t + 1.0 - b)
            }
            DivergenceSpec::Custom { f, .. } => f(t),
        }
    }

    /// `p1·f(p0/p1)` with the perspective limits at `p1 = 0`.
    fn term(&self, p0: f64, p1: f64) -> f64 {
        if p0 == 0.0 && p1 == 0.0 {
            return 0.0;
        }
        if p1 == 0.0 {
            return match self {
                DivergenceSpec::Tv => p0,
                DivergenceSpec::Kl | DivergenceSpec::ChiSquared => f64::INFINITY,
                DivergenceSpec::LeCam { beta } => (1.0 - beta) * p0,
                DivergenceSpec::Custom { limit_slope, .. } => limit_slope * p0,
            };
        }
        match self {
            DivergenceSpec::Tv => (p0 - p1).max(0.0),
            DivergenceSpec::Kl => {
                if p0 == 0.0 {
                    0.0
                } else {
                    p0 * (p0 / p1).ln()
                }
            }
            DivergenceSpec::ChiSquared => (p0 - p1) * (p0 - p1) / p1,
            DivergenceSpec::LeCam { beta } => {
                let b = *beta;
                b * (1.0 - b) * (p0 - p1) * (p0 - p1) / (b * p0 + (1.0 - b) * p1)
            }
            DivergenceSpec::Custom { f, .. } => p1 * f(p0 / p1),
        }
    }
}

/// `D_f(P₀‖P₁) = Σ p1·f(p0/p1)`; may be `+∞`.
pub fn f_divergence(pair: &DiscretePair, spec: &DivergenceSpec) -> Result<f64> {
    spec.validate()?;
    Ok(divergence_of(pair.p0(), pair.p1(), spec))
}

/// Unchecked variant on raw slices (entries assumed valid).
pub(crate) fn divergence_of(p0: &[f64], p1: &[f64], spec: &DivergenceSpec) -> f64 {
    let terms: Vec<f64> = p0.iter().zip(p1).map(|(&a, &b)| spec.term(a, b)).collect();
    if terms.iter().any(|t| t.is_infinite()) {
        return f64::INFINITY;
    }
    neumaier_sum(terms).max(0.0)
}

/// Le Cam divergence `LC_β`.
pub fn le_cam(pair: &DiscretePair, beta: f64) -> Result<f64> {
    let spec = DivergenceSpec::le_cam(beta)?;
    Ok(divergence_of(pair.p0(), pair.p1(), &spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::dominating_pure;

    const ETA: f64 = 0.3234820100820068;

    #[test]
    fn pair_validation() {
        assert!(DiscretePair::new(vec![0.5, 0.5], vec![1.0]).is_err());
        assert!(DiscretePair::new(vec![0.5, 0.6], vec![0.5, 0.5]).is_err());
        assert!(DiscretePair::new(vec![1.5, -0.5], vec![0.5, 0.5]).is_err());
        assert!(DiscretePair::new(vec![], vec![]).is_err());
    }

    #[test]
    fn equal_pmfs_have_zero_divergence() {
        let p = DiscretePair::new(vec![0.25; 4], vec![0.25; 4]).unwrap();
        for s in [
            DivergenceSpec::Tv,
            DivergenceSpec::Kl,
            DivergenceSpec::ChiSquared,
            DivergenceSpec::LeCam { beta: 0.3 },
        ] {
            assert_eq!(f_divergence(&p, &s).unwrap(), 0.0);
        }
    }

    #[test]
    fn dominating_pair_values() {
        let p = dominating_pure(1.0, ETA).unwrap();
        let kl = f_divergence(&p, &DivergenceSpec::Kl).unwrap();
        let direct: f64 = p.p0().iter().zip(p.p1()).map(|(a, b)| a * (a / b).ln()).sum();
        assert!((kl - ETA).abs() < 1e-12);
        assert!((kl - direct).abs() < 1e-14);
        assert!((f_divergence(&p, &DivergenceSpec::Tv).unwrap() - ETA).abs() < 1e-12);
        let lc = le_cam(&p, 0.5).unwrap();
        let e = std::f64::consts::E;
        assert!((lc - ETA * (e - 1.0) / (e + 1.0)).abs() < 1e-12);
        assert!((lc - 0.149487).abs() < 1e-6);
    }

    #[test]
    fn le_cam_grid_peaks_at_half() {
        let p = dominating_pure(1.0, ETA).unwrap();
        let (arg, best) = (1..1000)
            .map(|i| i as f64 / 1000.0)
            .map(|b| (b, le_cam(&p, b).unwrap()))
            .fold((0.0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
        assert!((best - 0.149487).abs() < 1e-6);
        assert!((arg - 0.5).abs() < 1e-12);
        assert!(le_cam(&p, 0.0).is_err());
        assert!(le_cam(&p, 1.0).is_err());
    }

    #[test]
    fn limit_terms() {
        let p = DiscretePair::new(vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5]).unwrap();
        assert_eq!(f_divergence(&p, &DivergenceSpec::Kl).unwrap(), f64::INFINITY);
        assert_eq!(f_divergence(&p, &DivergenceSpec::ChiSquared).unwrap(), f64::INFINITY);
        assert_eq!(f_divergence(&p, &DivergenceSpec::Tv).unwrap(), 0.5);
        let lc = f_divergence(&p, &DivergenceSpec::LeCam { beta: 0.25 }).unwrap();
        // p1=0 term (1-β)p0 plus p0=0 term βp1
        assert!((lc - (0.75 * 0.5 + 0.25 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn custom_generator() {
        let p = dominating_pure(1.0, ETA).unwrap();
        let kl = DivergenceSpec::custom(xlogx);
        let v = f_divergence(&p, &kl).unwrap();
        assert!((v - ETA).abs() < 1e-12);
        let bad = DivergenceSpec::custom(|t| t);
        assert!(matches!(f_divergence(&p, &bad), Err(Error::Spec(_))));
    }
}

//! Tradeoff (ROC) curves and privacy regions.

mod budget;
mod envelope;
mod io;

pub use budget::{PrivacyBudget, FEASIBILITY_TOL};
pub use envelope::Line;
pub(crate) use envelope::{lower_hull, upper_envelope};

use serde::{Deserialize, Serialize};

use crate::divergences::DiscretePair;
use crate::error::{range, Error, Result};

/// Absolute tolerance of geometric predicates.
pub const GEOM_TOL: f64 = 1e-9;

/// Piecewise-linear convex non-increasing map `[0,1] → [0,1]`, stored by
/// its vertices. `x` is the type-I error, `y` the smallest type-II error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "io::RawCurve", into = "io::RawCurve")]
pub struct TradeoffCurve {
    vertices: Vec<(f64, f64)>,
}

impl TradeoffCurve {
    /// Validates a vertex list.
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self> {
        validate(&vertices)?;
        Ok(TradeoffCurve { vertices })
    }

    /// Convex minorant of a point cloud, closed up to span `[0, 1]`.
    pub(crate) fn from_points(mut points: Vec<(f64, f64)>) -> Self {
        for p in points.iter_mut() {
            p.0 = p.0.clamp(0.0, 1.0);
            p.1 = p.1.clamp(0.0, 1.0).min(1.0 - p.0 + 1e-15).max(0.0);
        }
        if points.iter().all(|p| p.0 > 0.0) {
            points.push((0.0, 1.0));
        }
        let ymin = points.iter().map(|p| p.1).fold(1.0, f64::min);
        if points.iter().all(|p| p.0 < 1.0) {
            points.push((1.0, ymin));
        }
        let mut hull = lower_hull(&mut points);
        // monotone repair: a convex hull can only rise at its right end
        for i in 1..hull.len() {
            if hull[i].1 > hull[i - 1].1 {
                hull[i].1 = hull[i - 1].1;
            }
        }
        TradeoffCurve { vertices: hull }
    }

    /// `f(t) = 1 − t`: nothing can be distinguished.
    pub fn identity() -> Self {
        TradeoffCurve {
            vertices: vec![(0.0, 1.0), (1.0, 0.0)],
        }
    }

    /// Upper envelope of lines, clipped to the unit square.
    pub fn from_lines(lines: &[Line]) -> Self {
        Self::from_points(upper_envelope(lines))
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Value at `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(range("t", t, "[0, 1]"));
        }
        Ok(self.value_at(t))
    }

    /// Value at `t`, clamped into `[0, 1]`.
    pub fn value_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let v = &self.vertices;
        let i = v.partition_point(|p| p.0 < t);
        if i < v.len() && v[i].0 == t {
            return v[i].1;
        }
        if i == 0 {
            return v[0].1;
        }
        if i == v.len() {
            return v[v.len() - 1].1;
        }
        let (a, b) = (v[i - 1], v[i]);
        let w = (t - a.0) / (b.0 - a.0);
        a.1 + w * (b.1 - a.1)
    }

    /// Tightest η with `t + f(t) ≥ 1 − η`.
    pub fn tv(&self) -> f64 {
        let m = self
            .vertices
            .iter()
            .map(|&(x, y)| x + y)
            .fold(f64::INFINITY, f64::min);
        (1.0 - m).clamp(0.0, 1.0)
    }

    /// Whether the curve satisfies all three constraints of `budget`.
    pub fn check_budget(&self, budget: &PrivacyBudget) -> bool {
        let e = budget.epsilon().exp();
        let (d, h) = (budget.delta(), budget.eta());
        self.vertices.iter().all(|&(x, y)| {
            y >= 1.0 - d - e * x - GEOM_TOL
                && y >= (1.0 - d - x) / e - GEOM_TOL
                && y >= 1.0 - h - x - GEOM_TOL
        })
    }

    /// Smallest δ for which the curve is (ε, δ)-DP.
    pub fn delta_for_epsilon(&self, epsilon: f64) -> f64 {
        let e = epsilon.exp();
        self.vertices
            .iter()
            .map(|&(x, y)| (1.0 - e * x - y).max(1.0 - x - e * y))
            .fold(0.0, f64::max)
            .min(1.0)
    }

    /// Supporting lines of the segments.
    pub fn lines(&self) -> Vec<Line> {
        self.vertices
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let slope = ((b.1 - a.1) / (b.0 - a.0)).max(-envelope::MAX_SLOPE);
                Line::new(slope, a.1 - slope * a.0)
            })
            .collect()
    }

    /// Curve of the swapped hypotheses (reflection across `y = x`).
    pub fn mirror(&self) -> Self {
        Self::from_points(self.vertices.iter().map(|&(x, y)| (y, x)).collect())
    }

    /// Largest vertical gap, attained at a vertex of either curve.
    pub fn sup_distance(&self, other: &TradeoffCurve) -> f64 {
        self.vertices
            .iter()
            .chain(other.vertices.iter())
            .map(|&(x, _)| (self.value_at(x) - other.value_at(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Smallest `self(t) − other(t)`; non-negative iff `self` dominates.
    pub fn min_gap(&self, other: &TradeoffCurve) -> f64 {
        self.vertices
            .iter()
            .chain(other.vertices.iter())
            .map(|&(x, _)| self.value_at(x) - other.value_at(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Pointwise maximum: the intersection of the privacy regions.
    pub fn intersect(curves: &[TradeoffCurve]) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::Argument("intersect needs at least one curve".into()));
        }
        let lines: Vec<Line> = curves.iter().flat_map(|c| c.lines()).collect();
        Ok(Self::from_lines(&lines))
    }

    /// Largest convex curve below every input: the union of the regions,
    /// convexified (worst case over a family of mechanisms).
    pub fn worst_case(curves: &[TradeoffCurve]) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::Argument("worst_case needs at least one curve".into()));
        }
        let pts = curves.iter().flat_map(|c| c.vertices.iter().copied()).collect();
        Ok(Self::from_points(pts))
    }
}

/// Boundary of the region allowed by `budget`.
pub fn curve_from_budget(budget: &PrivacyBudget) -> TradeoffCurve {
    TradeoffCurve::from_lines(&budget_lines(
        budget.epsilon(),
        1.0 - budget.delta(),
        1.0 - budget.eta(),
    ))
}

/// The three lower-bound lines of a budget, written with `1 − δ` and
/// `1 − η` so callers can pass them without cancellation.
pub(crate) fn budget_lines(epsilon: f64, one_minus_delta: f64, one_minus_eta: f64) -> [Line; 3] {
    [
        Line::new(-epsilon.exp(), one_minus_delta),
        Line::new(-(-epsilon).exp(), one_minus_delta * (-epsilon).exp()),
        Line::new(-1.0, one_minus_eta),
    ]
}

/// Exact ROC of a discrete pair by Neyman–Pearson.
///
/// Outcomes are rejected in decreasing order of `P₁/P₀`; equal ratios
/// form one step.
pub fn curve_from_pair(pair: &DiscretePair) -> TradeoffCurve {
    curve_from_masses(pair.p0().iter().copied().zip(pair.p1().iter().copied()).collect())
}

/// Same as [`curve_from_pair`] on an unnormalised list of `(p0, p1)`.
pub(crate) fn curve_from_masses(mut masses: Vec<(f64, f64)>) -> TradeoffCurve {
    masses.retain(|&(a, b)| a > 0.0 || b > 0.0);
    // ascending log(p0/p1), with p0 = 0 first and p1 = 0 last
    let key = |&(a, b): &(f64, f64)| a.ln() - b.ln();
    masses.sort_by(|x, y| key(x).total_cmp(&key(y)));
    let mut groups: Vec<(f64, f64, f64)> = Vec::with_capacity(masses.len());
    for m in masses {
        let k = key(&m);
        match groups.last_mut() {
            Some(g) if g.2 == k || (k.is_finite() && (g.2 - k).abs() <= 1e-12 * k.abs().max(1.0)) => {
                g.0 += m.0;
                g.1 += m.1;
            }
            _ => groups.push((m.0, m.1, k)),
        }
    }
    let n = groups.len();
    let mut tail = vec![0.0; n + 1];
    let mut acc = Kahan::default();
    for i in (0..n).rev() {
        acc.add(groups[i].1);
        tail[i] = acc.value();
    }
    let mut pts = Vec::with_capacity(n + 2);
    let mut x = Kahan::default();
    pts.push((0.0, tail[0].min(1.0)));
    for (i, g) in groups.iter().enumerate() {
        x.add(g.0);
        pts.push((x.value(), tail[i + 1]));
    }
    TradeoffCurve::from_points(pts)
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn validate(v: &[(f64, f64)]) -> Result<()> {
    if v.len() < 2 {
        return Err(Error::Validation("a curve needs at least two vertices".into()));
    }
    if v.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::Validation("vertices must be finite".into()));
    }
    if v[0].0 != 0.0 || v[v.len() - 1].0 != 1.0 {
        return Err(Error::Validation("first vertex must have x = 0 and last x = 1".into()));
    }
    for &(x, y) in v {
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::Validation(format!("vertex y = {y} outside [0, 1]")));
        }
        if y > 1.0 - x + 1e-12 {
            return Err(Error::Validation(format!("vertex ({x}, {y}) lies above y = 1 - x")));
        }
    }
    let mut prev_slope = f64::NEG_INFINITY;
    for w in v.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::Validation("vertex x must be strictly increasing".into()));
        }
        let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        if s > GEOM_TOL {
            return Err(Error::Validation(format!("curve increases after x = {}", w[0].0)));
        }
        if s < prev_slope - GEOM_TOL * prev_slope.abs().max(1.0) {
            return Err(Error::Validation(format!("curve is not convex at x = {}", w[0].0)));
        }
        prev_slope = s;
    }
    Ok(())
}

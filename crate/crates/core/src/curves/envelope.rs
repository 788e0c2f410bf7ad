//! Planar primitives: upper envelopes of lines and lower convex hulls.

/// Steepest slope kept finite; steeper lines only matter at `x = 0`.
pub(crate) const MAX_SLOPE: f64 = 1e300;

/// The line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn new(slope: f64, intercept: f64) -> Self {
        Line {
            slope: slope.clamp(-MAX_SLOPE, MAX_SLOPE),
            intercept,
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        if x == 0.0 {
            self.intercept
        } else {
            self.intercept + self.slope * x
        }
    }
}

// x where `b` (larger slope) overtakes `a`
fn crossing(a: &Line, b: &Line) -> f64 {
    (a.intercept - b.intercept) / (b.slope - a.slope)
}

/// Vertices of `max(0, max_i lines_i)` restricted to `[0, 1]`.
pub(crate) fn upper_envelope(lines: &[Line]) -> Vec<(f64, f64)> {
    let mut ls: Vec<Line> = lines
        .iter()
        .filter(|l| l.slope.is_finite() && l.intercept.is_finite())
        .copied()
        .chain(std::iter::once(Line::new(0.0, 0.0)))
        .collect();
    ls.sort_by(|a, b| {
        a.slope
            .total_cmp(&b.slope)
            .then(b.intercept.total_cmp(&a.intercept))
    });
    ls.dedup_by(|later, earlier| later.slope == earlier.slope);

    let mut hull: Vec<Line> = Vec::with_capacity(ls.len());
    for l in ls {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            if crossing(a, &l) <= crossing(a, b) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }

    let value = |x: f64| hull.iter().map(|l| l.at(x)).fold(f64::NEG_INFINITY, f64::max);
    let mut pts = vec![(0.0, value(0.0))];
    for w in hull.windows(2) {
        let x = crossing(&w[0], &w[1]);
        if x > 0.0 && x < 1.0 {
            let flatter = if w[0].slope.abs() <= w[1].slope.abs() { &w[0] } else { &w[1] };
            pts.push((x, flatter.at(x)));
        }
    }
    pts.push((1.0, value(1.0)));
    pts
}

/// Lower convex hull of a point set, left to right.
///
/// Points whose height above the chord of their neighbours is below
/// `1e-13` are dropped, which also removes collinear runs.
pub(crate) fn lower_hull(points: &mut Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    points.dedup_by(|later, earlier| later.0 == earlier.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points.iter() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let (dx, dy) = (p.0 - a.0, p.1 - a.1);
            let cross = (b.0 - a.0) * dy - (b.1 - a.1) * dx;
            if cross <= 1e-13 * dx.hypot(dy) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

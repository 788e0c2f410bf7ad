use serde::{Deserialize, Serialize};

use super::TradeoffCurve;
use crate::error::Error;
use crate::numeric::format_num;

#[derive(Serialize, Deserialize)]
pub(super) struct RawCurve {
    vertices: Vec<[f64; 2]>,
}

impl TryFrom<RawCurve> for TradeoffCurve {
    type Error = Error;
    fn try_from(r: RawCurve) -> Result<Self, Error> {
        TradeoffCurve::new(r.vertices.into_iter().map(|[x, y]| (x, y)).collect())
    }
}

impl From<TradeoffCurve> for RawCurve {
    fn from(c: TradeoffCurve) -> Self {
        RawCurve {
            vertices: c.vertices.iter().map(|&(x, y)| [x, y]).collect(),
        }
    }
}

impl TradeoffCurve {
    /// CSV with header `beta_I,beta_II`: the vertices, merged with a
    /// uniform grid of `grid` points when given.
    pub fn to_csv(&self, grid: Option<usize>) -> String {
        let mut xs: Vec<f64> = self.vertices.iter().map(|p| p.0).collect();
        if let Some(n) = grid {
            match n {
                0 => {}
                1 => xs.push(0.0),
                _ => xs.extend((0..n).map(|i| i as f64 / (n - 1) as f64)),
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut out = String::from("beta_I,beta_II\n");
        for x in xs {
            out.push_str(&format_num(x));
            out.push(',');
            out.push_str(&format_num(self.value_at(x)));
            out.push('\n');
        }
        out
    }
}

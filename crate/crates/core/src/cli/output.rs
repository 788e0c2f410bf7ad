use serde_json::{json, Number, Value};

use crate::composition::CompositionLedger;
use crate::curves::TradeoffCurve;
use crate::numeric::{format_num, round12};

/// JSON number rounded to 12 significant digits; non-finite values
/// become the strings `inf`, `-inf`, `nan`.
pub fn num(x: f64) -> Value {
    match Number::from_f64(round12(x)) {
        Some(n) => Value::Number(n),
        None => Value::String(format_num(x)),
    }
}

pub fn fmt(x: f64) -> String {
    format_num(x)
}

/// Compact JSON followed by a newline, with every float rounded.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string(&round_all(v.clone())).expect("serialisable");
    s.push('\n');
    s
}

fn round_all(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(round_all).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_all(v))).collect()),
        other => other,
    }
}

pub fn curve_json(c: &TradeoffCurve) -> Value {
    json!({"vertices": c.vertices().iter().map(|&(x, y)| vec![num(x), num(y)]).collect::<Vec<_>>()})
}

pub fn ledger_json(l: &CompositionLedger) -> Value {
    json!({
        "k": l.k,
        "entries": l.entries.iter().map(|e| json!({"j": e.j, "eps": num(e.eps), "delta": num(e.delta)})).collect::<Vec<_>>(),
        "eta": num(l.eta),
    })
}

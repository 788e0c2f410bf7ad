use std::process::Command;

use serde_json::Value;

fn tvdp(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tvdp"))
        .args(args)
        .env_remove("TVDP_MAX_EPS")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = tvdp(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn region_json_and_csv() {
    let v = json(&["region", "--eps", "1", "--eta", "0.3"]);
    let verts = v["vertices"].as_array().unwrap();
    assert_eq!(verts.len(), 4);
    assert_eq!(verts[0], serde_json::json!([0.0, 1.0]));
    let (code, csv, _) = tvdp(&["region", "--eps", "1", "--eta", "0.3", "--out", "csv", "--grid", "11"]);
    assert_eq!(code, 0);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("beta_I,beta_II"));
    assert!(lines.count() >= 11);
}

#[test]
fn pure_tv_region_uses_the_cap() {
    let v = json(&["region", "--pure-tv", "--eta", "0.25"]);
    let verts = v["vertices"].as_array().unwrap();
    assert_eq!(verts.len(), 4);
    let out = Command::new(env!("CARGO_BIN_EXE_tvdp"))
        .args(["region", "--pure-tv", "--eta", "0.25"])
        .env("TVDP_MAX_EPS", "bad")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compose_outputs() {
    let v = json(&["compose", "--eps", "1", "--eta", "0.323482", "-k", "2"]);
    assert_eq!(v["k"], 2);
    assert!((v["eta"].as_f64().unwrap() - 0.4205266).abs() < 1e-6);
    let t = json(&["compose", "--eps", "1", "--eta", "0.323482", "-k", "2", "--mode", "types"]);
    assert!((t["eta"].as_f64().unwrap() - v["eta"].as_f64().unwrap()).abs() < 1e-9);
    let k = json(&["compose", "--eps", "1", "--eta", "0.3", "-k", "5", "--baseline", "kairouz"]);
    assert_eq!(k["entries"].as_array().unwrap().len(), 3);
}

#[test]
fn amplify_clt_and_mechanisms() {
    let a = json(&["amplify", "--eps", "1", "--eta", "0.3", "-p", "0.1"]);
    assert!((a["eta"].as_f64().unwrap() - 0.03).abs() < 1e-12);
    let c = json(&["clt", "--eps", "0.1", "--eta", "0.0499583", "-k", "100"]);
    assert!(c["gap"].as_f64().unwrap() < 0.01);
    let l = json(&["mech", "tv", "--kind", "laplace", "--eps", "1"]);
    assert!((l.as_f64().unwrap() - (1.0 - (-0.5f64).exp())).abs() < 1e-12);
    let s = json(&["mech", "tv", "--kind", "staircase", "--gamma", "0.5", "--eps", "1"]);
    assert!((s.as_f64().unwrap() - (0.5f64).tanh()).abs() < 1e-12);
    let p = json(&["mech", "pair", "--eps", "1", "--eta", "0.3"]);
    assert_eq!(p["p0"].as_array().unwrap().len(), 5);
    let (code, _, err) = tvdp(&["mech", "tv", "--kind", "gaussian"]);
    assert_eq!(code, 2);
    assert!(err.contains("--mu"));
}

#[test]
fn ldp_subcommands() {
    let q = json(&["ldp", "qstar", "--eps", "1", "--eta", "0.3"]);
    let text = q.to_string();
    let chk = json(&["ldp", "check", "--channel", &text]);
    assert!((chk["eps"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((chk["tv"].as_f64().unwrap() - 0.3).abs() < 1e-9);
    let inf = json(&["ldp", "check", "--channel", r#"{"matrix":[[1,0],[0,1]]}"#]);
    assert_eq!(inf["eps"], "inf");
    let be = json(&["ldp", "bemech", "--p0", "0.5,0.5", "--p1", "0.9,0.1", "--eps", "1", "--eta", "0.3"]);
    assert_eq!(be["matrix"].as_array().unwrap().len(), 2);
    let b = json(&["ldp", "bounds", "--eps", "1", "--eta", "0.3"]);
    assert!((b["max_kl"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    let (code, _, err) = tvdp(&["ldp", "check", "--channel", r#"{"matrix":[[0.5,0.6]]}"#]);
    assert_eq!(code, 2);
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn sgd_small_run() {
    let v = json(&[
        "sgd", "--n", "1000", "--batch", "100", "--epochs", "1", "--mu", "0.5", "--eps-from", "0.5", "--eps-to",
        "1.5", "--eps-step", "0.5",
    ]);
    assert_eq!(v["steps"], 10);
    assert_eq!(v["ledgers"].as_array().unwrap().len(), 3);
    assert!(v["report"]["refined_tv"].as_f64().unwrap() <= v["report"]["baseline_tv"].as_f64().unwrap() + 1e-12);
}

#[test]
fn validation_errors() {
    for args in [
        &["region", "--eps", "1", "--eta", "0.5"][..],
        &["region", "--eps", "-1", "--eta", "0.1"],
        &["region", "--eps", "x", "--eta", "0.1"],
        &["compose", "--eps", "1", "--eta", "0.3", "-k", "0"],
        &["amplify", "--eps", "1", "--eta", "0.3", "-p", "0"],
        &["frobnicate"],
    ] {
        let (code, out, err) = tvdp(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty());
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn help_is_plain() {
    let (code, out, _) = tvdp(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["region", "compose", "amplify", "clt", "mech", "ldp", "sgd"] {
        assert!(out.contains(sub));
    }
}

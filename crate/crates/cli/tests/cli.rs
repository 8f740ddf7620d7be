use std::process::{Command, Output};

use capra_core::norms::{k_support_norm, top_k_norm};
use capra_core::verify::{run_suite, Suite};

fn capra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capra"))
        .args(args)
        .env("CAPRA_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value(args: &[&str]) -> String {
    let out = capra(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out).trim().to_string()
}

#[test]
fn norm_examples() {
    assert_eq!(value(&["norm", "--kind", "topk", "--q", "1", "--k", "2", "--x", "3,-1,2"]), "5");
    assert_eq!(
        value(&["norm", "--kind", "ksupport", "--p", "inf", "--k", "2", "--x", "1,1,1"]),
        "1.5"
    );
    assert_eq!(
        value(&["norm", "--kind", "best", "--p", "2", "--phi", "id", "--x", "1,-1"]),
        "2"
    );
    assert_eq!(value(&["norm", "--kind", "lp", "--p", "inf", "--x", "-4,3"]), "4");
}

#[test]
fn norm_output_is_the_library_value() {
    let x = [0.3, -1.7, 2.9, 0.01];
    let xs = "0.3,-1.7,2.9,0.01";
    let lib = k_support_norm(&x, 2.0, 2).unwrap();
    let cli: f64 = value(&["norm", "--kind", "ksupport", "--p", "2", "--k", "2", "--x", xs])
        .parse()
        .unwrap();
    assert_eq!(cli, format!("{lib:.11e}").parse::<f64>().unwrap());
    let lib = top_k_norm(&x, 3.0, 3).unwrap();
    let cli: f64 = value(&["norm", "--kind", "topk", "--q", "3", "--k", "3", "--x", xs])
        .parse()
        .unwrap();
    assert_eq!(cli, format!("{lib:.11e}").parse::<f64>().unwrap());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("norm.json");
    std::fs::write(&path, r#"{"source": {"lp": "inf"}, "phi": [0, 1, 1]}"#).unwrap();
    let cfg = path.to_str().unwrap();
    // φ = (0,1,1) under ℓ∞ gives max(‖x‖∞, ‖x‖₁/2)
    let from_config = value(&["norm", "--kind", "best", "--config", cfg, "--x", "1,1"]);
    assert_eq!(from_config, "1");
    let overridden = value(&["norm", "--kind", "best", "--config", cfg, "--p", "1", "--x", "1,1"]);
    assert_eq!(overridden, "2");
    let phi_flag = value(&["norm", "--kind", "best", "--config", cfg, "--phi", "id", "--x", "1,1"]);
    assert_eq!(phi_flag, "2");
}

#[test]
fn exit_codes() {
    let parse = capra(&["norm", "--kind", "topk", "--q", "1", "--k", "2", "--x", "3,x"]);
    assert_eq!(parse.status.code(), Some(2));
    let unknown = capra(&["norm", "--kind", "nope", "--x", "1"]);
    assert_eq!(unknown.status.code(), Some(2));
    let domain = capra(&["norm", "--kind", "ksupport", "--p", "2", "--k", "3", "--x", "1,2"]);
    assert_eq!(domain.status.code(), Some(3));
    let stderr = String::from_utf8(domain.stderr).unwrap();
    assert!(stderr.contains("k = 3"), "{stderr}");
    let bad_p = capra(&["norm", "--kind", "ksupport", "--p", "0.5", "--k", "1", "--x", "1,2"]);
    assert_eq!(bad_p.status.code(), Some(3));
    for nu in ["lp:0", "lp:-1", "l2"] {
        let out = capra(&["envelope", "--nu", nu, "--grid", "11"]);
        assert_eq!(out.status.code(), Some(3), "{nu}");
    }
}

#[test]
fn infinity_literals() {
    let inf_point = capra(&["norm", "--kind", "lp", "--p", "2", "--x", "+inf,1"]);
    assert_eq!(inf_point.status.code(), Some(2));
    assert_eq!(
        value(&["conjugate", "--f", "phi:0,+inf,1", "--nu", "lp:2", "--y", "0.5,0.5"]),
        "0"
    );
}

#[test]
fn envelope_checkpoints_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("surface.csv");
    let json = dir.path().join("summary.json");
    let out = value(&[
        "envelope",
        "--f",
        "l0",
        "--nu",
        "lp:2",
        "--grid",
        "51",
        "--out",
        csv.to_str().unwrap(),
        "--summary",
        json.to_str().unwrap(),
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "(0,0) 0");
    assert_eq!(lines[1], "(1,0) 1");
    assert_eq!(lines[2], "(0.707106781187,0.707106781187) 2");

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("x_1,x_2,value"));
    let rows: Vec<Vec<&str>> = rows.map(|r| r.split(',').collect()).collect();
    assert_eq!(rows.len(), 51 * 51);
    for r in &rows {
        let (a, b): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        if a.hypot(b) > 1.0 + 1e-9 {
            assert_eq!(r[2], "+inf");
        } else {
            let v: f64 = r[2].parse().unwrap();
            assert!((-1e-12..=2.0).contains(&v), "{r:?}");
        }
    }

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(summary["min"], 0.0);
    assert_eq!(summary["values_at"][1]["v"], 1.0);
}

#[test]
fn linf_envelope_is_l1() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("linf.csv");
    value(&["envelope", "--nu", "lp:inf", "--grid", "41", "--out", csv.to_str().unwrap()]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let h = 2.0 / 38.0;
    for r in text.lines().skip(1) {
        let c: Vec<&str> = r.split(',').collect();
        let (a, b): (f64, f64) = (c[0].parse().unwrap(), c[1].parse().unwrap());
        if a.abs().max(b.abs()) > 1.0 + 1e-9 {
            assert_eq!(c[2], "+inf");
        } else {
            let v: f64 = c[2].parse().unwrap();
            assert!((v - (a.abs() + b.abs())).abs() <= 2.0 * h, "{r}");
        }
    }
}

#[test]
fn zero_function_envelope_vanishes_on_the_ball() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("zero.csv");
    let out = value(&["envelope", "--f", "zero", "--grid", "21", "--out", csv.to_str().unwrap()]);
    assert!(out.lines().all(|l| l.ends_with(" 0")), "{out}");
    let text = std::fs::read_to_string(&csv).unwrap();
    for r in text.lines().skip(1) {
        let v = r.rsplit(',').next().unwrap();
        assert!(v == "0" || v == "+inf", "{r}");
    }
}

#[test]
fn verify_reports_are_deterministic_json() {
    let a = capra(&["verify", "--suite", "all", "--seed", "0x5EED"]);
    let b = capra(&["verify", "--suite", "all", "--seed", "24301"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 0x5EED);
    for check in report["checks"].as_array().unwrap() {
        assert!(check["name"].is_string());
        assert!(check.get("tolerance").is_some());
        assert!(check.get("observed_error").is_some());
    }
    let lib = run_suite(Suite::Norms, 7).unwrap().to_json().unwrap();
    let cli = value(&["verify", "--suite", "norms", "--seed", "7"]);
    assert_eq!(cli, lib);
}

#[test]
fn oracles_are_reachable() {
    assert_eq!(
        value(&["verify", "--oracle", "k-support", "--at", "1,1,1", "--p", "inf", "--k", "2"]),
        "1.5"
    );
    let sf: f64 = value(&[
        "verify", "--oracle", "support-function", "--at", "1,-1", "--p", "2", "--phi", "id",
        "--directions", "20000",
    ])
    .parse()
    .unwrap();
    assert!(sf <= 2.0 + 1e-12 && sf >= 2.0 - 1e-3, "{sf}");
    assert_eq!(
        value(&["verify", "--oracle", "naive-conjugate", "--at", "0,0", "--grid", "21"]),
        "0"
    );
    let env = value(&["verify", "--oracle", "convex-envelope", "--at", "1,0", "--grid", "41"]);
    assert_eq!(env, "(1,0) 1");
    let missing = capra(&["verify", "--oracle", "k-support"]);
    assert_eq!(missing.status.code(), Some(2));
}

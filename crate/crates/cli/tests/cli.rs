use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coadjoint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("single JSON object")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("JSON line"))
        .collect()
}

#[test]
fn schwarzian_of_identity_is_zero() {
    let out = run(&["schwarzian", r#"{"shift":0,"p":{"a0":0}}"#]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["lambda"], 2.0);
    let value = &v["value"];
    assert_eq!(value["a0"], 0.0);
    for key in ["cos", "sin"] {
        assert!(value[key].as_array().unwrap().iter().all(|c| c.as_f64() == Some(0.0)));
    }
}

#[test]
fn schwarzian_pointwise_anchor() {
    // S(x + 0.1 sin x)(0) = -1/11.
    let out = run(&["schwarzian", r#"{"shift":0,"p":{"a0":0,"cos":[],"sin":[0.1]}}"#]);
    assert!(out.status.success());
    let s: coadjoint::density::Density = serde_json::from_slice(&out.stdout).unwrap();
    assert!((s.value.eval(0.0) + 1.0 / 11.0).abs() < 1e-12);
}

#[test]
fn monodromy_of_harmonic_oscillator() {
    let out = run(&["monodromy", "--op", r#"{"a":-2,"u":{"a0":-2}}"#, "--steps", "4096"]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert!((v["trace"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(v["lift_index"], 2);
    assert_eq!(v["class"], "parabolic");
    assert!(v["wronskian_drift"].as_f64().unwrap() < 1e-8);
}

#[test]
fn monodromy_rejects_degenerate_operator() {
    let out = run(&["monodromy", "--op", r#"{"a":0,"u":{"a0":1}}"#]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "DegenerateOperator");
}

#[test]
fn gf_cocycle_shorthands() {
    let v = json_stdout(&run(&["gf-cocycle", "sin", "cos"]));
    assert!((v["value"].as_f64().unwrap() + std::f64::consts::PI).abs() < 1e-12);
    let v = json_stdout(&run(&["gf-cocycle", "cos", "sin"]));
    assert!((v["value"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);
    let v = json_stdout(&run(&["gf-cocycle", "3", "sin2"]));
    assert_eq!(v["value"], 0.0);
    let json_sin = r#"{"a0":0,"cos":[],"sin":[1]}"#;
    let v = json_stdout(&run(&["gf-cocycle", json_sin, "cos1"]));
    assert!((v["value"].as_f64().unwrap() + std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn gf_cocycle_rejects_garbage() {
    let out = run(&["gf-cocycle", "tan", "cos"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "Parse");
}

#[test]
fn star_of_coordinates() {
    let out = run(&["star", "[[1,0,1,1]]", "[[0,1,1,1]]", "--order", "3"]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    let hbar = v["hbar"].as_array().unwrap();
    assert_eq!(hbar.len(), 4);
    assert_eq!(hbar[0], serde_json::json!([[1, 1, 1, 1]]));
    assert!(hbar[2].as_array().unwrap().is_empty());
    assert!(hbar[3].as_array().unwrap().is_empty());
}

#[test]
fn transvectant_order_zero_is_product() {
    let out = run(&[
        "transvectant",
        r#"{"lambda":1,"value":{"a0":2}}"#,
        r#"{"lambda":0.5,"value":{"a0":0,"cos":[3]}}"#,
        "--m",
        "0",
    ]);
    assert!(out.status.success());
    let d: coadjoint::density::Density = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d.lambda, 1.5);
    assert!((d.value.eval(0.4) - 6.0 * 0.4f64.cos()).abs() < 1e-12);
}

#[test]
fn verify_with_empty_suite_list() {
    let dir = std::env::temp_dir().join(format!("coadjoint-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("empty.json");
    std::fs::write(&path, r#"{"suites":[]}"#).unwrap();
    let out = run(&["verify", "--config", path.to_str().unwrap()]);
    assert!(out.status.success());
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["checks"], 0);
    assert_eq!(lines[0]["prng"], "ChaCha8");
}

#[test]
fn verify_rejects_unknown_suite_and_bad_tolerance() {
    let out = run(&["verify", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = std::env::temp_dir().join(format!("coadjoint-cli-tol-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"tolerances":{"coad_duality":-1.0}}"#).unwrap();
    let out = run(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "Config");
}

#[test]
fn virasoro_verify_passes_and_is_deterministic() {
    let a = run(&["virasoro-verify", "--seed", "7"]);
    let b = run(&["virasoro-verify", "--seed", "7"]);
    assert!(a.status.success());
    let strip = |out: &Output| {
        json_lines(out)
            .into_iter()
            .map(|mut v| {
                if let Some(o) = v.as_object_mut() {
                    o.remove("wall_time");
                }
                v
            })
            .collect::<Vec<_>>()
    };
    let (la, lb) = (strip(&a), strip(&b));
    assert_eq!(la, lb);
    assert!(la[1..].iter().all(|r| r["suite"] == "virasoro" && r["pass"] == true));
}

#[test]
fn mutation_breaks_virasoro_duality() {
    let out = run(&["verify", "--suite", "virasoro", "--mutation", "flip-central-sign"]);
    assert_eq!(out.status.code(), Some(1));
    let lines = json_lines(&out);
    assert_eq!(lines[0]["mutation"], "flip_central_sign");
    let duality = lines.iter().find(|r| r["check"] == "coad_duality").unwrap();
    assert_eq!(duality["pass"], false);
}

#[test]
fn super_verify_filters_by_sector() {
    let out = run(&["super-verify", "--sector", "ramond"]);
    assert!(out.status.success());
    let names: Vec<String> = json_lines(&out)[1..]
        .iter()
        .map(|r| r["check"].as_str().unwrap().to_string())
        .collect();
    assert!(names.contains(&"super_jacobi_ramond".to_string()));
    assert!(!names.contains(&"super_jacobi_ns".to_string()));
}

#[test]
fn extalg_verify_passes() {
    let out = run(&["extalg-verify"]);
    assert!(out.status.success());
    assert!(json_lines(&out)[1..].iter().all(|r| r["pass"] == true));
}

#[test]
fn agd_verify_reports_the_tangency_failure() {
    let out = run(&["agd-verify"]);
    assert_eq!(out.status.code(), Some(1));
    let lines = json_lines(&out);
    let failing: Vec<&str> = lines[1..]
        .iter()
        .filter(|r| r["pass"] == false)
        .map(|r| r["check"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["agd_tangency"]);
}

use std::process::{Command, Output};

use mscasimir::cartan::{find_spec, parametrize, CartanLabel, ChiPoint, PairKind};
use mscasimir::liealg::Signature;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mscasimir")).args(args).output().expect("spawn mscasimir")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn rootdata_schema_and_exit_code() {
    let out = run(&["rootdata", "--p", "4", "--q", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "mscasimir/1");
    assert_eq!(v["kind"], "rootdata");
}

#[test]
fn output_is_byte_identical() {
    let args = ["cartan", "--p", "3", "--q", "1", "--seed", "3"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["radial", "--p", "3", "--q", "1", "--cartan", "02", "--alpha", "0.5", "--beta", "-0.3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn floats_carry_seventeen_digits() {
    let out = run(&["radial", "--p", "3", "--q", "0", "--alpha", "0.5", "--beta", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let floats: Vec<&str> = text
        .split(|ch: char| ch.is_whitespace() || ch == ',' || ch == '[' || ch == ']')
        .filter(|t| t.contains('e') && t.parse::<f64>().is_ok())
        .collect();
    assert!(!floats.is_empty());
    for t in floats {
        let mantissa = t.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{t}");
    }
}

#[test]
fn invalid_signature_exits_2() {
    let out = run(&["rootdata", "--p", "1", "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["schema"], "mscasimir/1");
    assert!(v["result"]["error"].as_str().unwrap().contains("signature"));
}

#[test]
fn unknown_cartan_label_exits_2() {
    let out = run(&["cartan", "--p", "3", "--q", "1", "--cartan", "xyz"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suite_shape() {
    let out = run(&["verify", "--suite", "spinor", "--suite", "defect"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let suites = v["result"]["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 2);
    for s in suites {
        assert!(s["suite"].is_string());
        assert!(s["cases"].as_u64().unwrap() > 0);
        assert_eq!(s["failures"].as_array().unwrap().len(), 0);
    }
}

#[test]
fn verify_reports_expected_failures() {
    let out = run(&["verify", "--suite", "rootspaces"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let s = &v["result"]["suites"][0];
    let xf = s["expected_failures"].as_array().unwrap();
    assert!(!xf.is_empty());
    for f in xf {
        assert!(f["name"].is_string() && f["reason"].is_string() && f["residual"].is_number());
    }
}

#[test]
fn coords_classify_region() {
    let out = run(&["coords", "classify", "--chi1", "0.4,0", "--chi2", "1.5,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["causal"], "E_st");
}

#[test]
fn coords_uv_from_matrix_file() {
    let spec = find_spec(Signature::new(3, 1).unwrap(), PairKind::FourPoint, CartanLabel::OneTwo).unwrap();
    let g = parametrize(&spec, &ChiPoint::real(&[0.4, 1.5])).unwrap();
    let rows: Vec<Vec<[f64; 2]>> = (0..g.nrows()).map(|i| (0..g.ncols()).map(|j| [g[(i, j)].re, g[(i, j)].im]).collect()).collect();
    let path = std::env::temp_dir().join(format!("mscasimir-uv-{}.json", std::process::id()));
    std::fs::write(&path, serde_json::to_string(&rows).unwrap()).unwrap();
    let out = run(&["coords", "uv", "--matrix", path.to_str().unwrap(), "--q", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert!(v["result"]["agreement"].as_f64().unwrap() < 1e-12);

    // A non-orthogonal matrix is rejected as invalid input.
    let mut bad = rows.clone();
    bad[0][0][0] += 1.0;
    std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    let out = run(&["coords", "uv", "--matrix", path.to_str().unwrap(), "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn text_format() {
    let out = run(&["rootdata", "--p", "3", "--q", "0", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("mscasimir/1"));
}

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use alphamod::covering::{build_bapu, build_covering};
use alphamod::families::SymbolFamily;
use alphamod::grid::Grid1D;
use alphamod::schatten::{certify_trace_bound, CertOptions};
use alphamod::spaces::NormSpec;
use serde_json::Value;

fn amcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amcert")).args(args).env_remove("AMCERT_THREADS").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn bundled() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/thm1_desk.json")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Library trace-bound ratios for a Gaussian dilation family at the given α.
fn library_ratios(alpha: f64, len: usize) -> Vec<(String, f64)> {
    let grid = Grid1D::new(3.0 * PI, len).unwrap();
    let cov = build_covering(alpha, 5.0, 1.0, 1.0).unwrap();
    let bx = build_bapu(&cov, grid, 0.25).unwrap();
    let bxi = build_bapu(&cov, grid.dual(), 0.25).unwrap();
    let spec = NormSpec::product(alpha / 2.0, alpha / 2.0, 1.0, 1.0, alpha).unwrap();
    let family = SymbolFamily::GaussianDilation { scales: vec![0.5, 1.0, 2.0] };
    family
        .generate(grid)
        .unwrap()
        .into_iter()
        .map(|m| {
            let opts = CertOptions { label: m.label.clone(), ..CertOptions::default() };
            let c = certify_trace_bound(&m.symbol, &bx, &bxi, &spec, &opts).unwrap();
            (m.label, c.ratio.value().unwrap())
        })
        .collect()
}

#[test]
fn covering_matches_library() {
    let out = json(&amcert(&["covering", "--alpha", "0.5", "--omega", "64"]));
    let lib = serde_json::to_value(build_covering(0.5, 64.0, 1.0, 1.0).unwrap()).unwrap();
    assert_eq!(out, lib);
}

#[test]
fn verify_thm1_ratio_matches_library() {
    let out = json(&amcert(&["verify-thm1", "--alpha", "1", "--family", "gaussian-dilation", "--n", "64"]));
    let entries = out.as_array().unwrap();
    let lib = library_ratios(1.0, 64);
    assert_eq!(entries.len(), lib.len());
    for (e, (label, ratio)) in entries.iter().zip(&lib) {
        assert_eq!(e["label"], label.as_str());
        assert_eq!(e["certificate"]["ratio"]["value"].as_f64().unwrap(), *ratio);
        assert_eq!(e["certificate"]["pass"], true);
    }
}

#[test]
fn schatten_two_reports_hs_identity() {
    let out = json(&amcert(&["schatten", "--p", "2", "--symbol", "gaussian"]));
    assert!(out["hs_rel_error"].as_f64().unwrap() <= 1e-12);
    assert!(out["lhs"].as_f64().unwrap() <= out["rhs"].as_f64().unwrap());
    let rel = (out["lhs"].as_f64().unwrap() - out["hs_frobenius"].as_f64().unwrap()).abs() / out["lhs"].as_f64().unwrap();
    assert!(rel <= 1e-12, "I_2 norm and Frobenius norm differ by {rel}");
}

#[test]
fn bundled_config_matches_library_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = amcert(&["run", bundled().to_str().unwrap(), "--out", dir.to_str().unwrap()]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let ja = std::fs::read(a.join("certificates.json")).unwrap();
    assert_eq!(ja, std::fs::read(b.join("certificates.json")).unwrap());

    let report: Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(report["failed"], 0);
    let certs = report["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 9);
    let mut k = 0;
    for alpha in [0.0, 0.5, 1.0] {
        for (label, ratio) in library_ratios(alpha, 64) {
            assert_eq!(certs[k]["alpha"].as_f64(), Some(alpha));
            assert_eq!(certs[k]["label"], label.as_str());
            assert_eq!(certs[k]["certificate"]["ratio"]["value"].as_f64(), Some(ratio));
            k += 1;
        }
    }
    let tables = std::fs::read_dir(a.join("piece_tables")).unwrap().count();
    assert_eq!(tables, 9);
    let summary = std::fs::read_to_string(a.join("summary.txt")).unwrap();
    assert!(summary.starts_with("9 of 9 certificates pass"));
}

#[test]
fn rerun_into_existing_directory_replaces_report() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let full = bundled();
    let empty = write(tmp.path(), "empty.json", r#"{"grid":{"half_width_pi":3,"len":64}}"#);
    for cfg in [&full, &empty] {
        assert!(amcert(&["run", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]).status.success());
    }
    assert_eq!(std::fs::read_dir(dir.join("piece_tables")).unwrap().count(), 0);
    let stray = std::fs::read_dir(tmp.path()).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with(".amcert")).count();
    assert_eq!(stray, 0);
}

#[test]
fn malformed_config_exits_two_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("truncated.json", r#"{"grid":{"len":64"#),
        ("unknown.json", r#"{"grid":{"half_width_pi":3,"len":64},"seed":4}"#),
        ("odd.json", r#"{"grid":{"half_width_pi":3,"len":63}}"#),
        ("alpha.json", r#"{"grid":{"half_width_pi":3,"len":64},"certificates":[{"kind":"thm1","alphas":[1.5],"family":{"generator":"gaussian"}}]}"#),
        ("corpus.json", r#"{"grid":{"half_width_pi":3,"len":64},"certificates":[{"kind":"thm2","alphas":[0],"symbol":{"generator":"gaussian"},"corpus":["sin"]}]}"#),
    ];
    for (name, text) in cases {
        let cfg = write(tmp.path(), name, text);
        let dir = tmp.path().join(format!("out-{name}"));
        let out = amcert(&["run", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(!dir.exists(), "{name} wrote a report");
    }
    let files = std::fs::read_dir(tmp.path()).unwrap().count();
    assert_eq!(files, cases.len());
}

#[test]
fn empty_certificate_list_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"grid":{"half_width":9.5,"len":32},"certificates":[]}"#);
    let dir = tmp.path().join("out");
    let out = amcert(&["run", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&std::fs::read(dir.join("certificates.json")).unwrap()).unwrap();
    assert_eq!(report["certificates"], Value::Array(vec![]));
}

#[test]
fn exceeded_cap_is_a_hard_failure_naming_the_certificate() {
    let out = amcert(&["verify-thm1", "--alpha", "0.5", "--family", "gaussian", "--cap", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("thm1[alpha=0.5] gaussian(w=1,x0=0,xi0=0)"), "{err}");
    assert!(err.contains("ratio_cap"), "{err}");
}

#[test]
fn unknown_flags_are_rejected() {
    assert_eq!(amcert(&["covering", "--alpha", "0.5", "--omega", "8", "--verbose"]).status.code(), Some(2));
    assert_eq!(amcert(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn invalid_thread_override_is_a_config_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_amcert"))
        .args(["covering", "--alpha", "0", "--omega", "4"])
        .env("AMCERT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("AMCERT_THREADS"));

    let out = Command::new(env!("CARGO_BIN_EXE_amcert"))
        .args(["covering", "--alpha", "0", "--omega", "4"])
        .env("AMCERT_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn quantize_writes_matrix_file() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("kn.csv");
    let out = amcert(&["quantize", "--family", "separable", "--n", "16", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert!(text.lines().all(|l| l.split(',').count() == 32));
}

#[test]
fn thm2_covers_requested_corpus() {
    let out = json(&amcert(&["verify-thm2", "--alpha", "0.5", "--family", "gaussian", "--corpus", "cos,windowed-x"]));
    let ids: Vec<&str> = out.as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert_eq!(ids.len(), 2);
    assert!(ids[0].ends_with("x cos") && ids[1].ends_with("x windowed-x"));
}

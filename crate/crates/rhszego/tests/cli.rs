use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rhszego_core::theta::{theta, RiemannMatrix, ThetaChar};
use rhszego_core::linalg::CMatrix;
use rhszego_core::C64;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rhszego"));
    c.env("RH_NUM_THREADS", "2");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn err_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn malformed_json_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"branch_points\": [[0,1],");
    let out = bin().args(["periods", "--curve"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(err_json(&out)["error"], "ConfigError");

    let out = bin().args(["periods", "--curve"]).arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let wrong = write(&dir, "wrong.json", r#"{"branch_points": [[0,1]], "base": {}}"#);
    let out = bin().args(["periods", "--curve"]).arg(&wrong).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flags_and_environment() {
    let out = bin()
        .args(["verify", "--suite", "quick", "--curve"])
        .arg(data("sample_curve.json"))
        .arg("--char")
        .arg(data("sample_char.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .env("RH_NUM_THREADS", "0")
        .args(["verify", "--suite", "fay", "--curve"])
        .arg(data("sample_curve.json"))
        .arg("--char")
        .arg(data("sample_char.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["solve", "--lambda0", "1;2", "--curve"])
        .arg(data("sample_curve.json"))
        .arg("--char")
        .arg(data("sample_char.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn periods_report() {
    let out = bin().args(["periods", "--curve"]).arg(data("sample_curve.json")).output().unwrap();
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["genus"], 1);
    let b = &r["B"][0][0];
    assert!(b[1].as_f64().unwrap() > 0.0);
    assert!(b[0].as_f64().unwrap().abs() <= 0.5);
    for key in ["homology_basis", "odd_characteristic", "loop_layout", "version"] {
        assert!(!r["conventions"][key].is_null(), "{key}");
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("p.json");
    let out = bin().args(["periods", "--curve"]).arg(data("sample_curve.json")).arg("--output").arg(&target).output().unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(r["genus"], 1);
}

#[test]
fn theta_eval_matches_library() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "t.json",
        r#"{"char": {"p": [0.1, [0.2, 0.05]], "q": [-0.3, 0.25]}, "z": [[0.1, 0.2], [-0.3, 0.0]], "B": [[[0.1, 1.1], [0.2, 0.3]], [[0.2, 0.3], [-0.2, 0.9]]]}"#,
    );
    let out = bin().args(["theta-eval", "--input"]).arg(&input).output().unwrap();
    assert!(out.status.success());
    let r = json(&out);
    let c = |re: f64, im: f64| C64::new(re, im);
    let b = CMatrix::from_vec(2, 2, vec![c(0.1, 1.1), c(0.2, 0.3), c(0.2, 0.3), c(-0.2, 0.9)]).unwrap();
    let ch = ThetaChar::new(vec![c(0.1, 0.0), c(0.2, 0.05)], vec![c(-0.3, 0.0), c(0.25, 0.0)]).unwrap();
    let ev = theta(&ch, &[c(0.1, 0.2), c(-0.3, 0.0)], &RiemannMatrix::new(b).unwrap(), 1e-12).unwrap();
    let v = c(r["value"][0].as_f64().unwrap(), r["value"][1].as_f64().unwrap());
    assert_eq!(v, ev.value);
    assert_eq!(r["gradient"].as_array().unwrap().len(), 2);

    let asym = write(&dir, "a.json", r#"{"char": {"p": [0], "q": [0]}, "z": [[0, 0]], "B": [[[0.0, -1.0]]]}"#);
    let out = bin().args(["theta-eval", "--input"]).arg(&asym).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(err_json(&out)["error"], "NotRiemannMatrix");
}

#[test]
fn solve_writes_grid_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("grid.csv");
    let out = bin()
        .args(["solve", "--lambda0", "-0.45,0.9", "--grid", "5", "--curve"])
        .arg(data("sample_curve.json"))
        .arg("--char")
        .arg(data("sample_char.json"))
        .arg("--grid-csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["lambda0"][0], -0.45);
    let samples = r["samples"].as_array().unwrap();
    assert_eq!(samples.len() + r["skipped"].as_array().unwrap().len(), 25);
    assert!(r["product_residual"].as_f64().unwrap() < 1e-6);
    for m in r["monodromy"].as_array().unwrap() {
        assert_eq!(m["permutation"], serde_json::json!([1, 0]));
        assert!(m["max_deviation"].as_f64().unwrap() < 1e-6);
    }
    for s in samples {
        let d = &s["det"];
        assert!((d[0].as_f64().unwrap() - 1.0).abs() < 1e-8 && d[1].as_f64().unwrap().abs() < 1e-8);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), samples.len() + 1);
    assert!(lines[0].starts_with("re_lambda,im_lambda,psi11_re"));
    assert!(lines.iter().all(|l| l.split(',').count() == 10));
}

#[test]
fn solve_rejects_singular_normalization_point() {
    let out = bin()
        .args(["solve", "--lambda0", "-1,0.2", "--curve"])
        .arg(data("sample_curve.json"))
        .arg("--char")
        .arg(data("sample_char.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(err_json(&out)["error"], "SingularPoint");
}

#[test]
fn monodromy_command() {
    let run = |n: &str| {
        bin()
            .args(["monodromy", "--n", n, "--curve"])
            .arg(data("sample_curve.json"))
            .arg("--char")
            .arg(data("sample_char.json"))
            .output()
            .unwrap()
    };
    let out = run("1");
    assert!(out.status.success());
    let r = json(&out);
    let m = &r["monodromy"];
    assert_eq!(m["n"], 1);
    assert_eq!(m["permutation"], serde_json::json!([1, 0]));
    assert_eq!(m["intersections"].as_array().unwrap().len(), 2);
    assert!(r["generator_position"].as_u64().unwrap() < 4);
    let out = run("4");
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(err_json(&out)["error"], "IndexOutOfRange");
}

#[test]
fn tau_reference_handling() {
    let dir = TempDir::new().unwrap();
    let run = |reference: Option<&Path>| {
        let mut c = bin();
        c.args(["tau", "--curve"]).arg(data("sample_curve.json")).arg("--char").arg(data("sample_char.json"));
        if let Some(r) = reference {
            c.arg("--reference").arg(r);
        }
        c.output().unwrap()
    };
    let own = json(&run(None));
    assert_eq!(own["phase"], serde_json::json!([1.0, 0.0]));
    assert_eq!(own["reference"]["self_reference"], true);

    let same = json(&run(Some(&data("sample_curve.json"))));
    assert_eq!(same["reference"]["self_reference"], false);
    assert!((same["phase"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(same["tau"], own["tau"]);

    let moved = write(
        &dir,
        "ref.json",
        r#"{"branch_points": [[-1.1, 0.25], [-0.15, -0.45], [0.65, 0.35], [1.5, -0.2]], "basepoint": {"lambda": [0.2, 2.1]}}"#,
    );
    let r = json(&run(Some(&moved)));
    let ph = (r["phase"][0].as_f64().unwrap(), r["phase"][1].as_f64().unwrap());
    assert!((ph.0.hypot(ph.1) - 1.0).abs() < 1e-12);
    assert!(r["reference"]["tracking_steps"].as_u64().unwrap() > 0);

    let short = write(&dir, "short.json", r#"{"branch_points": [[0, 0], [1, 0]], "basepoint": {"lambda": [0.5, 1]}}"#);
    let out = run(Some(&short));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_exit_code_follows_checks() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .args(["verify", "--suite", "fay", "--seed", "5", "--curve"])
        .arg(data("sample_curve.json"))
        .arg("--char")
        .arg(data("sample_char.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["all_pass"], true);
    for c in r["checks"].as_array().unwrap() {
        for key in ["check", "params", "residual", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "{key}");
        }
    }

    // monodromy tolerance far below double precision: every loop fails
    let strict = write(
        &dir,
        "strict.json",
        r#"{"branch_points": [[-1.0, 0.2], [-0.1, -0.5], [0.6, 0.4], [1.4, -0.3]], "basepoint": {"lambda": [0.2, 2.1], "sheet": 1}, "tolerances": {"mon": 1e-300}}"#,
    );
    let out = bin()
        .args(["verify", "--suite", "schlesinger", "--curve"])
        .arg(&strict)
        .arg("--char")
        .arg(data("sample_char.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["all_pass"], false);
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["check"] == "monodromy" && !c["error"].is_null()));
}

#[test]
fn genus_mismatch_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "c.json", r#"{"p": [0.1, 0.2], "q": [0.0, 0.1]}"#);
    let out = bin().args(["tau", "--curve"]).arg(data("sample_curve.json")).arg("--char").arg(&ch).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn covering_command() {
    let dir = TempDir::new().unwrap();
    // three sheets: transpositions (01), (12), (12), (01); M_4 = M_1 = M_1^{-1}
    let rep = write(
        &dir,
        "rep.json",
        r#"{"n": 3, "lambda0": [0, 2],
            "points": [[-1, 0], [0, 0], [1, 0], [2, 0]],
            "matrices": [
              [[[0,0],[2,0],[0,0]], [[0.5,0],[0,0],[0,0]], [[0,0],[0,0],[1,0]]],
              [[[1,0],[0,0],[0,0]], [[0,0],[0,0],[1,0]], [[0,0],[1,0],[0,0]]],
              [[[1,0],[0,0],[0,0]], [[0,0],[0,0],[1,0]], [[0,0],[1,0],[0,0]]],
              [[[0,0],[2,0],[0,0]], [[0.5,0],[0,0],[0,0]], [[0,0],[0,0],[1,0]]]
            ]}"#,
    );
    let out = bin().args(["covering", "--rep"]).arg(&rep).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["connected"], true);
    assert_eq!(r["genus"], 0);
    assert!(r["product_residual"].as_f64().unwrap() < 1e-14);

    let broken = write(&dir, "broken.json", r#"{"n": 2, "lambda0": [0, 2], "points": [[0, 0]], "matrices": [[[[0,0],[1,0]], [[1,0],[0,0]]]]}"#);
    let out = bin().args(["covering", "--rep"]).arg(&broken).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(err_json(&out)["error"], "RelationViolated");
}

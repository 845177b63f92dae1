use std::path::Path;
use std::process::{Command, Output};

use gptsep::cli::{cmd_analyze, AnalyzeOptions, Format};
use serde_json::Value;

fn gptsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gptsep")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn singlet_is_certified() {
    let out = gptsep(&["analyze", "bell:psi-", "--format", "json"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["verdict"], "ENTANGLED_CERTIFIED");
    assert!((v["measure_e"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn maximally_mixed_is_undetected() {
    let out = gptsep(&["analyze", "maxmixed:2x2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "UNDETECTED");
    assert_eq!(v["measure_e"].as_f64().unwrap(), 0.0);
}

#[test]
fn trace_off_by_a_tenth_is_rejected_without_normalize() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "t.json",
        r#"{"dims": [2, 2], "matrix": [
        [[0.225, 0], [0, 0], [0, 0], [0, 0]],
        [[0, 0], [0.225, 0], [0, 0], [0, 0]],
        [[0, 0], [0, 0], [0.225, 0], [0, 0]],
        [[0, 0], [0, 0], [0, 0], [0.225, 0]]]}"#,
    );
    let out = gptsep(&["analyze", &f]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("trace"), "{}", stderr(&out));
    // outside the normalization window as well
    assert_eq!(code(&gptsep(&["analyze", &f, "--normalize"])), 1);
}

#[test]
fn slightly_off_trace_normalizes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.json", r#"{"dims": [2], "matrix": [[[0.5002, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#);
    assert_eq!(code(&gptsep(&["analyze", &f])), 1);
    assert_eq!(code(&gptsep(&["analyze", &f, "--normalize"])), 0);
}

#[test]
fn malformed_files_report_location() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{\"dims\": [2],\n\"matrix\": [[[1, 0], [0, 0]],\n[[0, 0], [0, 0 0]]]}");
    let out = gptsep(&["analyze", &f]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let f = write(dir.path(), "short.json", r#"{"dims": [2], "matrix": [[[0.5, 0], [0, 0]], [[0, 0]]]}"#);
    let out = gptsep(&["analyze", &f]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("row 1"), "{}", stderr(&out));

    assert_eq!(code(&gptsep(&["analyze", "does/not/exist.json"])), 1);
}

#[test]
fn norms_of_single_subsets() {
    let out = gptsep(&["norms", "bell:psi-", "cA,rB", "--format", "json"]);
    assert!((json(&out)["trace_norm"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    for state in ["bell:psi-", "werner:0.7", "random:2x3,4,5"] {
        for labels in ["", "rA,cA,rB,cB"] {
            let out = gptsep(&["norms", state, labels, "--format", "json"]);
            assert_eq!(code(&out), 0, "{state} {labels:?}: {}", stderr(&out));
            assert!((json(&out)["trace_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn unknown_label_is_an_input_error() {
    for labels in ["rC", "xA", "rA,,cB", "rAB"] {
        let out = gptsep(&["norms", "bell:psi-", labels]);
        assert_eq!(code(&out), 1, "{labels}");
    }
}

#[test]
fn generate_ghz_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ghz.json");
    let out = gptsep(&["generate", "ghz:3", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["dims"], serde_json::json!([2, 2, 2]));
    let m = v["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 8);
    assert!(m.iter().all(|row| row.as_array().unwrap().len() == 8));
}

#[test]
fn generate_rejects_bad_specs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.json");
    for spec in ["werner:1.5", "ghz:0", "nosuch:1", "random:2x2,9", "isotropic:3"] {
        assert_eq!(code(&gptsep(&["generate", spec, p.to_str().unwrap()])), 1, "{spec}");
    }
    assert!(!p.exists());
}

#[test]
fn generated_files_analyze_like_specs() {
    let dir = tempfile::tempdir().unwrap();
    for spec in ["werner:0.2", "werner:0.8", "horodecki3x3:0.3", "random:2x2x2,3,11", "separable:2x3,4,2"] {
        let p = dir.path().join("s.json");
        let p = p.to_str().unwrap();
        assert_eq!(code(&gptsep(&["generate", spec, p])), 0);
        let from_file = gptsep(&["analyze", p, "--format", "json"]);
        let from_spec = gptsep(&["analyze", spec, "--format", "json"]);
        assert_eq!(code(&from_file), code(&from_spec));
        let (a, b) = (json(&from_file), json(&from_spec));
        for key in ["ppt", "realignment", "gpt_scan", "verdict", "measure_e", "negativity", "tolerances"] {
            assert_eq!(a[key], b[key], "{spec}: {key}");
        }
        assert_eq!(from_file.stdout, from_spec.stdout, "{spec}");
        let (in_memory, _) = cmd_analyze(p, &AnalyzeOptions::default(), Format::Json).unwrap();
        assert_eq!(stdout(&from_file), in_memory);
    }
    let p = dir.path().join("w.json");
    gptsep(&["generate", "werner:0.2", p.to_str().unwrap()]);
    let out = gptsep(&["analyze", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("UNDETECTED"));
}

#[test]
fn scan_family_thresholds() {
    let out = gptsep(&["scan-family", "werner", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let t = json(&out)["threshold"].as_f64().unwrap();
    assert!((t - 1.0 / 3.0).abs() < 1e-6, "{t}");

    let out = gptsep(&["scan-family", "horodecki2x4", "--min", "0.05", "--max", "0.95", "--grid", "10"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("no threshold in range"));

    assert_eq!(code(&gptsep(&["scan-family", "werner", "--min", "1", "--max", "0"])), 1);
    assert_eq!(code(&gptsep(&["scan-family", "ghz"])), 1);
}

#[test]
fn flags_reach_the_scan() {
    let deduped = json(&gptsep(&["analyze", "bell:psi-", "--format", "json"]));
    let full = json(&gptsep(&["analyze", "bell:psi-", "--format", "json", "--no-dedupe"]));
    assert_eq!(deduped["gpt_scan"]["results"].as_array().unwrap().len(), 8);
    assert_eq!(full["gpt_scan"]["results"].as_array().unwrap().len(), 16);

    let out = gptsep(&["analyze", "bell:psi-", "--tol-norm", "2"]);
    assert_eq!(code(&out), 3, "PPT still fires");
    assert_eq!(code(&gptsep(&["analyze", "ghz:3", "--max-n", "2"])), 1);

    let a = gptsep(&["analyze", "random:2x2,2", "--seed", "4", "--format", "json"]);
    let b = gptsep(&["analyze", "random:2x2,2,4", "--format", "json"]);
    assert_eq!(json(&a)["gpt_scan"], json(&b)["gpt_scan"]);
}

#[test]
fn help_documents_specs_and_exit_codes() {
    let out = stdout(&gptsep(&["--help"]));
    assert!(out.contains("werner:P"));
    assert!(out.contains("EXIT CODES"));
}

#[test]
fn matrix_file_text_round_trips() {
    use gptsep::cli::MatrixFile;
    let rho = "random:2x3,4,8".parse::<gptsep::StateSpec>().unwrap().generate().unwrap();
    let file = MatrixFile::from_density(&rho, Some("a \"quoted\" name".into()), Some("line\nbreak".into()));
    let text = file.to_json();
    assert_eq!(text.lines().count(), 5 + 6 + 2);
    let back = MatrixFile::parse(&text).unwrap();
    assert_eq!(back, file);
    let tol = gptsep::Tolerances::default();
    assert_eq!(back.to_density(false, &tol).unwrap().matrix().entries(), rho.matrix().entries());
}

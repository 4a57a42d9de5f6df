use std::process::{Command, Output};

fn wedge_eof(args: &[&str]) -> Output {
    wedge_eof_env(args, &[])
}

fn wedge_eof_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wedge-eof"))
        .args(args)
        .env_clear()
        .envs(env.iter().copied())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn scan_spectrum_coarse_grid_has_231_rows() {
    let o = wedge_eof(&["scan-spectrum", "--grid-step", "0.05"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 231);
    assert!(text.lines().next().unwrap().starts_with("p23,p31,p12,theta,l1,"));
    let summary = text.lines().last().unwrap();
    assert!(
        summary.starts_with("# rows=231 ") && summary.ends_with("passed=true"),
        "{summary}"
    );
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 17);
        let p: Vec<f64> = cells[..3].iter().map(|c| c.parse().unwrap()).collect();
        let entropy: f64 = cells[13].parse().unwrap();
        let deviation: f64 = cells[14].parse().unwrap();
        assert!(deviation <= 1e-10);
        if p.contains(&1.0) {
            assert!((entropy - 2.0).abs() < 1e-12);
        } else {
            assert!(entropy > 2.0);
        }
    }
}

#[test]
fn scan_spectrum_json_summary() {
    let o = wedge_eof(&["scan-spectrum", "--grid-step", "0.1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), 66);
    assert_eq!(v["summary"]["passed"], true);
    assert!(v["summary"]["max_deviation"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn scan_bounds_reports_tangency_and_vertex_minimum() {
    let o = wedge_eof(&["scan-bounds", "--grid-step", "0.05"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# curve\nz,entropy,bound,piece,slack\n"));
    assert!(text.contains("\n# simplex\np23,p31,p12,l1,l2,l3,sum_first3,sum_last6,total,certificate,min_slack\n"));
    let tangent = text.lines().find(|l| l.starts_with("2.5000000000000000e-1,")).unwrap();
    assert!(tangent.ends_with(",quadratic,0.0000000000000000e0"), "{tangent}");
    let summary = text.lines().last().unwrap();
    assert!(summary.contains("min_total=2.0000000000000000e0"), "{summary}");
    assert!(summary.contains("equality_points=3") && summary.ends_with("passed=true"));
}

#[test]
fn scan_bounds_writes_directory_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bounds");
    let o = wedge_eof(&["scan-bounds", "--grid-step", "0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let curve = std::fs::read_to_string(out.join("curve.csv")).unwrap();
    let simplex = std::fs::read_to_string(out.join("simplex.csv")).unwrap();
    assert_eq!(data_rows(&curve).len(), 401);
    assert_eq!(data_rows(&simplex).len(), 66);

    let o = wedge_eof(&[
        "scan-bounds",
        "--grid-step",
        "0.1",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let simplex: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("simplex.json")).unwrap()).unwrap();
    assert!(simplex["summary"]["min_certificate"].as_f64().unwrap() >= 1.0 - 1e-9);
}

#[test]
fn verify_lemma1_passes_and_reports_worst_residuals() {
    let o = wedge_eof(&["verify-lemma1", "--samples", "200", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert!(v["counterexample"].is_null());
    for key in ["cofactor_transpose", "cofactor_conjugate", "wedge_action"] {
        assert!(v["worst"][key].as_f64().unwrap() <= 1e-12, "{key}");
    }
    for key in ["unitarity", "alignment", "alignment_exact"] {
        assert!(v["worst"][key].as_f64().unwrap() <= 1e-10, "{key}");
    }
}

#[test]
fn verify_lemma1_single_sample_is_deterministic() {
    let a = wedge_eof(&["verify-lemma1", "--samples", "1", "--seed", "42"]);
    let b = wedge_eof(&["verify-lemma1", "--samples", "1", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn injected_nonorthonormal_basis_fails_with_residual() {
    let o = wedge_eof(&["verify-lemma1", "--samples", "2", "--inject-nonorthonormal"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["passed"], false);
    assert_eq!(v["counterexample"]["index"], 0);
    assert_eq!(v["counterexample"]["check"], "basis is orthonormal");
    assert!(v["counterexample"]["residual"].as_f64().unwrap() > 1e-10);
    assert_eq!(v["counterexample"]["matrix"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_additivity_small_budget_passes() {
    let o = wedge_eof(&[
        "verify-additivity",
        "--samples",
        "1",
        "--budget",
        "4000",
        "--range-samples",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    let inst = &v["instances"][0];
    assert_eq!(inst["verdict"], "PASS");
    assert!((inst["upper"].as_f64().unwrap() - 2.0).abs() <= 1e-6);
    assert!((inst["upper_rho1"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    assert!(inst.get("rho1").is_none());
}

#[test]
fn sample_states_emit_requested_kinds() {
    let o = wedge_eof(&["sample-states", "--samples", "3", "--kind", "antisym-state"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 3);
    for s in samples {
        assert_eq!(s["dims"], serde_json::json!([3, 3]));
        assert_eq!(s["data"].as_array().unwrap().len(), 9);
        assert!((s["entanglement"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }

    let o = wedge_eof(&["sample-states", "--samples", "2", "--kind", "two-copy-state"]);
    let v = json(&o);
    for s in v["samples"].as_array().unwrap() {
        assert_eq!(s["data"].as_array().unwrap().len(), 81);
        assert!(s["entanglement"].as_f64().unwrap() >= 2.0 - 1e-9);
    }

    let o = wedge_eof(&["sample-states", "--samples", "2", "--format", "csv"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("index,row,col,re,im"));
    assert_eq!(data_rows(&text).len(), 2 * 81);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let to_file = wedge_eof(&["scan-spectrum", "--grid-step", "0.1", "--out", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    let to_stdout = wedge_eof(&["scan-spectrum", "--grid-step", "0.1"]);
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
}

#[test]
fn environment_overrides_flags() {
    let o = wedge_eof_env(&["scan-spectrum"], &[("WEDGE_EOF_GRID_STEP", "0.1")]);
    assert_eq!(data_rows(&stdout(&o)).len(), 66);
    let a = wedge_eof_env(&["sample-states"], &[("WEDGE_EOF_SEED", "5")]);
    let b = wedge_eof(&["sample-states", "--seed", "5"]);
    let c = wedge_eof(&["sample-states", "--seed", "6"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn usage_errors_exit_with_code_2() {
    let bad: [&[&str]; 9] = [
        &["scan-spectrum", "--grid-step", "0.2"],
        &["scan-spectrum", "--grid-step", "0"],
        &["scan-spectrum", "--grid-step", "0.03"],
        &["verify-lemma1", "--samples", "0"],
        &["verify-lemma1", "--tol", "-1"],
        &["verify-lemma1", "--format", "csv"],
        &["scan-bounds", "--z-divisions", "3"],
        &["scan-spectrum", "--no-such-flag"],
        &["no-such-command"],
    ];
    for args in bad {
        let o = wedge_eof(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn unwritable_output_is_a_config_error() {
    let o = wedge_eof(&["scan-spectrum", "--grid-step", "0.1", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

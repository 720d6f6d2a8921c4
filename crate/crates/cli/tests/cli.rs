use std::path::PathBuf;
use std::process::{Command, Output};

use galilei_cli::anchors::Anchor;
use galilei_cli::{run_suite, Suite};
use serde_json::Value;

const KINDS: [&str; 6] = ["algebra", "uea", "rep", "composite", "spectrum", "dynamics"];

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn galilei(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galilei")).args(args).output().expect("binary runs")
}

fn verify(kind: &str, variant: &str, extra: &[&str]) -> Output {
    let path = fixture(&format!("{kind}_{variant}.json"));
    let mut args = vec!["verify", kind, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    galilei(&args)
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn without_wall_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

#[test]
fn passing_fixtures_exit_zero() {
    for kind in KINDS {
        let out = verify(kind, "pass", &[]);
        assert_eq!(out.status.code(), Some(0), "{kind}: {}", String::from_utf8_lossy(&out.stderr));
        let r = report(&out);
        assert_eq!(r["status"], "pass", "{kind}");
        assert!(r["check_count"].as_u64().unwrap() > 0);
    }
}

#[test]
fn failing_fixtures_exit_one_and_name_the_check() {
    let expected = [
        ("algebra", "jacobi[hr3_k1p1_flipped]"),
        ("uea", "centrality[H_alone]"),
        ("rep", "homomorphism[h3]"),
        ("composite", "homomorphism[hr3]"),
        ("spectrum", "shell_structure"),
        ("dynamics", "flow_departure"),
    ];
    for (kind, check) in expected {
        let out = verify(kind, "fail", &[]);
        assert_eq!(out.status.code(), Some(1), "{kind}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(check), "{kind}: {stderr}");
        let r = report(&out);
        assert_eq!(r["status"], "fail");
        let failing: Vec<&str> = r["checks"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|c| c["status"] == "fail")
            .map(|c| c["name"].as_str().unwrap())
            .collect();
        assert!(failing.contains(&check), "{kind}: {failing:?}");
    }
}

#[test]
fn malformed_fixtures_exit_two_without_a_report() {
    let expected_paths = [
        ("algebra", "line 2"),
        ("uea", "payload.algebra"),
        ("rep", "payload.rep"),
        ("composite", "payload"),
        ("spectrum", "payload.s_a"),
        ("dynamics", "payload.potential.kind"),
    ];
    for (kind, path) in expected_paths {
        let out = verify(kind, "malformed", &[]);
        assert_eq!(out.status.code(), Some(2), "{kind}");
        assert!(out.stdout.is_empty(), "{kind} printed a partial report");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(path), "{kind}: {stderr}");
    }
}

#[test]
fn kind_mismatch_and_missing_file_are_usage_errors() {
    let out = galilei(&["verify", "uea", fixture("algebra_pass.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = galilei(&["verify", "algebra", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = galilei(&["verify", "tensor", fixture("algebra_pass.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_two() {
    assert_eq!(galilei(&["suite", "paper-extra"]).status.code(), Some(2));
}

#[test]
fn naive_position_is_flagged_non_physical() {
    let r = report(&verify("composite", "pass", &[]));
    let checks = r["checks"].as_array().unwrap();
    let find = |n: &str| checks.iter().find(|c| c["name"] == n).unwrap_or_else(|| panic!("{n} missing"));
    let naive = find("ccr(X_naive, P)");
    assert_eq!(naive["non_physical"], true);
    assert!((naive["metrics"]["coefficient_over_hbar"].as_f64().unwrap() - 2.0).abs() <= 1e-12);
    let com = find("ccr(X_com, P)");
    assert_eq!(com["status"], "pass");
    assert!(com.get("non_physical").is_none());
    assert!((com["metrics"]["coefficient_over_hbar"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn reports_are_deterministic_apart_from_wall_time() {
    for kind in ["algebra", "composite", "dynamics"] {
        let a = report(&verify(kind, "pass", &[]));
        let b = report(&verify(kind, "pass", &[]));
        assert_eq!(without_wall_time(a), without_wall_time(b), "{kind}");
    }
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = verify("algebra", "pass", &["--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["target"], "algebra");
}

#[test]
fn cli_tolerance_overrides_scenario_values() {
    // the harmonic flow keeps fidelity near 0.8, so a 0.5 departure threshold fails
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("harmonic.json");
    let scenario = serde_json::json!({
        "kind": "dynamics",
        "tolerances": {"departure": 0.99},
        "payload": {
            "system": {"single": {"mass": 1.0, "dims": 1, "levels": 32, "omega_ref": 0.7}},
            "potential": {"kind": "polynomial_x", "coefficients": [0.0, 0.0, 0.5], "calV": 5.0},
            "psi0": {"preset": "coherent", "alpha": [0.3]},
            "t_grid": {"t_max": 2.0, "steps": 20},
            "expect_departure": true,
        }
    });
    std::fs::write(&path, scenario.to_string()).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(galilei(&["verify", "dynamics", p]).status.code(), Some(0));
    let out = galilei(&["verify", "dynamics", p, "--tol", "departure=0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("flow_departure"));
    assert_eq!(galilei(&["verify", "dynamics", p, "--tol", "nonsense=1"]).status.code(), Some(2));
    assert_eq!(galilei(&["verify", "dynamics", p, "--tol", "departure"]).status.code(), Some(2));
}

#[test]
fn thread_variable_is_validated() {
    let path = fixture("algebra_pass.json");
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_galilei"))
            .args(["verify", "algebra", path.to_str().unwrap()])
            .env("GALILEI_THREADS", v)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run("1"), Some(0));
    assert_eq!(run("0"), Some(2));
    assert_eq!(run("many"), Some(2));
}

#[test]
fn paper_core_suite_passes_with_registered_anchors() {
    let r = run_suite(Suite::PaperCore, &Default::default()).unwrap();
    assert!(r.passed(), "{:?}", r.failing().map(|c| &c.name).collect::<Vec<_>>());
    assert!(r.check_count >= 12, "{}", r.check_count);
    let v: Value = serde_json::from_str(&r.to_json()).unwrap();
    let registry: Vec<&str> = Anchor::ALL.iter().map(|a| a.as_str()).collect();
    for c in v["checks"].as_array().unwrap() {
        assert!(registry.contains(&c["anchor"].as_str().unwrap()), "{}", c["name"]);
    }
}

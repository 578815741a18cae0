//! The `bitime` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn bitime(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bitime"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn default_verify_reports_every_condition() {
    let out = bitime(&["verify", "--json"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let labels: Vec<&str> = checks.iter().map(|c| c["condition"].as_str().unwrap()).collect();
    for label in ["(7)", "(8)", "(6)", "(10)", "(26)", "(27)", "(28)"] {
        assert!(labels.contains(&label), "{label} missing from {labels:?}");
    }
    // forward and costate-system residuals exceed 10 h² at h = 1/64
    let failing: Vec<&str> = checks
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["condition"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["(8)", "(28)"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn looser_tolerance_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{ "tolerance_c": 200 }"#).unwrap();
    let out = bitime(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("all checks passed"));
}

#[test]
fn perturbed_costate_names_boundary_condition() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.json");
    std::fs::write(&cfg, r#"{ "perturb": { "q1": 0.1 }, "tolerance_c": 200 }"#).unwrap();
    let out = bitime(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("(27)"), "{}", stderr(&out));
}

#[test]
fn coarse_grid_is_a_usage_error() {
    let out = bitime(&["verify", "--h", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("grid too coarse"));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"h\": ").unwrap();
    for args in [
        vec!["verify", "--config", bad.to_str().unwrap()],
        vec!["verify", "--config", "/nonexistent/config.json"],
        vec!["verify", "--family", "cubic"],
        vec!["verify", "--h", "abc"],
        vec!["nonsense"],
        vec!["residuals"],
    ] {
        let out = bitime(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).contains("panicked"));
    }
}

#[test]
fn identity_system_has_zero_residuals() {
    let out = bitime(&["residuals", &data("identity.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for f in r["forward"].as_array().unwrap() {
        assert_eq!(f["max_norm"], 0.0);
        assert_eq!(f["condition"], "(4)");
    }
    for c in r["cic"].as_array().unwrap() {
        assert_eq!(c["max_norm"], 0.0);
    }
}

#[test]
fn unclosed_call_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("s.json");
    let text = std::fs::read_to_string(data("identity.json")).unwrap();
    std::fs::write(&sys, text.replace(r#"["0", "1"]]]"#, r#"["0", "sin("]]]"#)).unwrap();
    let out = bitime(&["residuals", sys.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3, column"), "{}", stderr(&out));
}

#[test]
fn convergence_needs_two_halving_spacings() {
    assert_eq!(bitime(&["convergence", "--h", "1/64"]).status.code(), Some(2));
    assert_eq!(
        bitime(&["convergence", "--h", "1/32,1/48"]).status.code(),
        Some(2)
    );
    let out = bitime(&["convergence", "--h", "1/32,1/64,1/128"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("exact (≤1e−12)"));
}

#[test]
fn constant_family_equilibrium_converges() {
    let out = bitime(&["convergence", "--family", "constant", "--json"]);
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let eq = rows
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["condition"] == "(7) equilibrium")
        .unwrap();
    assert_eq!(eq["status"], "second_order");
    // integrability is still pre-asymptotic at h = 1/32, so the study fails overall
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fields_are_deterministic_and_zone_filtered() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = bitime(&["fields", "--out", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    for name in bitime::cli::FIELD_FILES {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap()
        );
    }
    let stress = std::fs::read_to_string(a.join("stress.csv")).unwrap();
    assert_eq!(stress.lines().next(), Some("x,y,sxx,syy,sxy,rho,K,cphi,sphi"));

    let c = dir.path().join("c");
    let out = bitime(&["fields", "--family", "inv_x", "--out", c.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stress = std::fs::read_to_string(c.join("stress.csv")).unwrap();
    for line in stress.lines().skip(1) {
        let x: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(x.abs() >= 0.1 - 1e-12, "{line}");
    }
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "").unwrap();
    let target = file.join("sub");
    let out = bitime(&["fields", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_cap_is_validated() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_bitime"))
            .args(["verify", "--h", "1/16"])
            .env("BITIME_THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(run("zero").status.code(), Some(2));
    assert_ne!(run("2").status.code(), Some(2));
}

//! End-to-end tests of the `cylrad` binary: exit codes, CSV schemas, and the
//! selfcheck report.

use std::process::{Command, Output};

fn cylrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cylrad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn invalid_radius_is_a_config_error() {
    let out = cylrad(&["total", "--material", "sic", "--radius", "0", "--temperature", "300"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).is_empty(), "no CSV rows on config error");
}

#[test]
fn missing_material_is_a_config_error() {
    let out = cylrad(&["total", "--radius", "1e-6", "--temperature", "300"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_material_is_a_config_error() {
    let out = cylrad(&["plate", "--material", "unobtainium", "--temperature", "300"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn material_and_data_file_are_mutually_exclusive() {
    let out = cylrad(&[
        "plate",
        "--material",
        "sic",
        "--data-file",
        "somefile.txt",
        "--temperature",
        "300",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn window_violation_without_extrapolation_is_exit_4() {
    let out = cylrad(&[
        "total",
        "--material",
        "graphite-uniaxial",
        "--radius",
        "1e-6",
        "--temperature",
        "300",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn spectrum_schema_and_row_count() {
    let out = cylrad(&[
        "spectrum",
        "--material",
        "sic",
        "--radius",
        "2e-8",
        "--temperature",
        "300",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "omega_ev,lambda_um,h_n,h_m,h_total,i_omega"
    );
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 100, "expected a dense spectral grid");
    for row in rows {
        assert_eq!(row.split(',').count(), 6);
    }
}

#[test]
fn sweep_schema_and_row_count() {
    let out = cylrad(&[
        "sweep-radius",
        "--material",
        "sic",
        "--radius-sweep",
        "1e-8:3e-8:3",
        "--temperature",
        "300",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "radius_m,h_n_per_len,h_m_per_len,h_total_per_len,normalized,i_total"
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn malformed_sweep_triples_are_config_errors() {
    for bad in ["1e-8:3e-8:1", "3e-8:1e-8:5", "1e-8:3e-8", "0:1e-8:4"] {
        let out = cylrad(&[
            "sweep-radius",
            "--material",
            "sic",
            "--radius-sweep",
            bad,
            "--temperature",
            "300",
        ]);
        assert_eq!(out.status.code(), Some(2), "sweep triple {bad:?}");
    }
}

#[test]
fn plate_schema() {
    let out = cylrad(&["plate", "--material", "sic", "--temperature", "300"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s_m,s_n,s_total,i_plate");
    assert_eq!(lines.count(), 1);
}

#[test]
fn config_file_is_honored_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "material = \"sic\"\nradius = 2e-8\ntemperature = 300.0\n",
    )
    .unwrap();
    let base = cylrad(&["total", "--config", cfg.to_str().unwrap()]);
    assert_eq!(base.status.code(), Some(0));
    // A flag overriding the file's radius changes the output.
    let overridden = cylrad(&[
        "total",
        "--config",
        cfg.to_str().unwrap(),
        "--radius",
        "4e-8",
    ]);
    assert_eq!(overridden.status.code(), Some(0));
    assert_ne!(stdout(&base), stdout(&overridden));
}

#[test]
fn selfcheck_passes_and_is_deterministic() {
    let a = cylrad(&["selfcheck"]);
    assert_eq!(a.status.code(), Some(0));
    let report = stdout(&a);
    assert!(report.lines().filter(|l| l.starts_with("PASS")).count() >= 5);
    assert!(!report.contains("FAIL"));
    let b = cylrad(&["selfcheck"]);
    assert_eq!(stdout(&b), report, "selfcheck report must be byte-identical");
}

#[test]
fn selfcheck_fault_injection_fails_loudly() {
    let out = cylrad(&["selfcheck", "--epsilon-offset", "0.01"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("FAIL oracle-equivalence"));
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nhqdyn_cli::run::sds_spec;
use nhqdyn_cli::{parse_spec, ExperimentSpec};
use serde_json::Value;

fn nhqdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhqdyn"))
        .args(args)
        .env_remove("NHQDYN_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn write_spec(dir: &Path, json: &str) -> PathBuf {
    let path = dir.join("exp.json");
    fs::write(&path, json).unwrap();
    path
}

fn error_json(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(stderr.trim()).unwrap_or_else(|_| panic!("stderr not JSON: {stderr}"))
}

const SPEC: &str = r#"{
  "model": {"matrix": [[[0, 0], [-0.3, 0]], [[-1.7, 0], [0.4, 0]]]},
  "scenarios": [
    {"name": "a", "initial": "phi0 + 0.5 phi1", "final": "psi1", "grid": {"start": 0, "stop": 6, "steps": 120}},
    {"name": "b", "initial": [[1, 0], [0, 1]], "final": "e0", "generator": "h0", "grid": [0, 0.5, 1.5, 2]}
  ]
}"#;

#[test]
fn sds_golden_traces_follow_closed_forms() {
    let k: f64 = 0.5;
    let rho = -(1.0 - k * k).sqrt();
    let k2 = k * k;
    let cases: [(&str, fn(f64, f64, f64) -> [f64; 3]); 3] = [
        ("vacuum_to_psi1", |k2, _, _| [0.0, k2 / (k2 + 1.0), k2 / (k2 + 1.0)]),
        ("vacuum_to_phi1", |k2, _, _| [k2, 0.0, 4.0 * k2 / ((k2 + 1.0) * (k2 + 1.0))]),
        ("superposition_to_psi0", |k2, rho, t| {
            let k = k2.sqrt();
            let c = (2.0 * rho * t).cos();
            [
                (1.0 - k2) / (2.0 * (1.0 - k * c)),
                (1.0 + k2 + 2.0 * k * c) / (2.0 * (1.0 + k2)),
                0.5,
            ]
        }),
    ];
    for (name, oracle) in cases {
        let (header, rows) = read_csv(&golden_dir().join(format!("transit_{name}.csv")));
        assert_eq!(header, ["t", "P_standard", "P_psi", "P_phi"]);
        assert_eq!(rows.len(), 401);
        for row in rows {
            let expected = oracle(k2, rho, row[0]);
            for (got, want) in row[1..].iter().zip(expected) {
                assert!((got - want).abs() < 1e-9, "{name} t={} {got} vs {want}", row[0]);
            }
        }
    }
}

#[test]
fn sds_command_regenerates_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = nhqdyn(&["sds", "--g", "1", "--k", "0.5", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["vacuum_to_psi1", "vacuum_to_phi1", "superposition_to_psi0"] {
        let file = format!("transit_{name}.csv");
        assert_eq!(
            fs::read(dir.path().join(&file)).unwrap(),
            fs::read(golden_dir().join(&file)).unwrap(),
            "{file}"
        );
    }
    let written = fs::read_to_string(dir.path().join("spec.json")).unwrap();
    assert_eq!(parse_spec(&written).unwrap(), sds_spec(1.0, 0.5));
}

#[test]
fn sds_verify_passes_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = nhqdyn(&["sds", "--g", "1", "--k", "0.5", "--verify", "--out-dir", d]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let audit: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("audit.json")).unwrap()).unwrap();
    assert_eq!(audit["all_pass"], true);
    assert!(audit["algebra_checks"].as_array().unwrap().len() >= 15);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let work = tempfile::tempdir().unwrap();
    let spec = write_spec(work.path(), SPEC);
    let mut snapshots = Vec::new();
    for run in 0..2 {
        let dir = work.path().join(format!("run{run}"));
        for cmd in ["discriminate", "build", "evolve", "thermal"] {
            let out = nhqdyn(&[
                cmd,
                "--input",
                spec.to_str().unwrap(),
                "--out-dir",
                dir.to_str().unwrap(),
                "--seed",
                "9",
            ]);
            assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        }
        let mut files: Vec<_> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        snapshots.push(
            files
                .iter()
                .map(|f| (f.file_name().unwrap().to_owned(), fs::read(f).unwrap()))
                .collect::<Vec<_>>(),
        );
    }
    assert_eq!(snapshots[0].len(), 8);
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn transit_writes_one_trace_per_scenario() {
    let work = tempfile::tempdir().unwrap();
    let spec = write_spec(work.path(), SPEC);
    let out = nhqdyn(&[
        "transit",
        "--input",
        spec.to_str().unwrap(),
        "--out-dir",
        work.path().to_str().unwrap(),
        "--grid",
        "0:2:10",
        "--laws",
        "psi,standard",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["a", "b"] {
        let (header, rows) = read_csv(&work.path().join(format!("transit_{name}.csv")));
        assert_eq!(header, ["t", "P_psi", "P_standard"]);
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[10][0], 2.0);
        assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    }
}

#[test]
fn evolve_reports_conserved_norm() {
    let work = tempfile::tempdir().unwrap();
    let spec = write_spec(work.path(), SPEC);
    let out = nhqdyn(&["evolve", "--input", spec.to_str().unwrap(), "--out-dir", work.path().to_str().unwrap()]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&work.path().join("evolve_a.csv"));
    assert_eq!(header, ["t", "norm_standard", "norm_phi", "norm_psi"]);
    // H conserves the Ψ-norm but not the standard one.
    let psi: Vec<f64> = rows.iter().map(|r| r[3]).collect();
    let std: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let spread = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread(&psi) < 1e-10 * psi[0]);
    assert!(spread(&std) > 1e-3);
}

#[test]
fn thermal_kms_table_within_tolerance() {
    let work = tempfile::tempdir().unwrap();
    let spec = write_spec(work.path(), SPEC);
    let out = nhqdyn(&[
        "thermal",
        "--input",
        spec.to_str().unwrap(),
        "--beta",
        "1",
        "--out-dir",
        work.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&fs::read_to_string(work.path().join("thermal.json")).unwrap()).unwrap();
    assert_eq!(report["all_matched_pass"], true);
    let matched: Vec<&Value> = report["kms"].as_array().unwrap().iter().filter(|e| !e["pass"].is_null()).collect();
    assert_eq!(matched.len(), 6);
    assert!(matched.iter().all(|e| e["residual"].as_f64().unwrap() <= 1e-8));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("picture=partner"));
}

#[test]
fn complex_spectrum_report_carries_warning() {
    let work = tempfile::tempdir().unwrap();
    // eigenvalues 1 ± 0.2i
    let spec = write_spec(
        work.path(),
        r#"{"model": {"matrix": [[[1, 0], [0.4, 0]], [[-0.1, 0], [1, 0]]]},
            "scenarios": [{"initial": "phi0", "final": "psi1", "grid": {"start": 0, "stop": 5, "steps": 50}}]}"#,
    );
    let out = nhqdyn(&["discriminate", "--input", spec.to_str().unwrap(), "--out-dir", work.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(work.path().join("report.json")).unwrap()).unwrap();
    let warnings = report["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().starts_with("nonconservative")));
    assert!(work.path().join("transit_scenario0.csv").exists());
}

#[test]
fn pf_model_builds_and_verifies() {
    let work = tempfile::tempdir().unwrap();
    // similarity transform of the canonical pair
    let spec = write_spec(
        work.path(),
        r#"{"model": {"pf": {"a": [[[0.5, 0], [0.25, 0]], [[-1, 0], [-0.5, 0]]],
                             "b": [[[0.5, 0], [-0.25, 0]], [[1, 0], [-0.5, 0]]],
                             "omega": 2.0, "shift": -0.5}}}"#,
    );
    let out = nhqdyn(&["verify", "--input", spec.to_str().unwrap(), "--out-dir", work.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let system: Value = serde_json::from_str(&fs::read_to_string(work.path().join("system.json")).unwrap()).unwrap();
    let e: Vec<f64> = system["eigenvalues"].as_array().unwrap().iter().map(|z| z[0].as_f64().unwrap()).collect();
    assert!((e[0] + 0.5).abs() < 1e-12 && (e[1] - 1.5).abs() < 1e-12, "{e:?}");
}

#[test]
fn validation_and_usage_errors_exit_2() {
    let work = tempfile::tempdir().unwrap();
    let bad_k = write_spec(work.path(), r#"{"model": {"sds": {"g": 1.0, "k": 1.2}}}"#);
    let out = nhqdyn(&["build", "--input", bad_k.to_str().unwrap(), "--out-dir", work.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = error_json(&out);
    assert_eq!(err["error"]["kind"], "ValidationError");
    assert_eq!(err["error"]["cause"], "ParameterOutOfRange");

    let garbled = write_spec(work.path(), r#"{"model": {"sds": {"g": "one", "k": 0.2}}}"#);
    let out = nhqdyn(&["build", "--input", garbled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["path"], "model.sds.g");

    assert_eq!(nhqdyn(&["build"]).status.code(), Some(2));
    assert_eq!(nhqdyn(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(nhqdyn(&["sds", "--k", "0.5", "--tol", "nonsense=1"]).status.code(), Some(2));
    assert_eq!(nhqdyn(&["sds", "--k", "0.5", "--laws", "psy"]).status.code(), Some(2));
}

#[test]
fn computation_errors_exit_1() {
    let work = tempfile::tempdir().unwrap();
    let degenerate = write_spec(work.path(), r#"{"model": {"matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}}"#);
    let out = nhqdyn(&["build", "--input", degenerate.to_str().unwrap(), "--out-dir", work.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"]["kind"], "DegenerateSpectrum");

    let spec = write_spec(work.path(), SPEC);
    let out = Command::new(env!("CARGO_BIN_EXE_nhqdyn"))
        .args(["build", "--input", spec.to_str().unwrap(), "--out-dir", work.path().to_str().unwrap()])
        .env("NHQDYN_MAX_DIM", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"]["kind"], "DimensionTooLarge");
}

#[test]
fn spec_round_trips_through_json() {
    let spec: ExperimentSpec = parse_spec(SPEC).unwrap();
    let again = parse_spec(&spec.to_json()).unwrap();
    assert_eq!(spec, again);
    assert_eq!(again.to_json(), spec.to_json());
}

use std::path::Path;
use std::process::{Command, Output};

fn qes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qes")).args(args).output().expect("spawn qes")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV table, header and column lines stripped.
fn rows(csv: &str) -> Vec<Vec<String>> {
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# "));
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn col(csv: &str, name: &str) -> Vec<f64> {
    let columns: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let idx = columns.iter().position(|c| *c == name).unwrap();
    rows(csv).iter().map(|r| r[idx].parse().unwrap()).collect()
}

#[test]
fn worked_spectrum() {
    let out = qes(&["spectrum"]);
    assert!(out.status.success());
    let csv = stdout(&out);
    let e = col(&csv, "energy");
    assert_eq!(e.len(), 2);
    assert!((e[0] - (2.0 - 1.5f64.sqrt())).abs() < 1e-10);
    assert!((e[1] - (2.0 + 1.5f64.sqrt())).abs() < 1e-10);
    assert_eq!(col(&csv, "omega_nl"), vec![0.5, 0.5]);
    assert_eq!(col(&csv, "nodes"), vec![0.0, 1.0]);
}

#[test]
fn negative_l_spectrum() {
    let csv = stdout(&qes(&["spectrum", "--l", "-1"]));
    let e = col(&csv, "energy");
    assert!((e[0] - (2.0 - 2f64.sqrt())).abs() < 1e-10);
    assert!((e[1] - (2.0 + 2f64.sqrt())).abs() < 1e-10);
}

#[test]
fn axial_momentum_shifts_energy() {
    let csv = stdout(&qes(&["spectrum", "--k", "0,2"]));
    let e = col(&csv, "energy");
    assert_eq!(e.len(), 4);
    assert!((e[2] - e[0] - 2.0).abs() < 1e-10);
}

#[test]
fn zero_rotation_refused() {
    let out = qes(&["spectrum", "--omega-rot", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no bound states"));
}

#[test]
fn invalid_inputs_exit_nonzero() {
    for args in [
        &["bfield", "--n", "0"][..],
        &["spectrum", "--m", "-1"],
        &["spectrum", "--m", "1", "--mbar", "1"],
        &["bfield", "--l", ""],
        &["spectrum", "--format", "xml"],
    ] {
        let out = qes(args);
        assert!(!out.status.success(), "{args:?} should fail");
    }
}

#[test]
fn bfield_levels() {
    let csv = stdout(&qes(&["bfield", "--l", "-2,-1,0,1,2", "--alpha", "2", "--mu", "3"]));
    let b = col(&csv, "B0_nl");
    let w = col(&csv, "omega_nl");
    for (bi, wi) in b.iter().zip(&w) {
        assert!((bi - wi / 6.0).abs() < 1e-11 * bi);
    }
    assert_eq!(b[0], b[1]);
    assert_eq!(b[1], b[2]);
    assert!(b[3] < b[2] && b[4] < b[3]);
    for (l, wl) in [(1.0f64, w[3]), (2.0, w[4])] {
        assert!((wl - (1.0 / (2.0 * (2.0 * l + 4.0))).cbrt()).abs() < 1e-11);
    }
}

#[test]
fn empty_sweep_in_config_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "l =\n").unwrap();
    let out = qes(&["bfield", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

fn sign_changes(values: &[f64]) -> usize {
    let peak = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut last = 0.0;
    let mut count = 0;
    for &v in values {
        if v.abs() <= 1e-9 * peak {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            count += 1;
        }
        last = v.signum();
    }
    count
}

#[test]
fn wavefunction_shape() {
    for (root, nodes) in [("0", 0), ("1", 1)] {
        let csv = stdout(&qes(&["wavefunction", "--root", root, "--samples", "801"]));
        let r = col(&csv, "R");
        assert_eq!(r.len(), 801);
        assert_eq!(r[0], 1.0);
        assert_eq!(sign_changes(&r), nodes);
        assert!(r.last().unwrap().abs() < 1e-6);
    }
}

#[test]
fn wavefunction_unknown_root_lists_levels() {
    let out = qes(&["wavefunction", "--root", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("available"));
}

#[test]
fn json_output() {
    let out = qes(&["spectrum", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["branch"], "-");
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["n", "l", "k", "omega_nl", "B0_nl", "beta", "branch", "nodes", "energy"]);
}

#[test]
fn validate_consistent_passes() {
    let out = qes(&["validate", "--convention", "consistent"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(rows(&stdout(&out)).iter().all(|r| r[2] == "true"));
}

#[test]
fn validate_flags_coarse_grid() {
    let out = qes(&["validate", "--convention", "consistent", "--checks", "5", "--npts", "200", "--no-refine"]);
    assert_eq!(out.status.code(), Some(1));
    let table = rows(&stdout(&out));
    assert_eq!(table.len(), 1);
    assert_eq!(table[0][2], "false");
}

#[test]
fn validate_analytic_subset() {
    let out = qes(&["validate", "--checks", "1,2,3,4,6,8"]);
    assert!(out.status.success());
    assert_eq!(rows(&stdout(&out)).len(), 6);
}

#[test]
fn config_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.cfg");
    let second = dir.path().join("b.cfg");
    let out = qes(&[
        "bfield",
        "--mbar",
        "0.5",
        "--b0",
        "0.25",
        "--l",
        "-1,2",
        "--k",
        "0,1.5",
        "--format",
        "json",
        "--save-config",
        first.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = qes(&["bfield", "--config", first.to_str().unwrap(), "--save-config", second.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn config_file_drives_run_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# worked example\nm = 1\nomega_rot = 1\nl = -1\n").unwrap();
    let from_file = stdout(&qes(&["spectrum", "--config", cfg.to_str().unwrap()]));
    assert!((col(&from_file, "energy")[0] - (2.0 - 2f64.sqrt())).abs() < 1e-10);
    let overridden = stdout(&qes(&["spectrum", "--config", cfg.to_str().unwrap(), "--l", "0"]));
    assert!((col(&overridden, "energy")[0] - (2.0 - 1.5f64.sqrt())).abs() < 1e-10);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let out = qes(&["spectrum", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&qes(&["spectrum"])));
}

#[test]
fn deterministic_output() {
    let args = ["validate", "--checks", "5,7", "--format", "json"];
    let strip = |s: String| -> String { s.lines().filter(|l| !l.contains("wall_time_s")).collect() };
    assert_eq!(strip(stdout(&qes(&args))), strip(stdout(&qes(&args))));
}

#[test]
fn golden_spectrum() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/spectrum.csv");
    let out = stdout(&qes(&["spectrum", "--n", "1,2", "--l", "-1,0,1", "--k", "0,0.5"]));
    assert_eq!(out, std::fs::read_to_string(golden).unwrap());
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qrg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrg")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = qrg(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn flow_reports_each_step() {
    let text = stdout(&["flow", "--dim", "1", "--gamma0", "-0.26", "--steps", "2"]);
    assert_eq!(text.lines().next(), Some("dim,step,gamma,j"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][2], "-0.26");
    assert!((num(&rows[1][2]) + 0.663099).abs() <= 1e-4);
    assert!((num(&rows[2][2]) + 0.983511).abs() <= 1e-4);

    let square = csv_rows(&stdout(&["flow", "--dim", "2", "--gamma0", "0.04", "--steps", "2"]));
    assert!((num(&square[1][2]) - 0.41218).abs() <= 1e-4);
    assert!((num(&square[2][2]) - 0.999333).abs() <= 1e-4);
}

#[test]
fn concurrence_curve_hits_known_values() {
    for (dim, at_zero) in [("1", 0.5), ("2", 0.25)] {
        let rows = csv_rows(&stdout(&["concurrence", "--dim", dim, "--steps", "0", "--grid", "21"]));
        assert_eq!(rows.len(), 21);
        assert!((num(&rows[10][3]) - at_zero).abs() <= 1e-3, "{dim}: {:?}", rows[10]);
        assert!(num(&rows[0][3]).abs() <= 1e-9 && num(&rows[20][3]).abs() <= 1e-9);
    }
    let two_steps = csv_rows(&stdout(&["concurrence", "--dim", "3", "--steps", "1,2", "--grid", "11"]));
    assert_eq!(two_steps.len(), 22);
    assert!(two_steps.iter().all(|r| num(&r[4]) >= 0.0));
}

#[test]
fn groundstate_amplitudes_are_uniform_at_ising_point() {
    for (dim, amp) in [("1", 0.5), ("2", 0.25), ("3", 0.125)] {
        let text = stdout(&["groundstate", "--dim", dim, "--gamma", "1"]);
        assert_eq!(text.lines().next(), Some("basis_index,basis_label,phi1,phi2"));
        for row in csv_rows(&text) {
            for x in [num(&row[2]), num(&row[3])] {
                assert!(x.abs() <= 1e-9 || (x.abs() - amp).abs() <= 1e-9, "{dim}: {row:?}");
            }
        }
    }
}

#[test]
fn fixed_points_and_curve_file() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let text = stdout(&["fixed-points", "--dim", "3", "--grid", "101", "--curve-out", curve.to_str().unwrap()]);
    let roots: Value = serde_json::from_str(&text).unwrap();
    let roots = roots.as_array().unwrap();
    let summary: Vec<(f64, &str)> = roots
        .iter()
        .map(|r| (r["gamma"].as_f64().unwrap(), r["stability"].as_str().unwrap()))
        .collect();
    assert_eq!(summary, vec![(-1.0, "stable"), (0.0, "unstable"), (1.0, "stable")]);
    let curve_text = std::fs::read_to_string(&curve).unwrap();
    assert_eq!(curve_text.lines().next(), Some("gamma,gamma_prime"));
    assert_eq!(curve_text.lines().count(), 102);
}

#[test]
fn jsweep_is_coupling_independent() {
    let text = stdout(&["jsweep", "--dim", "3"]);
    let spread_line = text.lines().last().unwrap();
    let spread = num(spread_line.strip_prefix("# max_j_spread=").unwrap());
    assert!(spread <= 1e-10);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 21 * 5);
    let at_zero: Vec<f64> = rows.iter().filter(|r| num(&r[0]) == 0.0).map(|r| num(&r[2])).collect();
    assert_eq!(at_zero.len(), 5);
    assert!(at_zero.iter().all(|c| (c - 0.167).abs() <= 2e-3));

    let json: Value = serde_json::from_str(&stdout(&["jsweep", "--dim", "1", "--gamma-points", "5", "--format", "json"])).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 25);
    assert!(json["max_j_spread"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn scaling_exponents_for_square_and_cube() {
    let mut thetas = Vec::new();
    for (dim, steps) in [("2", "1,2,3"), ("3", "1,2")] {
        let json: Value = serde_json::from_str(&stdout(&["scaling", "--dim", dim, "--steps", steps, "--grid", "401"])).unwrap();
        assert!(json["derivative_fit"]["r2"].as_f64().unwrap() >= 0.98);
        assert!(json["conventions"]["gamma_c"].as_f64() == Some(0.0));
        thetas.push(json["exponent_fit"]["theta"].as_f64().unwrap());
    }
    assert!(thetas[0] < thetas[1], "{thetas:?}");
}

#[test]
fn chain_scaling_reports_underflow() {
    // The chain's |dC/dγ| peak sits on the critical point itself.
    let out = qrg(&["scaling", "--dim", "1", "--steps", "1,2", "--grid", "201"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.starts_with("qrg-error:") && err.contains("step 1"), "{err}");
    assert_eq!(err.lines().count(), 1);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["exponent_fit"].is_null());
    assert!(json["points"][0]["at_critical_edge"].as_bool().unwrap());
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        vec!["flow", "--dim", "4", "--gamma0", "0.1"],
        vec!["flow", "--dim", "1", "--gamma0", "1.5"],
        vec!["concurrence", "--dim", "2", "--grid", "100"],
        vec!["flow", "--gamma0", "0.1"],
        vec!["flow", "--dim", "1", "--j", "-1"],
        vec!["flow", "--dim", "1", "--threads", "0"],
        vec!["nonsense"],
    ] {
        let out = qrg(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = stderr(&out);
        assert!(err.starts_with("qrg-error: ") && err.lines().count() == 1, "{args:?}: {err}");
    }
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("qrg.toml");
    write(&cfg, "dim = 2\nj = 3.0\n\n[flow]\ngamma0 = 0.04\nsteps = 1\n");
    let cfg = cfg.to_str().unwrap();

    let from_file = csv_rows(&stdout(&["--config", cfg, "flow"]));
    assert_eq!(from_file.len(), 2);
    assert_eq!(from_file[0], vec!["2", "0", "0.04", "3"]);

    let overridden = csv_rows(&stdout(&["--config", cfg, "flow", "--dim", "1", "--steps", "2"]));
    assert_eq!(overridden.len(), 3);
    assert_eq!(overridden[0][0], "1");
    assert_eq!(overridden[0][3], "3");

    let bad = dir.path().join("bad.toml");
    write(&bad, "dim = 2\ncolour = \"red\"\n");
    assert_eq!(qrg(&["--config", bad.to_str().unwrap(), "flow"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flow.csv");
    let printed = stdout(&["flow", "--dim", "3", "--gamma0", "-0.01"]);
    let to_file = stdout(&["flow", "--dim", "3", "--gamma0", "-0.01", "--out", path.to_str().unwrap()]);
    assert!(to_file.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn thread_count_does_not_change_output() {
    for args in [
        vec!["concurrence", "--dim", "2", "--steps", "0,1", "--grid", "101"],
        vec!["jsweep", "--dim", "2", "--gamma-points", "9", "--step", "1"],
        vec!["fixed-points", "--dim", "1", "--grid", "101"],
    ] {
        let one = stdout(&[args.as_slice(), &["--threads", "1"]].concat());
        let eight = stdout(&[args.as_slice(), &["--threads", "8"]].concat());
        assert_eq!(one, eight, "{args:?}");
    }
}

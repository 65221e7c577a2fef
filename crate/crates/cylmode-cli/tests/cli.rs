//! End-to-end command-line tests: exit code semantics, config-file runs,
//! tabulated potentials, and output schemas.

use std::path::PathBuf;
use std::process::Command;

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_cylmode")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cylmode-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn verify_passes_with_exit_zero() {
    let out = tmp_dir("pass");
    let status = Command::new(exe())
        .args(["verify", "--preset", "catenoid", "--field", "N1", "-T", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&status.stdout);
    assert!(stdout.contains("PASS three_circles"));
    let json = std::fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(json.contains("\"holds\": true"));
    assert!(!json.contains("\"holds\": false"));
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn violation_exits_with_two() {
    // A deliberately coarse grid blows the identity tolerances.
    let out = tmp_dir("coarse");
    let status = Command::new(exe())
        .args([
            "verify",
            "--preset",
            "catenoid",
            "--cauchy",
            "7:1:0;5:0.5:-0.5",
            "-T",
            "2",
            "--h",
            "0.25",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&status.stdout);
    assert!(stdout.contains("FAIL"));
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn usage_errors_exit_with_one() {
    let bad_flag = Command::new(exe())
        .args(["verify", "--no-such-flag"])
        .output()
        .unwrap();
    assert_eq!(bad_flag.status.code(), Some(1));

    let bad_preset = Command::new(exe())
        .args(["verify", "--preset", "nope"])
        .output()
        .unwrap();
    assert_eq!(bad_preset.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_preset.stderr).contains("unknown preset"));

    let bad_field = Command::new(exe())
        .args(["verify", "--preset", "catenoid", "--field", "N7"])
        .output()
        .unwrap();
    assert_eq!(bad_field.status.code(), Some(1));
}

#[test]
fn config_file_drives_a_run() {
    let out = tmp_dir("config");
    let cfg_path = out.join("run.cfg");
    std::fs::write(
        &cfg_path,
        "\
[grid]
t0 = 0
t1 = 2
h = 0.0078125

[basis]
kmax = 5

[potential]
preset = catenoid

[field]
kind = closed_form
label = N1

[run]
command = verify
",
    )
    .unwrap();
    let status = Command::new(exe())
        .args(["verify", "--config"])
        .arg(&cfg_path)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("summary.json").exists());
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn tabulated_potential_round_trips() {
    let out = tmp_dir("table");
    // Tabulate the catenoid profile on a fine grid and verify a mode
    // integration against the analytic preset.
    let mut csv = String::from("t,value\n");
    let n = 1024;
    for i in 0..=n {
        let t = -2.0 + 4.0 * i as f64 / n as f64;
        csv.push_str(&format!("{},{}\n", t, 2.0 / t.cosh().powi(2)));
    }
    let table = out.join("catenoid.csv");
    std::fs::write(&table, csv).unwrap();
    let status = Command::new(exe())
        .args(["poincare", "--preset", "tabulated", "--table"])
        .arg(&table)
        .args(["--lambda", "0", "--span", "0", "1", "--t0", "-2", "-T", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let csv = std::fs::read_to_string(out.join("poincare.csv")).unwrap();
    let first: f64 = csv.split(',').next().unwrap().parse().unwrap();
    // 1 - tanh(1) from the closed form.
    assert!((first - 0.238406).abs() < 1e-4, "got {first}");
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn profile_emits_energy_columns() {
    let out = tmp_dir("profile");
    let status = Command::new(exe())
        .args(["profile", "--preset", "catenoid", "--field", "N1", "-T", "2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("profile.csv")).unwrap();
    assert!(csv.starts_with("t,I,J,H_m,L_m,Hbar_m,Lbar_m,U\n"));
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn catenoid_scan_outputs_both_channels() {
    let out = tmp_dir("scan");
    let status = Command::new(exe())
        .args(["catenoid", "--scan", "-0.9", "-0.1", "--steps", "17", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for k in [0, 1] {
        let csv = std::fs::read_to_string(out.join(format!("scan_k{k}.csv"))).unwrap();
        assert!(csv.starts_with("lambda,growing_coefficient\n"));
        assert_eq!(csv.lines().count(), 18);
        // All growing coefficients nonzero.
        for line in csv.lines().skip(1) {
            let c: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!(c.abs() > 1e-2);
        }
    }
    let _ = std::fs::remove_dir_all(&out);
}

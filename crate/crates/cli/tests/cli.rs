use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ricci4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ricci4"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn last_csv_row(text: &str) -> Vec<f64> {
    text.lines()
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect()
}

#[test]
fn list_covers_all_twenty_classes() {
    let out = ricci4(&["list", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let classes: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["class"].as_str().unwrap())
        .collect();
    assert_eq!(classes.len(), 20);
    assert_eq!(classes[0], "A1");
    assert_eq!(classes[19], "B10");

    let out = ricci4(&["list", "--class", "A10"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("P9.iii (A10iii)"), "{text}");
}

#[test]
fn a4_flow_matches_cube_root_growth() {
    let out = ricci4(&[
        "flow", "--class", "A4", "--lambda", "1,1,1,1", "--t-end", "10",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let row = last_csv_row(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(row[0], 10.0);
    let a = 31f64.cbrt();
    assert!((row[1] / a - 1.0).abs() < 1e-8, "A(10) = {}", row[1]);
    assert!((row[2] * a - 1.0).abs() < 1e-8, "B(10) = {}", row[2]);
}

#[test]
fn a10iii_blowup_exits_two_with_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let out = ricci4(&[
        "flow",
        "--class",
        "A10",
        "--branch",
        "P9.iii",
        "--a",
        "0.2,0.5,0.9",
        "--lambda",
        "1,1,1,1",
        "--t-end",
        "5",
        "--format",
        "json",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("T_est"));
    let (traj, config) = ricci4::io::load_json(&path).unwrap();
    match traj.termination {
        ricci4::Termination::Blowup { t_est } => assert!((t_est - 1.0).abs() < 1e-3, "{t_est}"),
        other => panic!("unexpected termination {other:?}"),
    }
    assert_eq!(config["branch"], "P9.iii");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "class = A4\nlambda = 2,2,2,2\nt_end = 10\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = ricci4(&["flow", "--config", cfg]);
    let overridden = ricci4(&["flow", "--config", cfg, "--lambda", "1,1,1,1"]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(code(&overridden), 0);
    let direct = ricci4(&[
        "flow", "--class", "A4", "--lambda", "1,1,1,1", "--t-end", "10",
    ]);
    assert_eq!(overridden.stdout, direct.stdout);
    assert_ne!(from_file.stdout, direct.stdout);
}

#[test]
fn csv_and_json_files_agree() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let json = dir.path().join("run.json");
    let base = [
        "flow", "--class", "A7", "--branch", "A7i", "--lambda", "1,2,3,4", "--t-end", "50",
    ];
    for (p, f) in [(&csv, "csv"), (&json, "json")] {
        let mut args = base.to_vec();
        args.extend(["--format", f, "-o", p.to_str().unwrap()]);
        assert_eq!(code(&ricci4(&args)), 0);
    }
    assert!(ricci4::io::sidecar_path(&csv).exists());
    let a = ricci4::io::load_csv(&csv).unwrap();
    let (b, _) = ricci4::io::load_json(&json).unwrap();
    assert_eq!(a.samples.len(), b.samples.len());
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert_eq!(x.t, y.t);
        for i in 0..4 {
            assert!((x.metric[i] - y.metric[i]).abs() <= 1e-15 * y.metric[i].abs());
        }
    }
    assert_eq!(a.termination, b.termination);
}

#[test]
fn invalid_input_exits_sixty_four() {
    assert_eq!(
        code(&ricci4(&["flow", "--class", "A99", "--lambda", "1,1,1,1"])),
        64
    );
    assert_eq!(
        code(&ricci4(&["flow", "--class", "A4", "--lambda", "1,-1,1,1"])),
        64
    );
    assert_eq!(code(&ricci4(&["flow", "--class", "A4"])), 64);
    assert_eq!(
        code(&ricci4(&[
            "flow",
            "--config",
            Path::new("/nonexistent/run.cfg").to_str().unwrap()
        ])),
        64
    );
    assert_eq!(code(&ricci4(&["frobnicate"])), 64);
    assert_eq!(code(&ricci4(&["--help"])), 0);
}

#[test]
fn verify_reports_per_class() {
    let out = ricci4(&["verify", "A4", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["classes"][0]["class"], "A4");

    let out = ricci4(&["verify", "--class", "B9"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("B9 pass"));
}

#[test]
fn decay_fits_a6_exponents() {
    let out = ricci4(&[
        "decay", "--class", "A6", "--lambda", "1,2,3,4", "--format", "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    let expected = [1.0 / 3.0, 0.0, -1.0 / 3.0, 2.0 / 3.0];
    for (i, e) in expected.iter().enumerate() {
        let got = v["exponents"][i].as_f64().unwrap();
        assert!((got - e).abs() < 0.05, "component {i}: {got}");
    }
    assert!((v["curvature_exponent"].as_f64().unwrap() + 1.0).abs() < 0.05);
    assert_eq!(v["singularity"], "TypeIII");
}

#[test]
fn decay_rejects_finite_time_flow() {
    let out = ricci4(&[
        "decay",
        "--class",
        "A10",
        "--branch",
        "A10iii",
        "--a",
        "0.2,0.5,0.9",
        "--lambda",
        "1,1,1,1",
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("Type I"));
}

#[test]
fn compare_against_implicit_solution() {
    let out = ricci4(&[
        "compare", "--class", "A7", "--branch", "A7i", "--lambda", "1,2,3,4", "--t-end", "100",
        "--format", "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["reference"], "implicit");
    assert!(v["max_rel_err"].as_f64().unwrap() < 1e-8);

    let out = ricci4(&[
        "compare", "--class", "A10", "--branch", "A10i", "--lambda", "1,2,3,1",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn compare_inside_envelope() {
    let out = ricci4(&[
        "compare", "--class", "A5", "--lambda", "1,2,3,4", "--t-end", "100", "--format", "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["reference"], "envelope");
    for row in v["rows"].as_array().unwrap() {
        for inside in row["inside"].as_array().unwrap() {
            assert_ne!(inside, &Value::Bool(false), "{row}");
        }
    }
}

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dichospec"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&a)).unwrap()
}

const SMALL_ED: &[&str] = &["ed", "--H", "10", "--t0", "100", "--T", "1e5"];

#[test]
fn csv_headers_are_stable() {
    let first = |args: &[&str]| {
        let mut a = args.to_vec();
        a.extend(["--format", "csv"]);
        stdout(&a).lines().next().unwrap().to_string()
    };
    assert_eq!(first(&["lyap", "--T2", "1e3"]), "component,lower,upper");
    assert_eq!(
        first(&["bias", "--H", "1e2", "--T1", "1e4", "--T2", "1e5"]),
        "component,b_bar,decision"
    );
    assert_eq!(first(SMALL_ED), "component,lower,upper,divergent");
    assert_eq!(
        first(&["ned", "--H", "1e4"]),
        "component,lower,upper,divergent"
    );
}

#[test]
fn json_and_csv_are_byte_identical_across_runs_and_threads() {
    for format in ["json", "csv"] {
        let mut args = SMALL_ED.to_vec();
        args.extend(["--format", format]);
        let one = bin()
            .args(&args)
            .env("DICHOSPEC_THREADS", "1")
            .output()
            .unwrap();
        let three = bin()
            .args(&args)
            .env("DICHOSPEC_THREADS", "3")
            .output()
            .unwrap();
        let again = bin()
            .args(&args)
            .env("DICHOSPEC_THREADS", "1")
            .output()
            .unwrap();
        assert!(one.status.success());
        assert_eq!(one.stdout, three.stdout);
        assert_eq!(one.stdout, again.stdout);
    }
}

#[test]
fn json_has_schema_and_full_precision() {
    let v = json(&["lyap", "--T2", "1e3"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "lyap");
    assert_eq!(v["system"]["name"], "planar-nubg");
    assert_eq!(v["results"].as_array().unwrap().len(), 2);
    let text = stdout(&["lyap", "--T2", "1e3", "--format", "json"]);
    assert!(text.contains("\"T2\": 1.0000000000000000e3"), "{text}");
}

#[test]
fn planar_bias_row_from_the_command_line() {
    let csv = stdout(&[
        "bias", "--H", "1e2", "--T1", "1e4", "--T2", "1e5", "--format", "csv",
    ]);
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let b1: f64 = rows[0][1].parse().unwrap();
    let b2: f64 = rows[1][1].parse().unwrap();
    assert!(b1 <= 0.01 && rows[0][2] == "uniform", "{csv}");
    assert!(
        (b2 - 1.0949).abs() < 0.01 && rows[1][2] == "nonuniform",
        "{csv}"
    );
}

#[test]
fn report_on_the_zero_system() {
    let cfg = tempfile::NamedTempFile::new().unwrap();
    fs::write(
        cfg.path(),
        "[system]\nbuiltin = \"constant\"\n[ed]\nH = 10.0\nt0 = 100.0\nT = 1e4\n[bias]\nH = 10.0\nT1 = 1e4\nT2 = 1e5\n",
    )
    .unwrap();
    let v = json(&["report", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(v["schema"], 1);
    for kind in ["lyapunov", "ed", "ned"] {
        for iv in v[kind].as_array().unwrap() {
            assert_eq!(iv["lower"].as_f64(), Some(0.0), "{kind}");
            assert_eq!(iv["upper"].as_f64(), Some(0.0), "{kind}");
        }
    }
    assert!(v["containment_violations"].as_array().unwrap().is_empty());
    assert!(v["provenance"]["ned"].is_null());
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["lyap", "--system", "nope"]), Some(2));
    assert_eq!(code(&["lyap", "--T1", "-5"]), Some(2));
    assert_eq!(code(&["lyap", "--H", "5"]), Some(2));
    assert_eq!(code(&["lyap", "--T1", "1e3", "--T2", "1e2"]), Some(3));
    assert_eq!(code(&["ned", "--H", "5e3"]), Some(3));
    assert_eq!(
        code(&["bias", "--H", "1e3", "--T1", "1e3", "--T2", "1e4"]),
        Some(3)
    );
    assert_eq!(code(&["frobnicate"]), Some(2));

    let cfg = tempfile::NamedTempFile::new().unwrap();
    fs::write(cfg.path(), "[lyap]\nT1 = 100.0\nwindow = 3\n").unwrap();
    let out = run(&["lyap", "--config", cfg.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("window"));

    let out = bin()
        .args(["lyap", "--T2", "1e3"])
        .env("DICHOSPEC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_file_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ed.csv");
    let plots = dir.path().join("plots");
    let mut args = SMALL_ED.to_vec();
    let (o, p) = (out.to_str().unwrap(), plots.to_str().unwrap());
    args.extend(["--format", "csv", "--out", o, "--plot-data", p]);
    assert!(stdout(&args).is_empty());
    assert!(fs::read_to_string(&out)
        .unwrap()
        .starts_with("component,lower,upper,divergent\n"));
    for j in 1..=2 {
        let series = fs::read_to_string(plots.join(format!("steklov_{j}.csv"))).unwrap();
        let lines: Vec<&str> = series.lines().collect();
        assert_eq!(lines[0], "t,value");
        assert!(lines.len() - 1 <= 10_001);
        assert!(lines[1].starts_with("100.0,"));
    }
}

#[test]
fn certificates_and_growth_from_the_command_line() {
    let cfg = tempfile::NamedTempFile::new().unwrap();
    fs::write(
        cfg.path(),
        "[wis]\nT = 200.0\nlambdas = [0.0]\ncomponents = [2]\n",
    )
    .unwrap();
    let v = json(&["check-wis", "--config", cfg.path().to_str().unwrap()]);
    let cert = &v["results"]["certificates"][0];
    assert_eq!(cert["feasible"], true);
    assert!(cert["a"].as_f64().unwrap() >= 0.5);
    assert_eq!(v["results"]["membership"][0]["member"], false);

    let v = json(&["growth", "--system", "no-ubg-scalar", "--T", "1e3"]);
    let bounds = v["results"][0]["bounds"].as_array().unwrap();
    let two = bounds
        .iter()
        .find(|b| b["a_tilde"].as_f64() == Some(2.0))
        .unwrap();
    assert!(two["b_tilde"].as_f64().unwrap() <= 2.0);
    assert_eq!(two["satisfied_on_grid"], true);
}

#[test]
fn table_output_uses_four_decimals() {
    let text = stdout(&["lyap", "--T2", "1e3"]);
    assert!(text.contains("[-1.0000, 0.5847]"), "{text}");
    let text = stdout(&["bias", "--H", "1e4", "--T1", "1e6", "--T2", "1e7"]);
    assert!(text.contains("0.0126  nonuniform"), "{text}");
}

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stablefit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_record(o: &Output) -> Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    let line = err.lines().last().expect("an error line");
    serde_json::from_str(line).expect("error line is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--alpha", "1.5", "--beta", "-0.3", "--n", "500", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let values: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 500);
    let c = run(&["simulate", "--alpha", "1.5", "--beta", "-0.3", "--n", "500", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn simulate_then_estimate() {
    let sim = run(&["simulate", "--alpha", "1.7", "--n", "30000", "--seed", "3"]);
    let input = format!("x\n{}", stdout(&sim));
    let out = run_stdin(&["estimate", "--input", "-"], &input);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let alpha = v["report"]["alpha_tilde"].as_f64().unwrap();
    assert!((alpha - 1.7).abs() < 0.15, "{alpha}");
    assert_eq!(v["report"]["mode"], "general");
    assert_eq!(v["manifest"]["subcommand"], "estimate");
    assert_eq!(v["report"]["n"], 30000);

    let strict = run_stdin(&["estimate", "--input", "-", "--strict"], &input);
    let v: Value = serde_json::from_str(&stdout(&strict)).unwrap();
    assert_eq!(v["report"]["mode"], "strict");
    assert!(v["report"]["nu_hat"].as_f64().unwrap() > 0.0);
}

#[test]
fn estimate_selects_column_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("a,b\n");
    for i in 0..300 {
        text.push_str(&format!("{},{}\n", i + 1, ((i * 7919) % 211) as f64 - 105.5));
    }
    let input = write(dir.path(), "in.csv", &text);
    let out = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let o = run(&[
        "estimate",
        "--input",
        &input,
        "--column",
        "b",
        "--out",
        out.to_str().unwrap(),
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["manifest"]["input_digests"].as_array().unwrap().len(), 1);
    let c = std::fs::read_to_string(&csv).unwrap();
    assert!(c.starts_with("# manifest {"));
    assert_eq!(c.lines().count(), 3);

    let o = run(&["estimate", "--input", &input]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bound_report() {
    let o = run(&["bound", "--alpha", "1.5", "--theta", "0.1", "--n", "1000"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &v["report"];
    assert!((r["nu"].as_f64().unwrap() - 1.0 / 2.25).abs() < 1e-15);
    assert!(r["bound_alpha2"].as_f64().unwrap() > 0.0);
    assert_eq!(r["n"], 1000);

    let o = run(&["bound", "--alpha-grid", "1.5,2", "--n-grid", "300,3000", "--transformed"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# manifest"));
    assert_eq!(text.lines().count(), 2 + 4);
}

#[test]
fn moments_csv() {
    let o = run(&["moments", "--nu", "1", "--theta", "0", "--tau", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "order,kind,value");
    let var = rows
        .iter()
        .find(|r| r.starts_with("2,central-V,"))
        .map(|r| r.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .unwrap();
    assert!((var - std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-14);
}

#[test]
fn input_errors_exit_one_with_json() {
    let o = run(&["simulate", "--alpha", "1.5", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    let e = error_record(&o);
    assert_eq!(e["error"]["exit_code"], 1);

    let o = run(&["simulate", "--alpha", "2.5", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_record(&o)["error"]["kind"], "input");

    let o = run_stdin(&["estimate", "--input", "-"], "x\n1.0\nnot-a-number\n3.0\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(error_record(&o)["error"]["message"].is_string());

    let o = run(&["estimate", "--input", "/nonexistent/file.csv"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["moments", "--nu", "0.1", "--theta", "0", "--tau", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

fn synthetic_csv(n: usize) -> String {
    let sim = run(&["simulate", "--alpha", "1.6", "--n", &n.to_string(), "--seed", "8"]);
    let mut level = 0.0;
    let mut text = String::from("time,value\n");
    let mut t = 0usize;
    for (j, line) in stdout(&sim).lines().enumerate() {
        let d: f64 = line.parse::<f64>().unwrap().abs();
        let d = if j % 2 == 0 { d } else { -d };
        text.push_str(&format!("{:?},{:?}\n", t as f64 * 0.5, level + d / 2.0));
        t += 1;
        level += d;
        text.push_str(&format!("{:?},{:?}\n", t as f64 * 0.5, level));
        t += 1;
    }
    text
}

#[test]
fn analyze_synthetic_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "series.csv", &synthetic_csv(20_000));
    let csv = dir.path().join("plot.csv");
    let o = run(&["analyze", "--input", &input, "--out-csv", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let alpha = v["report"]["fitted"]["alpha_tilde"].as_f64().unwrap();
    assert!((1.4..=1.8).contains(&alpha), "{alpha}");
    let plot = std::fs::read_to_string(&csv).unwrap();
    assert!(plot.lines().nth(1).unwrap().starts_with("bin_center,empirical,theoretical"));
    assert_eq!(plot.lines().count(), 2 + 60);

    let o = run(&["analyze", "--input", &input, "--window", "100:50"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_reports_accuracy_failure() {
    // Extremely heavy tails push the fitted exponent below the certified range.
    let dir = tempfile::tempdir().unwrap();
    let sim = run(&["simulate", "--alpha", "0.3", "--n", "6000", "--seed", "2"]);
    let mut text = String::from("time,value\n");
    let mut level = 0.0;
    for (j, line) in stdout(&sim).lines().enumerate() {
        let d: f64 = line.parse::<f64>().unwrap().abs().max(1e-300);
        level += if j % 2 == 0 { d } else { -d };
        text.push_str(&format!("{j},{level:?}\n"));
    }
    let input = write(dir.path(), "heavy.csv", &text);
    let o = run(&["analyze", "--input", &input]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(error_record(&o)["error"]["exit_code"], 2);
    let o = run(&["analyze", "--input", &input, "--allow-degraded"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["certified"], false);
}

#[test]
fn analyze_flux_channels() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("time,dn,phi1,phi2\n");
    for i in 0..3000 {
        let x = i as f64;
        text.push_str(&format!("{},{},{},{}\n", x * 1e-6, 1.0 + (x * 0.37).sin(), (x * 1.3).cos(), (x * 0.7).sin()));
    }
    let input = write(dir.path(), "probe.csv", &text);
    let o = run(&["analyze", "--input", &input]);
    assert_eq!(o.status.code(), Some(1));
    let k = write(
        dir.path(),
        "k.json",
        r#"{"c_light": 1.0, "b_field": 2.0, "delta_theta": 0.1, "r_mean": 0.5}"#,
    );
    let o = run(&["analyze", "--input", &input, "--flux-constants", &k, "--allow-degraded"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn study_csv_is_worker_independent() {
    let base = ["study", "--alpha-grid", "1.5,2", "--n-grid", "300", "--reps", "100", "--seed", "4", "--quiet"];
    let a = run(&[&base[..], &["--workers", "1"]].concat());
    let b = run(&[&base[..], &["--workers", "4"]].concat());
    assert!(a.status.success());
    let body = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&a), body(&b));
    assert_eq!(body(&a).lines().count(), 3);
    assert!(body(&a).starts_with("alpha,n,empirical_var"));
}

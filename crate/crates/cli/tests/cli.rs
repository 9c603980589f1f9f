use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tritrophic"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn classify_at_chaos_parameters_reports_expanding_e2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["classify", "--lambda", "9.14", "--mu", "2.5", "--beta", "3.36"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let e2 = out.lines().find(|l| l.starts_with("E2")).expect("E2 line");
    let moduli: Vec<f64> = e2
        .split("|t| =")
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.trim().parse().unwrap())
        .collect();
    assert_eq!(moduli.len(), 3);
    assert!(moduli.iter().all(|&m| m > 1.0), "{e2}");
    let csv = fs::read_to_string(dir.path().join("classify.csv")).unwrap();
    assert_eq!(data_lines(&csv)[0], "point,kind,case,mod1,mod2,mod3");
}

#[test]
fn tongue_prints_resonance_point_and_width_law() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["tongue", "--n", "1", "--m", "5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("β* = 2.72360"), "{out}");
    assert!(out.contains("μ* = 3.76393"), "{out}");
    assert!(out.contains("χ₁^1.5"), "{out}");
}

#[test]
fn json_output_round_trips_values_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["orbit", "--lambda", "2.85", "--mu", "3.7", "--beta", "2.7", "--n", "50"];
    assert!(run(dir.path(), &args).status.success());
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    assert!(run(dir.path(), &json_args).status.success());

    let csv = fs::read_to_string(dir.path().join("orbit.csv")).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("orbit.json")).unwrap()).unwrap();
    assert_eq!(json["columns"], serde_json::json!(["n", "x", "y", "z"]));
    assert_eq!(json["config"]["settings"]["mu"], "3.7");
    let rows = json["rows"].as_array().unwrap();
    let lines = data_lines(&csv);
    assert_eq!(rows.len(), 50);
    assert_eq!(lines.len(), 51);
    for (row, line) in rows.iter().zip(&lines[1..]) {
        for (cell, text) in row.as_array().unwrap().iter().zip(line.split(',')) {
            let a = cell.as_f64().unwrap();
            let b: f64 = text.parse().unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["classify", "--lambda", "1"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["no-such-command"]).status.code(), Some(2));
    let o = run(dir.path(), &["sweep", "--axis", "mu", "--from", "2.8", "--to", "3.0", "--beta", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["classify", "--lambda", "-1", "--mu", "2", "--beta", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["lyapunov", "--lambda", "9.14", "--mu", "2.5", "--beta", "3.36", "--x0", "0.3", "--y0", "0.302", "--z0", "0.001"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverged"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "lambda = 2.85\nmu = 3.0\nbeta = 2.7\nn = 5\nformat = \"json\"\n").unwrap();
    let o = run(dir.path(), &["orbit", "--config", cfg.to_str().unwrap(), "--mu", "3.7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("orbit.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["settings"]["mu"], "3.7");
    assert_eq!(json["config"]["settings"]["lambda"], "2.85");
    assert_eq!(json["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "sweep", "--axis", "mu", "--from", "2.8", "--to", "3.6", "--grid", "17", "--lambda", "2.9",
        "--beta", "3.03", "--x0", "0.665", "--y0", "0.010", "--z0", "0.010", "--transient", "2000",
        "--lyapunov-iterations", "200", "--samples", "4",
    ];
    let mut files = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("s{threads}.csv"));
        let mut args = base.to_vec();
        args.extend(["--threads", threads, "--out", path.to_str().unwrap()]);
        assert!(run(dir.path(), &args).status.success());
        files.push(fs::read_to_string(path).unwrap());
    }
    assert_eq!(data_lines(&files[0]), data_lines(&files[1]));
    let lines = data_lines(&files[0]);
    assert_eq!(lines[0], "param,x1,x2,x3,x4,y1,y2,y3,y4,z1,z2,z3,z4,lyap_max");
    assert_eq!(lines.len(), 18);
}

#[test]
fn marotto_json_carries_certificate_fields() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["marotto", "--lambda", "9.14", "--mu", "2.5", "--beta", "3.36", "--format", "json"],
    );
    assert!(o.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("marotto.json")).unwrap()).unwrap();
    let cols: Vec<&str> = json["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    for want in ["e_prime_x", "e_dd_x", "residual", "det_df2", "box_lo_x", "box_hi_z"] {
        assert!(cols.contains(&want), "missing {want}");
    }
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lastsuccess"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(ok(args).trim()).unwrap()
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> String {
    let path = dir.path().join(name);
    let path = path.to_str().unwrap().to_owned();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    ok(&full);
    path
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .map(|f| {
                    if f.is_empty() {
                        f64::NAN
                    } else {
                        f.parse().unwrap_or(f64::NAN)
                    }
                })
                .collect()
        })
        .collect();
    (header, rows)
}

#[test]
fn gen_secretary_writes_instance_json() {
    let v: Value = serde_json::from_str(ok(&["gen", "secretary", "--n", "4"]).trim()).unwrap();
    assert_eq!(v["n"], 4);
    let p: Vec<f64> = v["p"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(p, vec![1.0, 0.5, 1.0 / 3.0, 0.25]);
}

#[test]
fn gen_staircase_to_file() {
    let dir = TempDir::new().unwrap();
    let path = gen(&dir, "s.json", &["staircase", "--n", "3", "--j", "2"]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["p"][1], 1.0);
}

#[test]
fn gen_rejects_unknown_family_and_missing_params() {
    assert!(!run(&["gen", "nonsense", "--n", "3"]).status.success());
    assert!(!run(&["gen", "staircase", "--n", "3"]).status.success());
}

#[test]
fn eval_examples() {
    let dir = TempDir::new().unwrap();
    let tt = gen(&dir, "tt.json", &["two-trial", "--p1", "1", "--p2", "1"]);
    let v = json(&["eval", "--instance", &tt, "--policy", "asls"]);
    assert_eq!(v["estimate"], 1.0);
    assert_eq!(v["method"], "exact");
    assert_eq!(v["R"], "inf");
    assert_eq!(v["bound"], 0.25);

    let z = gen(&dir, "z.json", &["one-then-zeros", "--n", "2"]);
    let v = json(&["eval", "--instance", &z, "--policy", "fls"]);
    assert_eq!(v["estimate"], 1.0);
    assert!(v["bound"].is_null());

    let w = gen(&dir, "w.json", &["iid", "--n", "1", "--p", "0.2"]);
    let v = json(&["eval", "--instance", &w, "--policy", "flsr"]);
    assert!((v["estimate"].as_f64().unwrap() - 0.18).abs() < 1e-12);
    assert!((v["R"].as_f64().unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn eval_multi_sample_uses_oracle_when_small() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "i.json", &["iid", "--n", "3", "--p", "0.5"]);
    let v = json(&[
        "eval",
        "--instance",
        &inst,
        "--policy",
        "multi-sample",
        "--m",
        "4",
    ]);
    assert_eq!(v["method"], "oracle");
    assert!(!run(&[
        "eval",
        "--instance",
        &inst,
        "--policy",
        "multi-sample",
        "--m",
        "100"
    ])
    .status
    .success());
}

#[test]
fn mc_is_deterministic_and_echoes_parameters() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "i.json", &["iid", "--n", "10", "--p", "0.2"]);
    let args = [
        "mc",
        "--instance",
        &inst,
        "--policy",
        "multi-sample",
        "--m",
        "50",
        "--replicates",
        "300",
        "--seed",
        "7",
    ];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let v: Value = serde_json::from_str(a.trim()).unwrap();
    assert_eq!(v["m"], 50);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["method"], "monte_carlo");
}

#[test]
fn mc_ci_shrinks_with_replicates() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "i.json", &["iid", "--n", "1", "--p", "0.2"]);
    let ci = |reps: &str| {
        json(&[
            "mc",
            "--instance",
            &inst,
            "--policy",
            "flsr",
            "--replicates",
            reps,
            "--seed",
            "11",
        ])["ci_halfwidth"]
            .as_f64()
            .unwrap()
    };
    let ratio = ci("1000") / ci("4000");
    assert!((ratio - 2.0).abs() <= 0.4, "ratio {ratio}");
}

#[test]
fn mc_appends_csv_rows() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "i.json", &["secretary", "--n", "5"]);
    let out = dir.path().join("mc.csv");
    let out = out.to_str().unwrap();
    for seed in ["1", "2"] {
        ok(&[
            "mc",
            "--instance",
            &inst,
            "--policy",
            "asls",
            "--replicates",
            "50",
            "--seed",
            seed,
            "--csv",
            out,
        ]);
    }
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "policy,m,replicates,seed,R,estimate,ci_halfwidth");
    assert!(lines[1].starts_with("asls,1,50,1,inf,"));
}

#[test]
fn mc_and_sweep_require_seed() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "i.json", &["secretary", "--n", "5"]);
    assert!(!run(&["mc", "--instance", &inst, "--policy", "fls"])
        .status
        .success());
    assert!(
        !run(&["sweep", "--policy", "asls", "--r-grid", "1", "--n", "3"])
            .status
            .success()
    );
}

#[test]
fn sweep_rows_dominate_lower_bound() {
    let args = [
        "sweep",
        "--policy",
        "asls",
        "--r-grid",
        "0.05,0.3,1,3",
        "--n",
        "6",
        "--trials-per-point",
        "25",
        "--seed",
        "5",
    ];
    let text = ok(&args);
    assert_eq!(text, ok(&args));
    let (header, rows) = csv_rows(&text);
    assert_eq!(
        header,
        [
            "policy",
            "n",
            "R",
            "instance_seed",
            "exact_winprob",
            "lower_bound",
            "upper_bound"
        ]
    );
    assert_eq!(rows.len(), 100);
    for row in &rows {
        assert!(row[4] >= row[5] - 1e-9, "{row:?}");
    }
    // Rows come out in grid order.
    let grid: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    assert!(grid.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn sweep_fls_has_empty_lower_bound() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.csv");
    ok(&[
        "sweep",
        "--policy",
        "fls",
        "--r-grid",
        "1",
        "--n",
        "3",
        "--trials-per-point",
        "2",
        "--seed",
        "1",
        "--csv",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(5) == Some("")));
}

#[test]
fn bounds_csv_shape() {
    let (header, rows) = csv_rows(&ok(&["bounds", "--r-max", "2", "--step", "0.01"]));
    assert_eq!(header, ["R", "asls_bound", "upper_bound", "flsr_bound"]);
    assert_eq!(rows.len(), 201);
    assert_eq!(rows[0], vec![0.0, 0.0, 0.0, 0.0]);
    assert!(rows.windows(2).all(|w| w[1][1] >= w[0][1]));
    assert!((rows[50][3] - 0.25).abs() < 1e-15);
    assert!(rows.iter().filter(|r| r[0] >= 0.37).all(|r| r[1] == 0.25));
}

#[test]
fn multisample_curve_rows() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "i.json", &["iid", "--n", "100", "--p", "0.02"]);
    let out = dir.path().join("c.csv");
    ok(&[
        "multisample-curve",
        "--instance",
        &inst,
        "--m-list",
        "100,1000,10000",
        "--replicates",
        "300",
        "--seed",
        "9",
        "--csv",
        out.to_str().unwrap(),
    ]);
    let (header, rows) = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(
        header,
        ["m", "epsilon", "estimate", "ci_halfwidth", "guarantee"]
    );
    for row in &rows {
        assert!((row[1] - (std::f64::consts::E / row[0]).powf(0.25)).abs() < 1e-12);
        assert!(row[2] >= row[4] - row[3]);
    }
    assert!(rows
        .windows(2)
        .all(|w| w[1][2] >= w[0][2] - 2.0 * w[0][3].max(w[1][3])));
}

#[test]
fn help_for_every_subcommand() {
    for sub in ["gen", "eval", "mc", "sweep", "bounds", "multisample-curve"] {
        let out = run(&[sub, "--help"]);
        assert!(out.status.success(), "{sub}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
    }
}

#[test]
fn unknown_flag_exits_nonzero_with_usage() {
    let out = run(&["bounds", "--bogus"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn missing_instance_file_is_an_error() {
    assert!(!run(&[
        "eval",
        "--instance",
        Path::new("/nonexistent/x.json").to_str().unwrap(),
        "--policy",
        "fls"
    ])
    .status
    .success());
}

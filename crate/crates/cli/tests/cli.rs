use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cellwait"));
    c.env_remove("CELLWAIT_SEED").env("RUST_LOG", "error");
    c
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines();
    let head = lines.next().unwrap().split(',').map(String::from).collect();
    (head, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn col(head: &[String], body: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = head.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    body.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn write_tmp(dir: &tempfile::TempDir, body: &str) -> PathBuf {
    let p = dir.path().join("cfg.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn bad_fractions_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(
        &dir,
        r#"{"rho_f":0.005,"p_A":0.5,"p_I":0.5,"p_S":0.5,"mu":0.1,"lambda_S":0.1,"alpha":4,"p_tx_dbm":23}"#,
    );
    let out = run(&["coverage", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cfg.json:1:") && err.contains("sum to 1"), "{err}");
}

#[test]
fn bad_flags_exit_two() {
    let cfg = config("default.json");
    for args in [
        vec!["coverage", "--config", cfg.to_str().unwrap(), "--sweep", "gamma_db:5:1:3"],
        vec!["coverage", "--config", "/nonexistent/x.json"],
        vec!["simulate", "--config", cfg.to_str().unwrap(), "--trials", "0"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn tiny_validation_is_inconclusive_not_failed() {
    let out = run(&["validate", "--config", config("default.json").to_str().unwrap(), "--trials", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let mc = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "mc_coverage").unwrap();
    assert_eq!(mc["status"], "inconclusive");
    assert_eq!(v["passed"], true);
}

#[test]
fn gamma_sweep_shape_and_agreement() {
    let csv = ok_stdout(&[
        "coverage",
        "--config",
        config("fig1.json").to_str().unwrap(),
        "--method",
        "all",
        "--trials",
        "2000",
    ]);
    let (head, body) = rows(&csv);
    assert_eq!(body.len(), 31);
    let closed = col(&head, &body, "p_c_closed");
    let quad = col(&head, &body, "p_c_quadrature");
    let mc = col(&head, &body, "p_c_mc");
    for i in 0..31 {
        assert!((closed[i] - quad[i]).abs() <= 1e-6 * closed[i], "row {i}");
        assert!((0.0..=1.0).contains(&mc[i]));
    }
    assert!(closed.windows(2).all(|p| p[1] <= p[0]));
}

#[test]
fn threshold_sweep_and_optimum_columns() {
    let cfg = config("fig1.json");
    let csv = ok_stdout(&[
        "coverage",
        "--config",
        cfg.to_str().unwrap(),
        "--method",
        "closed",
        "--sweep",
        "r_th:0:40:9",
        "--gamma-db",
        "0",
    ]);
    let (head, body) = rows(&csv);
    let pc = col(&head, &body, "p_c_closed");
    assert_eq!(pc.len(), 9);
    let csv = ok_stdout(&[
        "coverage",
        "--config",
        cfg.to_str().unwrap(),
        "--method",
        "closed",
        "--optimal-threshold",
        "--sweep",
        "gamma_db:0:0.5:2",
    ]);
    let (head, body) = rows(&csv);
    let grid = col(&head, &body, "p_c_grid")[0];
    let base = col(&head, &body, "p_c_baseline")[0];
    assert!(grid >= pc.iter().cloned().fold(0.0, f64::max) - 1e-12);
    assert!((base - pc[0]).abs() < 1e-12);
}

#[test]
fn rate_flat_without_delay_and_marker_near_grid_max() {
    let csv = ok_stdout(&[
        "rate",
        "--config",
        config("fig2.json").to_str().unwrap(),
        "--w-values",
        "0,10",
        "--sweep",
        "r_th:0:30:61",
    ]);
    let (head, body) = rows(&csv);
    let w = col(&head, &body, "w");
    let r = col(&head, &body, "r_th");
    let c = col(&head, &body, "capacity");
    let r_star = col(&head, &body, "r_star");
    let flat: Vec<f64> = (0..w.len()).filter(|&i| w[i] == 0.0).map(|i| c[i]).collect();
    assert_eq!(flat.len(), 61);
    assert!(flat.iter().all(|x| (x - flat[0]).abs() <= 1e-8 * flat[0]));
    let delayed: Vec<usize> = (0..w.len()).filter(|&i| w[i] == 10.0).collect();
    let best = *delayed.iter().max_by(|a, b| c[**a].total_cmp(&c[**b])).unwrap();
    assert!(
        (r_star[best] - r[best]).abs() <= 0.25 + 0.01 + 1e-9,
        "r*={} grid={}",
        r_star[best],
        r[best]
    );
}

#[test]
fn efficiency_shape() {
    let csv = ok_stdout(&["ee", "--config", config("fig3.json").to_str().unwrap()]);
    let (head, body) = rows(&csv);
    let beta = col(&head, &body, "beta_w");
    let ratio = col(&head, &body, "theta_ratio");
    let nu = col(&head, &body, "nu_N");
    assert!(nu.iter().all(|v| *v >= 1.0 - 1e-12));
    let mut ratios = ratio.clone();
    ratios.dedup();
    let mut at_top = Vec::new();
    for t in &ratios {
        let idx: Vec<usize> = (0..nu.len()).filter(|&i| ratio[i] == *t).collect();
        assert!(idx.windows(2).all(|p| nu[p[1]] >= nu[p[0]] - 1e-12), "ratio {t}");
        let last = *idx.last().unwrap();
        assert!((beta[last] - 0.99).abs() < 1e-12);
        at_top.push(nu[last]);
    }
    assert!(at_top.windows(2).all(|p| p[1] > p[0]), "{at_top:?}");
    assert!((at_top.last().unwrap() - 2.8565448665765527).abs() < 1e-9);
}

#[test]
fn seed_from_environment_matches_flag() {
    let cfg = config("default.json");
    let args = ["simulate", "--config", cfg.to_str().unwrap(), "--trials", "200"];
    let a = bin().args(args).env("CELLWAIT_SEED", "7").output().unwrap();
    let b = ok_stdout(&[&args[..], &["--seed", "7"]].concat());
    let c = ok_stdout(&[&args[..], &["--seed", "8"]].concat());
    assert_eq!(String::from_utf8(a.stdout).unwrap(), b);
    assert_ne!(b, c);
    assert_eq!(b.lines().count(), 201);
}

#[test]
fn json_output_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cov.json");
    ok_stdout(&[
        "coverage",
        "--config",
        config("fig1.json").to_str().unwrap(),
        "--method",
        "closed",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 31);
    assert!(v[0]["p_c_closed"].as_f64().unwrap() > 0.0);
}

fn assert_matches_golden(actual: &str, golden: &str) {
    let expected = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(golden)).unwrap();
    let (ha, ba) = rows(actual);
    let (he, be) = rows(&expected);
    assert_eq!(ha, he);
    assert_eq!(ba.len(), be.len());
    for (ra, re) in ba.iter().zip(&be) {
        for (a, e) in ra.iter().zip(re) {
            match (a.parse::<f64>(), e.parse::<f64>()) {
                (Ok(x), Ok(y)) => assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0), "{golden}: {x} vs {y}"),
                _ => assert_eq!(a, e),
            }
        }
    }
}

#[test]
fn golden_coverage_default() {
    let csv = ok_stdout(&["coverage", "--config", config("default.json").to_str().unwrap(), "--method", "quad"]);
    assert_matches_golden(&csv, "coverage_default.csv");
}

#[test]
fn golden_rate_default() {
    let csv = ok_stdout(&[
        "rate",
        "--config",
        config("default.json").to_str().unwrap(),
        "--sweep",
        "r_th:0:30:13",
        "--w-values",
        "0,5,10",
    ]);
    assert_matches_golden(&csv, "rate_default.csv");
}

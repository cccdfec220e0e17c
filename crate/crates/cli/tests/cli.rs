mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{gaussian_closes, heston_closes, write_prices};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heston-gof")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn missing_file_is_io_error() {
    let o = run(&["kurtosis", "--input", "/definitely/not/here.csv"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("here.csv"));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let prices = dir.path().join("p.csv");
    write_prices(&prices, &gaussian_closes(600, 1));
    assert_eq!(code(&run(&["kurtosis", "--input", s(&prices), "--lags", ""])), 1);
    assert_eq!(code(&run(&["kurtosis", "--input", s(&prices), "--lags", "0"])), 1);
    assert_eq!(code(&run(&["replicate", "--input", s(&prices), "--lags", ""])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["test", "--input", s(&prices), "--test", "ad"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn numeric_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // theta must be positive
    let o = run(&["simulate", "--gamma", "1", "--theta=-0.1", "--k", "0.1", "--paths", "10", "--out", s(dir.path())]);
    assert_eq!(code(&o), 3);
}

#[test]
fn gaussian_prices_have_no_excess_kurtosis() {
    let dir = tempfile::tempdir().unwrap();
    let prices = dir.path().join("p.csv");
    write_prices(&prices, &gaussian_closes(40_000, 3));
    let o = run(&["kurtosis", "--input", s(&prices), "--lags", "1,5", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("kurtosis.json")).unwrap()).unwrap();
    for row in rows.as_array().unwrap() {
        assert!(row["untrimmed"].as_f64().unwrap().abs() < 0.15, "{row}");
        assert!(row["trimmed"].as_f64().unwrap().abs() < 0.15, "{row}");
    }
}

#[test]
fn simulate_is_deterministic_and_gaussian_without_noise() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        run(&[
            "simulate", "--gamma", "2", "--theta", "0.04", "--k", "1e-6", "--v0", "0.04", "--dt", "0.01", "--paths", "200000", "--seed", "7",
            "--out", out.to_str().unwrap(),
        ])
    };
    assert_eq!(code(&args(a.path())), 0);
    assert_eq!(code(&args(b.path())), 0);
    for f in ["samples.txt", "summary.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["excess_kurtosis"].as_f64().unwrap().abs() < 0.05, "{summary}");
}

#[test]
fn stochastic_variance_fattens_tails() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "simulate", "--gamma", "2", "--theta", "0.04", "--k", "0.3", "--dt", "0.01", "--paths", "1000000", "--seed", "3", "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&o), 0);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let k = summary["excess_kurtosis"].as_f64().unwrap();
    // standard error of the sample excess kurtosis is about sqrt(24 / N) for light tails
    let se = (24.0f64 / 1e6).sqrt();
    assert!(k > 4.0 * se, "{k}");
}

#[test]
fn replicate_writes_plot_data_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let prices = dir.path().join("p.csv");
    write_prices(&prices, &heston_closes(5050, 11));
    let out = dir.path().join("rep");
    let o = run(&["replicate", "--input", s(&prices), "--lags", "1,5,20", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for lag in [1, 5, 20] {
        let tsv = std::fs::read_to_string(out.join(format!("density_lag{lag}.tsv"))).unwrap();
        assert!(tsv.starts_with("x\tempirical\tdy\tgaussian\n"));
        assert!(tsv.lines().count() > 10);
    }
    let fit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("replicate_fit.json")).unwrap()).unwrap();
    assert_eq!(fit["stacking"]["factor"].as_f64(), Some(10.0));
    assert_eq!(fit["trim"].as_bool(), Some(true));
    assert_eq!(fit["dy"][0]["report"]["params"]["rho"].as_f64(), Some(0.0));
}

#[test]
fn test_reports_round_trip_through_fit_file() {
    let dir = tempfile::tempdir().unwrap();
    let prices = dir.path().join("p.csv");
    write_prices(&prices, &heston_closes(5050, 12));
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    let base = ["test", "--input", s(&prices), "--lags", "1,5,250", "--models", "gaussian,dy", "--test", "chi2"];
    let mut a: Vec<&str> = base.to_vec();
    a.extend(["--out", s(&first)]);
    let o = run(&a);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fit = first.join("test_fit.json");
    let mut b: Vec<&str> = base.to_vec();
    b.extend(["--out", s(&second), "--fit", s(&fit)]);
    let o2 = run(&b);
    assert_eq!(code(&o2), 0, "{}", String::from_utf8_lossy(&o2.stderr));
    assert_eq!(o.stdout, o2.stdout);
    assert_eq!(
        std::fs::read(first.join("test_chi2.json")).unwrap(),
        std::fs::read(second.join("test_chi2.json")).unwrap()
    );
    let text = String::from_utf8_lossy(&o.stdout);
    let row250 = text.lines().find(|l| l.trim_start().starts_with("250")).unwrap();
    assert!(row250.contains("SKIPPED"), "{row250}");
}

#[test]
fn ks_table_has_a_row_per_lag() {
    let dir = tempfile::tempdir().unwrap();
    let prices = dir.path().join("p.csv");
    write_prices(&prices, &heston_closes(5050, 13));
    let out = dir.path().join("ks");
    let o = run(&["test", "--input", s(&prices), "--models", "gaussian", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("test_ks.json")).unwrap()).unwrap();
    let rows = report["tables"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows[0]["result"]["std"].is_null());
    assert_eq!(rows[1]["paths"].as_u64(), Some(5));
}

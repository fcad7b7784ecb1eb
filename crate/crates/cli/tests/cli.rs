// SPDX-License-Identifier: MIT OR Apache-2.0

//! End-to-end tests of the `thermoband` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermoband"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn spectrum(out: &Path) -> Output {
    run(&[
        "spectrum",
        "--config",
        config("compressional_thermal.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--omega",
        "0:3:60",
        "--format",
        "csv",
    ])
}

#[test]
fn identical_runs_write_identical_csv() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert!(spectrum(a.path()).status.success());
    assert!(spectrum(b.path()).status.success());
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 3);
    for n in names {
        let x = fs::read(a.path().join(&n)).unwrap();
        let y = fs::read(b.path().join(&n)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{n:?} differs between runs");
    }
}

#[test]
fn spectrum_csv_has_expected_columns() {
    let dir = TempDir::new().unwrap();
    assert!(spectrum(dir.path()).status.success());
    let text = fs::read_to_string(dir.path().join("spectrum_fb_coupled.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("method,block,branch,omega_bar,re_k,im_k,residual,physical")
    );
    assert!(lines.all(|l| l.starts_with("fb,coupled,")));
}

#[test]
fn tensors_and_compare_succeed() {
    let dir = TempDir::new().unwrap();
    let cfg = config("shear_contrast.toml");
    let out = dir.path().to_str().unwrap();
    let t = run(&["tensors", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert!(t.status.success());
    assert!(String::from_utf8_lossy(&t.stdout).contains("n22"));
    let c = run(&[
        "compare",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out,
        "--omega",
        "0:0.3:16",
        "--format",
        "csv,svg",
    ]);
    assert!(c.status.success(), "{}", String::from_utf8_lossy(&c.stderr));
    assert!(dir.path().join("compare_shear.csv").exists());
    assert!(dir.path().join("compare_shear.svg").exists());
}

#[test]
fn cell_function_is_sampled() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "cell-functions",
        "--config",
        config("compressional_thermal.toml").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--name",
        "M2_22",
        "--samples",
        "11",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("M2_22.csv")).unwrap();
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let cfg = config("compressional_thermal.toml");
    let (cfg, out) = (cfg.to_str().unwrap(), dir.path().to_str().unwrap());
    let cases: [&[&str]; 4] = [
        &["spectrum", "--config", cfg, "--out", out, "--method", ""],
        &["spectrum", "--config", cfg, "--out", out, "--format", "png"],
        &["spectrum", "--config", cfg, "--out", out, "--omega", "3:1:10"],
        &["cell-functions", "--config", cfg, "--out", out, "--name", "N9_999"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn missing_config_is_an_error() {
    let o = run(&["tensors", "--config", "/nonexistent/cell.toml"]);
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
}

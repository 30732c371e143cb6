use std::path::Path;
use std::process::{Command, Output};

use brown_core::compare::ComparisonReport;
use brown_core::io::read_json;
use brown_core::BrownDescriptor;

const FIG1: [&str; 12] = [
    "--p-low", "0", "--p-high", "1", "--p-weight", "1/2", "--q-low", "0", "--q-high", "4/5", "--q-weight", "1/2",
];
const FIG2A: [&str; 12] = [
    "--p-low", "0", "--p-high", "9/10", "--p-weight", "4/5", "--q-low", "0", "--q-high", "1", "--q-weight", "1/5",
];

fn brown(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_brown"));
    cmd.args(args);
    match out_dir {
        Some(d) => cmd.env("BROWN_OUT_DIR", d),
        None => cmd.env_remove("BROWN_OUT_DIR"),
    };
    cmd.output().expect("binary runs")
}

fn with<'a>(head: &[&'a str], law: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(law).chain(tail).copied().collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn brown_fig1_has_no_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1.json");
    let o = brown(&with(&["brown"], &FIG1, &["--out", out.to_str().unwrap()]), None);
    assert!(o.status.success(), "{}", stderr(&o));
    let desc: BrownDescriptor = read_json(&out).unwrap();
    assert!(desc.nonzero_atoms().is_empty());
    assert_eq!(desc.weights.w_cont, 1.0);
    assert_eq!(desc.params.law_q.pos_high, 0.8);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("(none)") && stdout.contains("nu support"));
}

#[test]
fn point_mass_is_rejected_as_normal() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = with(&["brown"], &FIG1, &[]);
    args[6] = "1.0";
    let o = brown(&args, Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("normal case: Brown measure equals spectral measure"));
}

#[test]
fn validation_errors_name_the_flag() {
    let mut args = with(&["brown"], &FIG1, &[]);
    args[12] = "3/2";
    let o = brown(&args, None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--q-weight"));

    let mut args = with(&["brown"], &FIG1, &[]);
    args[6] = "two";
    let o = brown(&args, None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--p-weight"));

    let o = brown(&with(&["esd"], &FIG1, &["--n", "1"]), None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--n"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "x").unwrap();
    let target = file.join("desc.json");
    let o = brown(&with(&["brown"], &FIG1, &["--out", target.to_str().unwrap()]), None);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn env_dir_is_the_default_and_flags_win() {
    let env_dir = tempfile::tempdir().unwrap();
    let o = brown(&with(&["brown"], &FIG1, &[]), Some(env_dir.path()));
    assert!(o.status.success());
    assert!(env_dir.path().join("brown.json").exists());

    let flag_dir = tempfile::tempdir().unwrap();
    let out = flag_dir.path().join("x.json");
    let o = brown(&with(&["brown"], &FIG2A, &["--out", out.to_str().unwrap()]), Some(env_dir.path()));
    assert!(o.status.success());
    assert!(out.exists());
    let first: BrownDescriptor = read_json(&env_dir.path().join("brown.json")).unwrap();
    assert_eq!(first.weights.w_cont, 1.0);
}

#[test]
fn esd_fig1_writes_a_thousand_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = brown(&with(&["esd"], &FIG1, &["--n", "1000", "--seed", "4", "--out", dir.path().to_str().unwrap()]), None);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("esd_trial_0000.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("re,im"));
    assert_eq!(csv.lines().count(), 1001);
    assert!(dir.path().join("esd_trial_0000.json").exists());
}

#[test]
fn esd_is_deterministic_and_numbers_trials() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = brown(
            &with(&["esd"], &FIG2A, &["--n", "40", "--trials", "4", "--seed", "9", "--out", d.path().to_str().unwrap()]),
            None,
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for t in 0..4 {
        for ext in ["csv", "json"] {
            let name = format!("esd_trial_{t:04}.{ext}");
            let (x, y) = (std::fs::read(a.path().join(&name)).unwrap(), std::fs::read(b.path().join(&name)).unwrap());
            assert_eq!(x, y, "{name} differs between runs");
        }
    }
    let first = std::fs::read(a.path().join("esd_trial_0000.csv")).unwrap();
    let second = std::fs::read(a.path().join("esd_trial_0001.csv")).unwrap();
    assert_ne!(first, second);
}

#[test]
fn compare_on_exact_samples_passes_control_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let desc = p.join("desc.json");
    let exact = p.join("exact");
    let report = p.join("report.json");
    let rows = p.join("points.csv");
    assert!(brown(&with(&["brown"], &FIG2A, &["--out", desc.to_str().unwrap()]), None).status.success());
    let o = brown(&with(&["sample"], &FIG2A, &["--n", "100000", "--seed", "3", "--out", exact.to_str().unwrap()]), None);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = brown(
        &[
            "compare",
            "--esd",
            exact.to_str().unwrap(),
            "--desc",
            desc.to_str().unwrap(),
            "--out",
            report.to_str().unwrap(),
            "--points",
            rows.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r: ComparisonReport = read_json(&report).unwrap();
    assert_eq!(r.thresholds, brown_core::Thresholds::CONTROL);
    assert!(r.passed(), "{:?}", r.failed_checks());
    assert_eq!(std::fs::read_to_string(&rows).unwrap().lines().count(), 100_001);
}

#[test]
fn compare_rejects_mismatched_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let desc = p.join("desc.json");
    let esd = p.join("esd");
    assert!(brown(&with(&["brown"], &FIG1, &["--out", desc.to_str().unwrap()]), None).status.success());
    assert!(brown(&with(&["esd"], &FIG2A, &["--n", "20", "--out", esd.to_str().unwrap()]), None).status.success());
    let o = brown(&["compare", "--esd", esd.to_str().unwrap(), "--desc", desc.to_str().unwrap()], Some(p));
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let o = brown(&["plot", "--esd", esd.to_str().unwrap(), "--desc", desc.to_str().unwrap()], Some(p));
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn plot_with_and_without_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let desc = p.join("desc.json");
    let esd = p.join("esd");
    assert!(brown(&with(&["brown"], &FIG2A, &["--out", desc.to_str().unwrap()]), None).status.success());
    assert!(brown(&with(&["esd"], &FIG2A, &["--n", "50", "--out", esd.to_str().unwrap()]), None).status.success());

    let bare = p.join("bare.svg");
    assert!(brown(&["plot", "--desc", desc.to_str().unwrap(), "--out", bare.to_str().unwrap()], None).status.success());
    let svg = std::fs::read_to_string(&bare).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert_eq!(svg.matches("class=\"atom\"").count(), 1);
    assert!(!svg.contains("r=\"1.2\""));

    let full = p.join("full.svg");
    let o = brown(
        &["plot", "--desc", desc.to_str().unwrap(), "--esd", esd.to_str().unwrap(), "--out", full.to_str().unwrap()],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&full).unwrap().matches("r=\"1.2\"").count(), 50);
}

#[test]
fn missing_inputs_are_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let o = brown(&["plot", "--desc", missing.to_str().unwrap()], Some(dir.path()));
    assert_eq!(o.status.code(), Some(3));
}

use std::path::Path;
use std::process::{Command, Output};

use barrier_bound_cli::builtin;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_barrier-bound"));
    c.env("BARRIER_BOUND_WORKERS", "2");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn barrier-bound")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

const BASE: &str = r#"
spec_version = 1
name = "level-check"

[profile]
flux = { kind = "linear" }
potential = { kind = "allen-cahn" }
range = [-0.5, 0.5]

[model]
kind = "sphere-radial"
n = 2
radius = 1.0

[barrier]
kind = "sphere-family"
range = "profile"
"#;

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn list_prints_builtins() {
    let out = run(&["--list"]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = text(&out.stdout).lines().map(str::to_string).collect();
    let expected: Vec<String> = builtin::names().map(str::to_string).collect();
    assert_eq!(names, expected);
    assert!(names.iter().any(|n| n == "allen-cahn-kink-1d"));
}

#[test]
fn level_at_cu_is_a_construction_error() {
    let dir = tempfile::tempdir().unwrap();
    // c_u of -(1 - u^2)^2 / 4 on [-0.5, 0.5] is -0.140625
    let cfg = write(dir.path(), "c.toml", &format!("{BASE}c = [-0.140625]\n"));
    let out_dir = dir.path().join("out");
    let out = run(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", text(&out.stderr));
    assert!(
        text(&out.stderr).contains("c > c_u"),
        "{}",
        text(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("level-check/report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["verdict"], "construction-error");
}

#[test]
fn config_errors_exit_4_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        &format!("{BASE}c_offset = [0.1]\nbogus = 1\n"),
    );
    let out = run(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(4));
    let err = text(&out.stderr);
    assert!(err.contains("bogus") && err.contains("line"), "{err}");

    let cfg = write(dir.path(), "empty.toml", &format!("{BASE}c_offset = []\n"));
    let out = run(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(4));
    assert!(
        text(&out.stderr).contains("barrier.c"),
        "{}",
        text(&out.stderr)
    );

    assert_eq!(run(&["run", "no-such-scenario"]).status.code(), Some(4));
    assert_eq!(run(&["--frobnicate"]).status.code(), Some(4));
    assert_eq!(run(&[]).status.code(), Some(4));
    assert_eq!(
        run(&["run", "allen-cahn-kink-1d", "--sweep-only", "kappa"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn kink_run_writes_a_bundle_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "allen-cahn-kink-1d",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let root = dir.path().join("allen-cahn-kink-1d");
    for f in [
        "report.json",
        "summary.csv",
        "fields/field-1025.csv",
        "barriers/barrier-0.csv",
        "plots/field.svg",
        "plots/gradient.svg",
        "plots/two-point.svg",
    ] {
        assert!(root.join(f).is_file(), "missing {f}");
    }
    let summary = std::fs::read_to_string(root.join("summary.csv")).unwrap();
    assert!(summary.starts_with(
        "scenario,check,sweep,resolution,h,max_defect,tolerance,verdict,scenario_verdict"
    ));
}

#[test]
fn merge_combines_reports_and_disambiguates_names() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (d, s) in [(&a, "dirichlet-ball"), (&b, "dirichlet-ball")] {
        let out = run(&["run", s, "--out", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let ra = a.join("dirichlet-ball");
    let rb = b.join("dirichlet-ball/report.json");
    let out = run(&["--merge", ra.to_str().unwrap(), rb.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert!(rows.len() >= 2);
    assert!(rows.iter().any(|r| &r[0] == "dirichlet-ball"));
    assert!(rows.iter().any(|r| &r[0] == "dirichlet-ball#2"));

    // an unreadable path is skipped with a warning
    let missing = dir.path().join("missing.json");
    let out_dir = dir.path().join("merged");
    let out = run(&[
        "--merge",
        missing.to_str().unwrap(),
        ra.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stderr).contains("skipped"));
    assert!(out_dir.join("merged.csv").is_file());
}

#[test]
fn merge_without_usable_reports_is_a_usage_error() {
    assert_eq!(run(&["--merge"]).status.code(), Some(4));
    let dir = tempfile::tempdir().unwrap();
    let junk = write(dir.path(), "junk.json", "{\"not\": \"a report\"}");
    assert_eq!(run(&["--merge", &junk]).status.code(), Some(4));
}

fn without_timestamp(path: &Path) -> String {
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("generated_at");
    serde_json::to_string_pretty(&v).unwrap()
}

#[test]
fn reruns_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for (k, workers) in ["1", "4"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{k}"));
        let out = bin()
            .env("BARRIER_BOUND_WORKERS", workers)
            .args([
                "run",
                "allen-cahn-stripe-torus",
                "--resolution-override",
                "32",
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(
            matches!(out.status.code(), Some(0) | Some(2)),
            "{}",
            text(&out.stderr)
        );
        reports.push(without_timestamp(
            &out_dir.join("allen-cahn-stripe-torus/report.json"),
        ));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn sweep_only_keeps_one_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "sphere-family",
        "--sweep-only",
        "c",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("sphere-family/report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(v["barriers"].as_array().unwrap().len(), 3);
}

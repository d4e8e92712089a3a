//! End-to-end checks of the binary: exit codes, demo smoke contract,
//! rip-audit on an identity design, replay consistency, and the
//! thread-count independence of `run` outputs.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adaiht"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("adaiht_cli_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_small_config(dir: &Path) -> PathBuf {
    let path = dir.join("scenario.toml");
    std::fs::write(
        &path,
        r#"
name = "cli_test"
n = 80
p = 40
s = 3
sigma = 1.0
a_over_astar = [1.5]
replications = 4
master_seed = 99
estimators = ["nonadaptive", "oracle_ls"]
"#,
    )
    .unwrap();
    path
}

#[test]
fn help_exits_zero_and_documents_flags() {
    let out = bin().arg("--help").output().unwrap();
    assert!(out.status.success());
    for sub in ["run", "rip-audit", "demo", "replay"] {
        assert!(String::from_utf8_lossy(&out.stdout).contains(sub));
    }
    let out = bin().args(["run", "--help"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in ["--config", "--out", "--seed", "--threads", "--set"] {
        assert!(text.contains(flag), "missing {flag} in run --help");
    }
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().arg("no-such-subcommand").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // config error: unknown key through --set
    let dir = tmp_dir("usage");
    let cfg = write_small_config(&dir);
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.join("out"))
        .args(["--set", "bogus_key=1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // runtime error: missing config file
    let out = bin()
        .args(["run", "--config", "/nonexistent/nope.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn demo_produces_nonempty_csv() {
    let dir = tmp_dir("demo");
    let out = bin().arg("demo").arg("--out").arg(&dir).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let records = std::fs::read_to_string(dir.join("demo.records.csv")).unwrap();
    assert!(records.lines().count() > 1, "records CSV is header-only");
    assert!(dir.join("demo.summary.csv").exists());
    assert!(dir.join("demo.plot.csv").exists());
}

#[test]
fn rip_audit_identity_reports_zero_delta() {
    let dir = tmp_dir("audit");
    let out = bin()
        .args(["rip-audit", "--kind", "identity_scaled", "--n", "6", "--p", "6", "--s-max", "3"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report = std::fs::read_to_string(dir.join("rip_report.csv")).unwrap();
    for line in report.lines().skip(1) {
        let delta: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(delta.abs() < 1e-12, "identity delta {delta} != 0");
    }
}

#[test]
fn run_outputs_independent_of_threads_and_replayable() {
    let dir = tmp_dir("threads");
    let cfg = write_small_config(&dir);
    let out1 = dir.join("t1");
    let out4 = dir.join("t4");
    for (threads, out) in [("1", &out1), ("4", &out4)] {
        let st = bin()
            .args(["run", "--config"])
            .arg(&cfg)
            .args(["--threads", threads, "--out"])
            .arg(out)
            .output()
            .unwrap();
        assert!(st.status.success(), "stderr: {}", String::from_utf8_lossy(&st.stderr));
    }
    let a = std::fs::read(out1.join("cli_test.records.csv")).unwrap();
    let b = std::fs::read(out4.join("cli_test.records.csv")).unwrap();
    assert_eq!(a, b, "records differ across thread counts");

    // replay row 1 (first data row) and compare l2_error_sq exactly
    let text = String::from_utf8(a).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let (replication, estimator, a_over, l2): (&str, &str, &str, &str) =
        (row[1], row[2], row[7], row[9]);
    let out = bin()
        .args(["replay", "--config"])
        .arg(&cfg)
        .args(["--replication", replication, "--estimator", estimator, "--a-over-astar", a_over])
        .output()
        .unwrap();
    assert!(out.status.success());
    let replay_text = String::from_utf8_lossy(&out.stdout);
    let replay_row = replay_text
        .lines()
        .find(|l| l.starts_with("cli_test,"))
        .expect("replay prints the record row");
    assert_eq!(replay_row.split(',').nth(9).unwrap(), l2, "replayed l2_error_sq differs");
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fdnoma::Error;

fn defaults_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/defaults.toml")
}

fn defaults_with(edit: impl Fn(&str) -> String) -> tempfile::NamedTempFile {
    let text = std::fs::read_to_string(defaults_path()).unwrap();
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(edit(&text).as_bytes()).unwrap();
    f
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdnoma")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn validate_prints_symbols() {
    let o = run(&["--config", defaults_path().to_str().unwrap(), "--validate"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("config_hash"));
    assert!(out.contains("delta_j"));
    assert!(out.contains("all configuration checks passed"));
}

#[test]
fn bad_power_normalisation_is_reported() {
    let f = defaults_with(|t| t.replace("power_coeffs = [0.5, 0.3333333333333333, 0.16666666666666666]", "power_coeffs = [0.5, 0.5, 0.2]"));
    let o = run(&["--config", f.path().to_str().unwrap(), "--validate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("invalid configuration"), "{}", stderr(&o));
}

#[test]
fn infeasible_threshold_is_flagged() {
    let f = defaults_with(|t| t.replace("thresholds = [0.9, 1.5, 2.0]", "thresholds = [1.2, 1.5, 2.0]"));
    let o = run(&["--config", f.path().to_str().unwrap(), "--validate"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(!out.contains("all configuration checks passed"));
    assert!(out.contains("warning: user 1 is always in outage"), "{out}");
    assert!(out.contains("3 warning(s)"));

    let o = run(&["--config", f.path().to_str().unwrap(), "--methods", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let row: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(row[1], "1");
    assert_eq!(row[2], "0");
}

#[test]
fn missing_or_malformed_config_fails() {
    let o = run(&["--config", "/nonexistent/config.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let f = defaults_with(|t| t.replace("num_users = 3", "num_users = \"three\""));
    let o = run(&["--config", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_arguments_fail() {
    let cfg = defaults_path();
    let cfg = cfg.to_str().unwrap();
    for args in [
        vec!["--users", ""],
        vec!["--users", "4"],
        vec!["--methods", "nope"],
        vec!["--sweep", "snr_db=10:0:1"],
        vec!["--sweep", "volume=0:1:1"],
        vec!["--methods", "mc", "--trials", "0"],
    ] {
        let mut full = vec!["--config", cfg];
        full.extend(args.iter());
        let o = run(&full);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn snr_sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = run(&[
        "--config",
        defaults_path().to_str().unwrap(),
        "--sweep",
        "snr_db=0:20:1",
        "--methods",
        "exact,lb",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "x");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 21);
    for l in 1..=3 {
        let e = header.iter().position(|h| *h == format!("user{l}_exact")).unwrap();
        let b = header.iter().position(|h| *h == format!("user{l}_lb")).unwrap();
        for r in &rows {
            assert!(r[b] <= r[e] + 1e-6);
        }
        assert!(rows.windows(2).all(|w| w[1][e] <= w[0][e]));
    }
    assert!(text.starts_with("# tool = fdnoma"));
}

#[test]
fn simulated_columns_carry_standard_errors() {
    let o = run(&[
        "--config",
        defaults_path().to_str().unwrap(),
        "--methods",
        "mc,hd,oma",
        "--users",
        "2",
        "--trials",
        "20000",
        "--partitions",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    for col in ["user2_mc", "user2_mc_stderr", "user2_hd", "user2_hd_stderr", "user2_oma", "user2_oma_stderr", "user2_feasible"] {
        assert!(header.split(',').any(|h| h == col), "{col} missing from {header}");
    }
    assert!(csv.contains("# partitions = 3"));
}

#[test]
fn exit_codes_by_error_kind() {
    assert_eq!(Error::Config(vec!["x".into()]).exit_code(), 1);
    assert_eq!(Error::Argument("x".into()).exit_code(), 1);
    assert_eq!(Error::Cancellation { value: 1.0, magnitude: 1e20, estimated_error: 1.0 }.exit_code(), 2);
    assert_eq!(Error::Invariant("lb above exact".into()).exit_code(), 3);
}

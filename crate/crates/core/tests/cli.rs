use std::path::{Path, PathBuf};
use std::process::Command;

use opo_interference::cli;
use opo_interference::histogram::CoincidenceHistogram;

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["opo-interference"];
    full.extend_from_slice(args);
    cli::run(full)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Value of `key = value` in the first report section that has it.
fn report_value(report: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    let line = report
        .lines()
        .find(|l| l.starts_with(&prefix))
        .unwrap_or_else(|| panic!("no {key}"));
    line[prefix.len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn eval_writes_model_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eval.csv");
    assert_eq!(
        run(&["eval", "--theta-over-pi", "0.5", "--out", path_str(&out)]),
        0
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# theta_over_pi = 0.5\n"));
    assert!(text.contains("# validity teeth_separated = pass"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "tau_ns,gamma0,gamma_approx,gamma_full,gamma_c");
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 590);
    assert!(rows[0].starts_with("18.050000,"));
    assert!(rows.iter().all(|r| r.split(',').count() == 5));
}

#[test]
fn noiseless_eval_output_fits_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.cfg",
        "c1 = 350\nc2 = 120\ntheta_over_pi = 0.25\n",
    );
    let table = dir.path().join("model.csv");
    assert_eq!(
        run(&[
            "eval",
            "--config",
            path_str(&cfg),
            "--out",
            path_str(&table)
        ]),
        0
    );
    let report = dir.path().join("report.txt");
    assert_eq!(
        run(&[
            "fit",
            "--config",
            path_str(&cfg),
            "--out",
            path_str(&report),
            path_str(&table)
        ]),
        0
    );
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(
        (report_value(&text, "c1") / 350.0 - 1.0).abs() < 1e-6,
        "{text}"
    );
    assert!((report_value(&text, "c2") / 120.0 - 1.0).abs() < 1e-6);
    assert!((report_value(&text, "theta_over_pi") / 0.25 - 1.0).abs() < 1e-6);
    assert!(report_value(&text, "residual_sum") < 1e-12);
}

#[test]
fn simulate_header_carries_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "n_events = 20000\nseed = 3\n");
    let out = dir.path().join("h.txt");
    let args = [
        "simulate",
        "--config",
        path_str(&cfg),
        "--seed",
        "11",
        "--theta-over-pi",
        "0.125",
        "--out",
        path_str(&out),
    ];
    assert_eq!(run(&args), 0);
    let h = CoincidenceHistogram::read(&out).unwrap();
    assert_eq!(h.meta("seed"), Some("11"));
    assert_eq!(h.meta("theta_over_pi"), Some("0.125"));
    assert_eq!(h.meta("source"), Some("simulation"));
    assert_eq!(h.meta("tau_r_ns"), Some("2.07"));
    assert_eq!(h.total(), 20000.0);
}

#[test]
fn tagged_inputs_produce_phase_scan() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for j in 0..=8 {
        let out = dir.path().join(format!("scan{j}.txt"));
        let theta = format!("{}", j as f64 / 8.0);
        let seed = format!("{}", 90 + j);
        assert_eq!(
            run(&[
                "simulate",
                "--theta-over-pi",
                &theta,
                "--seed",
                &seed,
                "--out",
                path_str(&out)
            ]),
            0
        );
        files.push(out);
    }
    let report = dir.path().join("scan.txt");
    let mut args = vec!["fit", "--out", path_str(&report)];
    args.extend(files.iter().map(|p| path_str(p)));
    assert_eq!(run(&args), 0);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("[phase scan]"));
    let slope = report_value(&text, "slope");
    assert!((0.95..=1.05).contains(&slope), "slope {slope}");
    let scan_rows = text
        .lines()
        .skip_while(|l| !l.starts_with("theta_set_over_pi"))
        .skip(1)
        .take_while(|l| l.ends_with(",ok"))
        .count();
    assert_eq!(scan_rows, 9);
}

#[test]
fn partial_failure_still_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    assert_eq!(run(&["simulate", "--out", path_str(&good)]), 0);
    let empty = write(dir.path(), "empty.txt", "");
    let report = dir.path().join("r.txt");
    assert_eq!(
        run(&[
            "fit",
            "--out",
            path_str(&report),
            path_str(&good),
            path_str(&empty)
        ]),
        0
    );
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("empty.txt"));
    assert!(text.contains("error = "));
    assert!(!text.contains("[phase scan]"));
}

#[test]
fn bad_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "tau_r_ns = 2.07\nromega = 1\n");
    let out = Command::new(env!("CARGO_BIN_EXE_opo-interference"))
        .args(["eval", "--config", path_str(&cfg)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("romega"), "{err}");
}

#[test]
fn empty_histogram_names_file() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "nothing.txt", "");
    let out = Command::new(env!("CARGO_BIN_EXE_opo-interference"))
        .args(["fit", path_str(&empty)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nothing.txt"));
}

#[test]
fn usage_errors_exit_two() {
    let bin = env!("CARGO_BIN_EXE_opo-interference");
    for args in [
        vec!["fit"],
        vec!["simulate", "--seed", "x"],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = Command::new(bin).args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn domain_error_names_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "neg.cfg", "T_R_ns = -1\n");
    let out = Command::new(env!("CARGO_BIN_EXE_opo-interference"))
        .args(["simulate", "--config", path_str(&cfg)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("T_R_ns"));
}

#[test]
fn stdout_output_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.txt");
    assert_eq!(
        run(&["simulate", "--seed", "5", "--out", path_str(&out)]),
        0
    );
    let piped = Command::new(env!("CARGO_BIN_EXE_opo-interference"))
        .args(["simulate", "--seed", "5", "--workers", "3"])
        .output()
        .unwrap();
    assert!(piped.status.success());
    assert_eq!(piped.stdout, std::fs::read(&out).unwrap());
}

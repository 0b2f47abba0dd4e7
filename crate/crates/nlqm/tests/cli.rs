//! End-to-end tests of the `nlqm` binary: exit codes, artifact files, and
//! output determinism.

use std::path::Path;
use std::process::{Command, Output};

fn nlqm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlqm"))
        .args(args)
        .current_dir(dir)
        .env("NLQM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("write config");
    path
}

const ANALYTIC_CONFIG: &str = r#"
mode = "analytic"

[time]
t_start = -1.0
t_end = 1.0
n_samples = 21

[output]
directory = "out"
formats = ["csv", "json", "svg"]
"#;

#[test]
fn run_analytic_writes_artifacts_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "run.toml", ANALYTIC_CONFIG);
    let out = nlqm(&["run", "run.toml"], tmp.path());
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    for file in [
        "out/trajectory.csv",
        "out/observables.csv",
        "out/drift_report.json",
        "out/gamma_abs.svg",
        "out/tau.svg",
        "out/norm.svg",
        "out/purity.svg",
    ] {
        assert!(tmp.path().join(file).exists(), "missing {file}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("out/drift_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["mode"], "analytic");
    assert_eq!(report["all_pass"], true);
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "run.toml", ANALYTIC_CONFIG);
    nlqm(&["run", "run.toml"], tmp.path());
    let first = std::fs::read(tmp.path().join("out/trajectory.csv")).unwrap();
    nlqm(&["run", "run.toml", "--set", "output.directory=out2"], tmp.path());
    let second = std::fs::read(tmp.path().join("out2/trajectory.csv")).unwrap();
    assert_eq!(first, second, "identical config + seed must give identical bytes");
}

#[test]
fn nonlinear_mode_passes_conservation_checks() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "run.toml",
        r#"
mode = "nonlinear"

[time]
t_start = -2.0
t_end = 2.0
n_samples = 41
"#,
    );
    let out = nlqm(&["run", "run.toml"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("analytic_match"));
    assert!(text.contains("all checks passed"));
}

#[test]
fn orthogonal_initialization_keeps_gamma_zero() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "run.toml",
        r#"
mode = "nonlinear"

[initial]
kind = "exceptional"

[time]
t_start = 0.0
t_end = 2.0
n_samples = 21
"#,
    );
    let out = nlqm(&["run", "run.toml"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("gamma_stays_zero"));
}

#[test]
fn printed_variant_fails_conservation_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "run.toml",
        r#"
mode = "nonlinear"

[integrator]
rhs_variant = "printed"

[time]
t_start = 0.0
t_end = 1.0
n_samples = 11
"#,
    );
    let out = nlqm(&["run", "run.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(1), "printed form must fail conservation");
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    // Unparseable TOML.
    write(tmp.path(), "bad.toml", "mode = [not toml");
    let out = nlqm(&["run", "bad.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));

    // Valid TOML, invalid field value.
    write(tmp.path(), "bad2.toml", "mode = \"warp\"");
    let out = nlqm(&["run", "bad2.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    // Missing file.
    let out = nlqm(&["run", "nope.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn appendix_a_existence_window_violation_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "run.toml",
        r#"
mode = "appendix_a"

[coupling]
a = 0.7
b = 0.5

[time]
t_start = 1.0
t_end = 3.0
n_samples = 11
"#,
    );
    let out = nlqm(&["run", "run.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("norm law"));
}

#[test]
fn appendix_modes_produce_their_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "a.toml",
        r#"
mode = "appendix_a"

[coupling]
a = 0.7
b = -0.5

[time]
t_start = 1.0
t_end = 3.0
n_samples = 21
"#,
    );
    let out = nlqm(&["run", "a.toml"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(tmp.path().join("out/single_trajectory.csv").exists());
    let csv = std::fs::read_to_string(tmp.path().join("out/single_trajectory.csv")).unwrap();
    assert!(csv.lines().next().unwrap().ends_with("norm,norm_law"));

    write(
        tmp.path(),
        "b.toml",
        r#"
mode = "appendix_b"

[coupling]
a = 0.8
b = 0.0

[time]
t_start = 0.0
t_end = 4.0
n_samples = 21

[output]
directory = "out_b"
"#,
    );
    let out = nlqm(&["run", "b.toml"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(tmp.path().join("out_b/trajectory.csv").exists());
}

#[test]
fn run_mode_verify_executes_full_suite() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "v.toml", "mode = \"verify\"\n");
    let out = nlqm(&["run", "v.toml"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("reduced/"));
    assert!(text.contains("spatial/"));
    assert!(text.contains("all checks passed"));
    assert!(tmp.path().join("out/drift_report.json").exists());
}

#[test]
fn verify_reduced_suite_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = nlqm(&["verify", "--suite", "reduced"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("reduced/omega0_identity"));
    assert!(text.contains("all passed"));
}

#[test]
fn compare_analytic_vs_nonlinear_is_tight() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "a.toml",
        "mode = \"analytic\"\n[time]\nt_start = -1.0\nt_end = 1.0\nn_samples = 11\n",
    );
    write(
        tmp.path(),
        "b.toml",
        "mode = \"nonlinear\"\n[time]\nt_start = -1.0\nt_end = 1.0\nn_samples = 11\n",
    );
    let out = nlqm(&["compare", "a.toml", "b.toml", "--field", "psi"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text
        .lines()
        .find(|l| l.starts_with("requested field"))
        .expect("headline line");
    let value: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(value < 1e-6, "analytic vs nonlinear psi deviation {value}");
}

#[test]
fn sweep_runs_grid_cells_into_subdirectories() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "run.toml", ANALYTIC_CONFIG);
    let out = nlqm(
        &[
            "sweep",
            "run.toml",
            "--grid",
            "solution.vartheta=0.1|0.4,coupling.a=0.5:1.5:2",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("4 sweep cells"));
    let entries: Vec<_> = std::fs::read_dir(tmp.path().join("out"))
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with("sweep_"))
        .collect();
    assert_eq!(entries.len(), 4);
    for e in entries {
        assert!(e.path().join("drift_report.json").exists());
    }
}

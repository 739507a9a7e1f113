//! End-to-end tests against the compiled binary: exit codes, exact
//! CSV bytes, layer precedence, manifest replay.

use std::path::Path;
use std::process::{Command, Output};

fn aoi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aoi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["analyze", "--help"][..], &["--version"][..]] {
        let out = aoi(args);
        assert_eq!(code_of(&out), 0, "{args:?}: {}", stderr_of(&out));
        assert!(!stdout_of(&out).is_empty());
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["frobnicate"][..],
        &["analyze", "--no-such-flag"][..],
        &["analyze", "--snr", "3", "--snr-db", "4.77"][..],
        &["sweep", "--preset", "fig3", "--var", "rate"][..],
    ] {
        let out = aoi(args);
        assert_eq!(code_of(&out), 1, "{args:?}");
        assert!(!stderr_of(&out).is_empty(), "{args:?}");
    }
}

#[test]
fn domain_validation_errors_exit_one_and_name_the_parameter() {
    let out = aoi(&["analyze", "--alpha", "480"]);
    assert_eq!(code_of(&out), 1);
    let err = stderr_of(&out);
    assert!(err.contains("alpha"), "{err}");

    let out = aoi(&["simulate", "--forced-error", "1.5"]);
    assert_eq!(code_of(&out), 1);
    assert!(stderr_of(&out).contains("forced_error_rate"), "{}", stderr_of(&out));
}

#[test]
fn missing_files_exit_two_with_the_path() {
    let out = aoi(&["analyze", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(code_of(&out), 2);
    let err = stderr_of(&out);
    assert!(err.contains("/nonexistent/run.cfg"), "{err}");
}

#[test]
fn unknown_config_keys_exit_one_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "sensor_count = 4\n").unwrap();
    let out = aoi(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code_of(&out), 1);
    assert!(stderr_of(&out).contains("sensor_count"), "{}", stderr_of(&out));
}

#[test]
fn flags_override_config_values_across_snr_forms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "snr_db = 10\nsensors = 2\n").unwrap();
    let out = aoi(&["analyze", "--config", cfg.to_str().unwrap(), "--snr", "3"]);
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("sensors=2"), "{text}");
    assert!(text.contains("snr=3"), "{text}");
}

#[test]
fn sweep_stdout_and_file_output_are_identical_bytes() {
    let args = [
        "sweep", "--sensors", "2", "--var", "rate", "--grid", "0.8", "--forced-error", "0.5",
    ];
    let out = aoi(&args);
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let expected = "\
swept_var,value,scheme,blocklength,error_rate,aoi_analytic_slots,aoi_sim_slots,aoi_sim_ci95,seed,flags
coding_rate,0.8,joint,300,0.5,749.5,,,,
coding_rate,0.8,distributed,150,0.5,824.5,,,,
";
    assert_eq!(stdout_of(&out), expected);

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let mut with_out = args.to_vec();
    with_out.extend_from_slice(&["--out", csv.to_str().unwrap()]);
    let out = aoi(&with_out);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).is_empty());
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), expected);
}

#[test]
fn lossless_short_run_prints_the_exact_ramp_average() {
    let out = aoi(&[
        "simulate", "--sensors", "1", "--bits-per-sensor", "80", "--forced-error", "0",
        "--frames", "100", "--scheme", "joint",
    ]);
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("analytic_aoi_slots=149.5"), "{text}");
    assert!(text.contains("sim_aoi_slots=149.5"), "{text}");
}

#[test]
fn optimizer_warns_on_stderr_when_the_minimum_hits_the_range_edge() {
    let out = aoi(&["optimize", "--m-from", "480", "--m-to", "500"]);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains(" at_boundary"), "{}", stdout_of(&out));
    assert!(
        stderr_of(&out).contains("minimum at range boundary"),
        "{}",
        stderr_of(&out)
    );
}

#[test]
fn compare_reports_threshold_and_exact_crossover() {
    let out = aoi(&["compare"]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("alpha_0_bits=114.721938942"), "{text}");
    assert!(text.contains("crossover_bits=114.5"), "{text}");
}

fn read_bytes(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn manifest_replay_reproduces_simulated_sweeps_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("run.json");
    let first_csv = dir.path().join("first.csv");
    let replay_csv = dir.path().join("replay.csv");

    let out = aoi(&[
        "sweep", "--var", "rate", "--grid", "0.7,0.8", "--sim", "--frames", "300",
        "--replications", "2", "--seed", "3",
        "--manifest-out", manifest.to_str().unwrap(),
        "--out", first_csv.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let manifest_text = std::fs::read_to_string(&manifest).unwrap();
    assert!(manifest_text.contains("\"command\": \"sweep\""), "{manifest_text}");

    let out = aoi(&[
        "sweep", "--from-manifest", manifest.to_str().unwrap(),
        "--out", replay_csv.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    assert_eq!(read_bytes(&first_csv), read_bytes(&replay_csv));
    // The sweep actually simulated: sim columns are non-empty.
    let body = std::fs::read_to_string(&first_csv).unwrap();
    let row = body.lines().nth(1).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    assert!(!cells[6].is_empty() && !cells[8].is_empty(), "{row}");
}

#[test]
fn manifests_replay_only_their_own_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("run.json");
    let out = aoi(&["analyze", "--manifest-out", manifest.to_str().unwrap()]);
    assert_eq!(code_of(&out), 0);
    let out = aoi(&["optimize", "--from-manifest", manifest.to_str().unwrap()]);
    assert_eq!(code_of(&out), 1);
    assert!(stderr_of(&out).contains("analyze"), "{}", stderr_of(&out));
}

#[test]
fn closed_stdout_pipe_ends_the_run_quietly() {
    use std::io::Read;
    use std::process::Stdio;
    // A grid large enough that the CSV cannot fit in the pipe buffer.
    let mut child = Command::new(env!("CARGO_BIN_EXE_aoi"))
        .args([
            "sweep", "--var", "blocklength", "--grid-from", "100", "--grid-to", "50000",
            "--grid-step", "1",
        ])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut head = [0u8; 16];
    child.stdout.take().unwrap().read_exact(&mut head).unwrap();
    // The reader is gone; the writer must treat it as a normal end.
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stderr.is_empty(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(head.starts_with(b"swept_var"));
}

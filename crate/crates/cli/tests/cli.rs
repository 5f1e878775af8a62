//! End-to-end tests of the `coopsim` binary: command output, config
//! validation, exit codes and output determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn coopsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopsim"))
        .args(args)
        .env_remove("COOPSIM_SEED")
        .output()
        .expect("binary runs")
}

fn coopsim_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopsim"))
        .args(args)
        .env_remove("COOPSIM_SEED")
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

const RUN_CONFIG: &str = "\
[game]
strategy = \"KS\"
b = 4.0
c = 2.0
x = 0.75

[population]
size = 20
ipc = 0.5
icpc = 0.65
icpd = 0.35

[tuning]
rule = \"sf\"

[run]
iterations = 10
seed = 7
";

const SWEEP_CONFIG: &str = "\
[game]
strategy = \"DR\"
b = 4.0
c = 2.0

[population]
size = 10
ipc = 0.5
icpc = 0.65
icpd = 0.35

[tuning]
rule = \"sp\"

[run]
iterations = 60
seed = 3

[sweep]
x_lo = 0.1
x_hi = 0.9
x_step = 0.2
repetitions = 2
";

fn write_config(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn thresholds_prints_the_three_values() {
    let output = coopsim(&["thresholds", "DR", "4", "2"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout(&output);
    assert!(text.contains("ess: 0.5"), "{text}");
    assert!(text.contains("rd: 0.6666666666666666"), "{text}");
    assert!(text.contains("ad: 0.75"), "{text}");
}

#[test]
fn thresholds_for_kin_selection_coincide() {
    let output = coopsim(&["thresholds", "KS", "4", "2"]);
    let text = stdout(&output);
    assert!(text.contains("ess: 0.5"));
    assert!(text.contains("rd: 0.5"));
    assert!(text.contains("ad: 0.5"));
}

#[test]
fn unreachable_thresholds_exit_with_config_error() {
    let output = coopsim(&["thresholds", "KS", "2", "4"]);
    assert_eq!(exit_code(&output), 2);
    let text = stderr(&output);
    assert!(text.contains("unreachable"), "{text}");
    assert!(text.contains("ess requires x = 2"), "{text}");
}

#[test]
fn classify_names_the_game() {
    let output = coopsim(&["classify", "KS", "4", "2", "0.25"]);
    assert_eq!(exit_code(&output), 0);
    assert!(stdout(&output).contains("class: PrisonersDilemma"));

    let output = coopsim(&["classify", "IR", "4", "2", "1.0"]);
    assert!(stdout(&output).contains("class: UnidentifiedOnlyMutual"));

    let output = coopsim(&["classify", "DR", "4", "2", "0.5"]);
    let text = stdout(&output);
    assert!(text.contains("class: Boundary (R=T)"), "{text}");
}

#[test]
fn classify_rejects_invalid_specs() {
    let output = coopsim(&["classify", "DR", "4", "2", "1.0"]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr(&output).contains("w < 1"));
}

#[test]
fn run_writes_the_series_and_a_summary() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "run.toml", RUN_CONFIG);
    let out = dir.path().join("series.csv");
    let output = coopsim(&["run", config.to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tick,cooperator_fraction");
    // Initial fraction plus one row per tick, then the summary line.
    assert_eq!(lines.len(), 1 + 11 + 1);
    assert!(lines.last().unwrap().starts_with("# tail_mean="));
}

#[test]
fn run_rejects_direct_reciprocity_at_w_one() {
    let dir = TempDir::new().unwrap();
    let bad = RUN_CONFIG.replace("\"KS\"", "\"DR\"").replace("x = 0.75", "x = 1.0");
    let config = write_config(&dir, "bad.toml", &bad);
    let out = dir.path().join("series.csv");
    let output = coopsim(&["run", config.to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 2);
    let text = stderr(&output);
    assert!(text.contains("[game]"), "{text}");
    assert!(text.contains("w < 1"), "{text}");
    assert!(!out.exists());
}

#[test]
fn unknown_config_keys_are_rejected_with_line_numbers() {
    let dir = TempDir::new().unwrap();
    let bad = RUN_CONFIG.replace("icpd", "icpdd");
    let config = write_config(&dir, "typo.toml", &bad);
    let out = dir.path().join("series.csv");
    let output = coopsim(&["run", config.to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 2);
    let text = stderr(&output);
    assert!(text.contains("icpdd"), "{text}");
    assert!(text.contains("line"), "{text}");
}

#[test]
fn missing_config_file_is_a_config_error() {
    let output = coopsim(&["run", "/no/such/config.toml", "/tmp/out.csv"]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "run.toml", RUN_CONFIG);
    let out = dir.path().join("no/such/dir/out.csv");
    let output = coopsim(&["run", config.to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 3);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "run.toml", RUN_CONFIG);
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    coopsim(&["run", config.to_str().unwrap(), out_a.to_str().unwrap()]);
    coopsim(&["run", config.to_str().unwrap(), out_b.to_str().unwrap()]);
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
}

#[test]
fn seed_flag_changes_the_series_seed() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "run.toml", RUN_CONFIG);
    let out = dir.path().join("seeded.csv");
    coopsim(&["run", config.to_str().unwrap(), out.to_str().unwrap(), "--seed", "99"]);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("seed=99"), "{text}");
}

#[test]
fn env_seed_is_the_fallback() {
    let dir = TempDir::new().unwrap();
    let no_seed = RUN_CONFIG.replace("seed = 7\n", "");
    let config = write_config(&dir, "run.toml", &no_seed);
    let out = dir.path().join("env.csv");
    let output = coopsim_with_env(
        &["run", config.to_str().unwrap(), out.to_str().unwrap()],
        "COOPSIM_SEED",
        "1234",
    );
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    assert!(fs::read_to_string(&out).unwrap().contains("seed=1234"));

    let output = coopsim_with_env(
        &["run", config.to_str().unwrap(), out.to_str().unwrap()],
        "COOPSIM_SEED",
        "not-a-number",
    );
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn sweep_from_config_is_deterministic_and_sorted() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "sweep.toml", SWEEP_CONFIG);
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let output = coopsim(&["sweep", config.to_str().unwrap(), out_a.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    coopsim(&["sweep", config.to_str().unwrap(), out_b.to_str().unwrap()]);
    let bytes_a = fs::read(&out_a).unwrap();
    assert_eq!(bytes_a, fs::read(&out_b).unwrap());

    let text = String::from_utf8(bytes_a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "strategy,x,seed,tail_mean,final_fraction,status");
    // 5 grid points x 2 repetitions, comment + header on top.
    assert_eq!(lines.len(), 2 + 10);
    let xs: Vec<&str> = lines[2..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    let mut sorted = xs.clone();
    sorted.sort_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()));
    assert_eq!(xs, sorted);
}

#[test]
fn sweep_jobs_do_not_change_the_output() {
    let dir = TempDir::new().unwrap();
    let config = write_config(&dir, "sweep.toml", SWEEP_CONFIG);
    let serial = dir.path().join("serial.csv");
    let parallel = dir.path().join("parallel.csv");
    coopsim(&["sweep", config.to_str().unwrap(), serial.to_str().unwrap(), "--jobs", "1"]);
    coopsim(&["sweep", config.to_str().unwrap(), parallel.to_str().unwrap(), "--jobs", "8"]);
    assert_eq!(fs::read(&serial).unwrap(), fs::read(&parallel).unwrap());
}

#[test]
fn named_sweep_emits_the_extended_schema_and_plot_data() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("behavior.csv");
    let plot = dir.path().join("plot.csv");
    let output = coopsim(&[
        "sweep",
        "behavior",
        "KS",
        out.to_str().unwrap(),
        "--iterations",
        "50",
        "--seed",
        "11",
        "--plot-data",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));

    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# experiment=behavior strategy=KS base_seed=11"));
    assert_eq!(
        lines[1],
        "strategy,x,seed,tail_mean,final_fraction,status,population,ipc,icpc,icpd,tc,rep"
    );
    // 50 grid points x 10 repetitions.
    assert_eq!(lines.len(), 2 + 500);

    let plot_text = fs::read_to_string(&plot).unwrap();
    let plot_lines: Vec<&str> = plot_text.lines().collect();
    assert_eq!(plot_lines[0], "x,mean_tail");
    assert_eq!(plot_lines.len(), 1 + 50);
}

#[test]
fn named_sweep_without_strategy_is_an_error() {
    let output = coopsim(&["sweep", "behavior", "/tmp/out.csv"]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr(&output).contains("needs a strategy"));
}

#[test]
fn unknown_sweep_target_is_an_error() {
    let output = coopsim(&["sweep", "not-an-experiment", "KS", "/tmp/out.csv"]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn failed_cells_are_reported_not_dropped() {
    // icpc = 0.5 appears verbatim in the indirect-reciprocity
    // initial-probabilities schedule and fails validation; its rows must
    // show up with an error status.
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ip.csv");
    let output = coopsim(&[
        "sweep",
        "initial-probabilities",
        "IR",
        out.to_str().unwrap(),
        "--iterations",
        "5",
        "--seed",
        "1",
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2 + 1280);
    let failed = lines.iter().filter(|l| l.contains("error:")).count();
    // Only the icpc = 0.5 slab is out of range (icpd = 0.5 is allowed):
    // 1 icpc value x 8 icpd values x 20 x points.
    assert_eq!(failed, 160);
    for line in lines.iter().filter(|l| l.contains("error:")) {
        assert!(line.contains("NaN"), "{line}");
        assert!(line.contains("icpc"), "{line}");
    }
}

#[test]
fn not_a_config_path_mentions_both_usages() {
    let output = coopsim(&["sweep", Path::new("/definitely/missing.toml").to_str().unwrap(), "out.csv"]);
    assert_eq!(exit_code(&output), 2);
}

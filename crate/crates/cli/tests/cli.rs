//! End-to-end tests of the command-line interface through the compiled
//! binary: output contracts, exit codes, determinism, and seed resolution.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tracecrit::simulate::TruthModel;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tracecrit"))
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

fn stderr_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stderr).unwrap_or_else(|e| {
        panic!(
            "stderr is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stderr)
        )
    })
}

/// Write a synthetic dataset as a headered CSV.
fn write_model_csv(path: &Path, model: &TruthModel, n_obs: usize, seed: u64) {
    let data = model.generate(n_obs, seed).expect("generation succeeds");
    let p = data.n_variables();
    let mut text = (0..p)
        .map(|j| format!("v{j}"))
        .collect::<Vec<_>>()
        .join(",");
    text.push('\n');
    for i in 0..data.n_observations() {
        let row = (0..p)
            .map(|j| data.values()[[i, j]].to_string())
            .collect::<Vec<_>>()
            .join(",");
        text.push_str(&row);
        text.push('\n');
    }
    fs::write(path, text).expect("write csv");
}

#[test]
fn test_subcommand_emits_valid_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("null.csv");
    write_model_csv(
        &data,
        &TruthModel::null_identity(2, 10).unwrap(),
        51,
        1,
    );
    let output = run(binary().args(["test", "--data", data.to_str().unwrap(), "--p1", "2"]));
    assert!(output.status.success(), "{output:?}");
    let payload = stdout_json(&output);
    let outcome = &payload["outcome"];
    assert_eq!(outcome["method"], "tn");
    let statistic = outcome["statistic"].as_f64().unwrap();
    assert!(statistic.is_finite());
    let p_value = outcome["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p_value));
    assert!(outcome["reject"].is_boolean());
    assert_eq!(payload["manifest"]["subcommand"], "test");
}

#[test]
fn test_subcommand_rejects_block_covering_all_columns() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("m.csv");
    write_model_csv(&data, &TruthModel::null_identity(6, 6).unwrap(), 20, 2);
    let output = run(binary().args(["test", "--data", data.to_str().unwrap(), "--p1", "12"]));
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    assert_eq!(stderr_json(&output)["error"]["kind"], "invalid_block_spec");
}

#[test]
fn test_subcommand_surfaces_unavailable_statistic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("short.csv");
    // Three observations give n = 2 degrees of freedom; the determinant
    // ratio needs p1 + p2 < n.
    write_model_csv(&data, &TruthModel::null_identity(2, 2).unwrap(), 3, 3);
    let output = run(binary().args([
        "test",
        "--data",
        data.to_str().unwrap(),
        "--p1",
        "2",
        "--method",
        "perm-wilks",
    ]));
    assert_eq!(output.status.code(), Some(4), "{output:?}");
    let error = stderr_json(&output);
    assert_eq!(error["error"]["kind"], "statistic_unavailable");
    assert!(error["error"]["message"]
        .as_str()
        .unwrap()
        .contains("p1 + p2 < n"));
}

#[test]
fn test_subcommand_surfaces_degenerate_variance() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("const.csv");
    fs::write(&data, "a,b\n1,2\n1,3\n1,4\n1,5\n1,6\n").unwrap();
    let output = run(binary().args(["test", "--data", data.to_str().unwrap(), "--p1", "1"]));
    assert_eq!(output.status.code(), Some(4), "{output:?}");
    assert_eq!(stderr_json(&output)["error"]["kind"], "degenerate_variance");
}

#[test]
fn permutation_outcome_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("m.csv");
    write_model_csv(&data, &TruthModel::mixture(2, 6, 0.8).unwrap(), 30, 4);
    let args = [
        "test",
        "--data",
        data.to_str().unwrap(),
        "--p1",
        "2",
        "--method",
        "perm-c2",
        "--permutations",
        "99",
        "--seed",
        "11",
    ];
    let first = run(binary().args(args));
    let second = run(binary().args(args));
    assert!(first.status.success());
    assert_eq!(
        stdout_json(&first)["outcome"],
        stdout_json(&second)["outcome"]
    );
}

#[test]
fn seed_resolution_prefers_flag_over_environment() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("m.csv");
    write_model_csv(&data, &TruthModel::null_identity(2, 4).unwrap(), 20, 5);
    let base = ["test", "--data", data.to_str().unwrap(), "--p1", "2"];

    let env_only = run(binary().args(base).env("TRACECRIT_SEED", "42"));
    assert_eq!(stdout_json(&env_only)["manifest"]["seed"], 42);

    let with_flag = run(binary()
        .args(base)
        .args(["--seed", "5"])
        .env("TRACECRIT_SEED", "42"));
    assert_eq!(stdout_json(&with_flag)["manifest"]["seed"], 5);

    let neither = run(binary().args(base));
    assert_eq!(stdout_json(&neither)["manifest"]["seed"], 0);
}

#[test]
fn simulate_writes_reports_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let output = run(binary().args([
            "simulate",
            "--model",
            "mixture",
            "--p1",
            "2",
            "--p2",
            "6",
            "--n",
            "20",
            "--reps",
            "120",
            "--methods",
            "tn,perm-c2",
            "--permutations",
            "99",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]));
        assert!(output.status.success(), "{output:?}");
        let files = stdout_json(&output)["files"].as_array().unwrap().len();
        assert_eq!(files, 3);
    }
    for name in ["report.csv", "report.json"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    let csv = fs::read_to_string(out_a.join("report.csv")).unwrap();
    assert!(csv.starts_with("method,grid_value,rejections,replications,proportion,std_error"));
    assert!(out_a.join("manifest.json").exists());
}

#[test]
fn simulate_rejects_tiny_replication_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(binary().args([
        "simulate",
        "--reps",
        "50",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn simulate_config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = dir.path().join("config.json");
    fs::write(
        &config,
        serde_json::to_string(&serde_json::json!({
            "model": {"kind": "mixture", "p1": 2, "p2": 5, "gamma": 0.7},
            "sample_size": 21,
            "replications": 150,
            "alpha": 0.05,
            "seed": 13,
            "methods": ["tn"],
            "permutations": 199,
        }))
        .unwrap(),
    )
    .unwrap();
    let output = run(binary().args([
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    assert!(output.status.success(), "{output:?}");
    assert_eq!(stdout_json(&output)["manifest"]["seed"], 13);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report[0]["cells"][0]["method"], "tn");
    assert_eq!(report[0]["cells"][0]["replications"], 150);
}

#[test]
fn psi_check_validates_minimum_draws_and_handles_smallest_n() {
    let too_few = run(binary().args(["psi-check", "--reps", "10"]));
    assert_eq!(too_few.status.code(), Some(2), "{too_few:?}");

    let smallest = run(binary().args(["psi-check", "--n", "2", "--reps", "10000", "--seed", "1"]));
    assert!(smallest.status.success(), "{smallest:?}");
    let payload = stdout_json(&smallest);
    assert_eq!(payload["report"]["all_pass"], true);
    assert_eq!(payload["report"]["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn pairwise_scores_a_planted_dependency() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("pairs.csv");
    // Strong coupling between the two 2-wide groups.
    write_model_csv(&data, &TruthModel::mixture(2, 2, 1.5).unwrap(), 40, 6);
    let layout = dir.path().join("layout.csv");
    fs::write(&layout, "name,width\nleft,2\nright,2\n").unwrap();
    let truth = dir.path().join("truth.csv");
    fs::write(&truth, "src,dst\nleft,right\n").unwrap();

    let output = run(binary().args([
        "pairwise",
        "--data",
        data.to_str().unwrap(),
        "--layout",
        layout.to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
        "--permutations",
        "99",
        "--seed",
        "3",
    ]));
    assert!(output.status.success(), "{output:?}");
    let payload = stdout_json(&output);
    assert_eq!(payload["f_score"]["f1"], 1.0);
    assert_eq!(payload["screening"]["pair_count"], 1);
    let summary = String::from_utf8_lossy(&output.stderr);
    assert!(summary.contains("P=1.000, R=1.000, F=1.000"), "{summary}");
}

#[test]
fn table1_preset_writes_the_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(binary().args([
        "simulate",
        "--table1",
        "--reps",
        "100",
        "--seed",
        "9",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    assert!(output.status.success(), "{output:?}");
    let csv = fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 28, "header plus 27 method cells");
    assert_eq!(
        lines[0],
        "p1,p2,method,rejections,replications,proportion,std_error,note"
    );
    // Narrow cells carry all three tests, wide cells only the standardized
    // statistic.
    assert_eq!(
        csv.lines().filter(|l| l.contains("perm-wilks")).count(),
        6
    );
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn preset_conflicts_with_design_flags() {
    let output = run(binary().args(["simulate", "--table1", "--model", "mixture"]));
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

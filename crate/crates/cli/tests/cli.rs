//! End-to-end tests that spawn the real binary against JSON configs on disk.

use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_subshift");

struct Run {
    exit: i32,
    stdout: String,
    stderr: String,
}

fn run_with(subcommand: &str, config: &Value, extra: &[&str]) -> Run {
    let dir = TempDir::new().expect("temp dir");
    let path = dir.path().join("config.json");
    std::fs::write(&path, serde_json::to_string(config).unwrap()).expect("write config");
    run_at(subcommand, &path, extra)
}

fn run_at(subcommand: &str, config_path: &Path, extra: &[&str]) -> Run {
    let output = Command::new(BIN)
        .arg(subcommand)
        .arg("--config")
        .arg(config_path)
        .args(extra)
        .output()
        .expect("binary runs");
    Run {
        exit: output.status.code().expect("no signal"),
        stdout: String::from_utf8(output.stdout).expect("utf8"),
        stderr: String::from_utf8(output.stderr).expect("utf8"),
    }
}

fn step_forward_operator() -> Value {
    json!({
        "kind": "bilateral-forward",
        "weights": { "rule": { "type": "step", "pos": 0.5, "neg": 2.0 }, "domain": "bilateral" }
    })
}

fn evens() -> Value {
    json!({ "modulus": 2, "residues": [0], "domain": "bilateral" })
}

fn eq65_config() -> Value {
    json!({
        "schema_version": 1,
        "check": {
            "kind": "eq65",
            "params": {
                "operator": step_forward_operator(),
                "space": evens(),
                "base": 0,
                "schedule": { "form": "arithmetic", "stride": 2, "count": 32 }
            }
        }
    })
}

#[test]
fn satisfied_check_exits_zero() {
    let run = run_with("check", &eq65_config(), &[]);
    assert_eq!(run.exit, 0, "stdout: {}", run.stdout);
    assert!(run.stdout.contains("satisfied-at-horizon"));
    assert!(run.stdout.contains("invertibility: ok"));
}

#[test]
fn json_report_carries_the_full_verdict() {
    let run = run_with("check", &eq65_config(), &["--json"]);
    assert_eq!(run.exit, 0);
    let report: Value = serde_json::from_str(&run.stdout).expect("json report");
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["kind"], "eq65");
    assert_eq!(report["status"], "satisfied-at-horizon");
    assert_eq!(report["exit_code"], 0);
    assert_eq!(report["verdict"]["status"], "satisfied-at-horizon");
    assert_eq!(report["verdict"]["horizon"], 32);
    assert_eq!(report["invertibility"]["invertible"], true);
}

#[test]
fn trace_csv_matches_the_known_decay() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("config.json");
    let csv = dir.path().join("trace.csv");
    std::fs::write(&config, serde_json::to_string(&eq65_config()).unwrap()).unwrap();
    let run = run_at("check", &config, &["--trace-csv", csv.to_str().unwrap()]);
    assert_eq!(run.exit, 0);
    let body = std::fs::read_to_string(&csv).expect("csv written");
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "k,n_k,trace_plus,trace_minus");
    assert_eq!(lines.len(), 33);
    // Both sides decay at 2^{-n}; row k has n_k = 2k and log value -2k ln 2.
    assert_eq!(
        lines[1],
        "1,2,-1.3862943611198906,-1.3862943611198906"
    );
    assert_eq!(
        lines[32],
        "32,64,-44.36141955583649,-44.36141955583649"
    );
}

#[test]
fn flat_weight_check_is_a_decisive_failure() {
    // Constant weight 1 keeps every product at 1, so the blow-up the
    // criterion demands provably never happens.
    let config = json!({
        "schema_version": 1,
        "check": {
            "kind": "unilateral",
            "params": {
                "operator": {
                    "kind": "unilateral-backward",
                    "weights": {
                        "rule": { "type": "constant", "value": 1.0 },
                        "domain": "unilateral"
                    }
                },
                "space": { "modulus": 2, "residues": [0], "domain": "unilateral" },
                "base": 0,
                "horizon": 24
            }
        }
    });
    let run = run_with("check", &config, &[]);
    assert_eq!(run.exit, 2, "stdout: {}", run.stdout);
    assert!(run.stdout.contains("violated-at-horizon"));
}

#[test]
fn malformed_json_exits_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ \"schema_version\": 1,").unwrap();
    let run = run_at("check", &path, &[]);
    assert_eq!(run.exit, 1);
    assert!(run.stdout.contains("config error"));
}

#[test]
fn unknown_top_level_field_is_rejected() {
    let mut config = eq65_config();
    config["extra"] = json!(true);
    let run = run_with("check", &config, &[]);
    assert_eq!(run.exit, 1);
    assert!(run.stdout.contains("extra"));
}

#[test]
fn unknown_field_inside_params_is_rejected() {
    let mut config = eq65_config();
    config["check"]["params"]["typo"] = json!(1);
    let run = run_with("check", &config, &[]);
    assert_eq!(run.exit, 1);
    assert!(run.stdout.contains("typo"));
}

#[test]
fn future_schema_version_is_an_error() {
    let mut config = eq65_config();
    config["schema_version"] = json!(2);
    let run = run_with("check", &config, &[]);
    assert_eq!(run.exit, 1);
    assert!(run.stdout.contains("schema_version 2 not supported"));
}

#[test]
fn missing_config_file_exits_one() {
    let run = run_at("check", Path::new("/nonexistent/config.json"), &[]);
    assert_eq!(run.exit, 1);
    assert!(run.stderr.contains("cannot read"));
}

#[test]
fn simulate_reports_every_target_hit() {
    let config = json!({
        "schema_version": 1,
        "simulate": {
            "operator": step_forward_operator(),
            "space": evens(),
            "epsilon": 0.1,
            "n_iter": 500,
            "window": { "lo": -64, "hi": 64 },
            "grid": [
                [ { "index": 0, "coef": 1.0 } ],
                [ { "index": 2, "coef": 1.0 } ]
            ],
            "schedule": { "form": "arithmetic", "stride": 2, "count": 32 }
        }
    });
    let run = run_with("simulate", &config, &["--json"]);
    assert_eq!(run.exit, 0, "stdout: {}", run.stdout);
    let report: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(report["density"]["hit_rate"], 1.0);
    assert_eq!(report["placements"], json!([6, 16]));
    assert_eq!(report["density"]["targets"][0]["first_hit_power"], 6);
}

#[test]
fn simulate_csv_lists_per_target_outcomes() {
    let dir = TempDir::new().unwrap();
    let config_path = dir.path().join("config.json");
    let csv = dir.path().join("density.csv");
    // Shifting e_{-6} six places multiplies by 2^6, so this vector lands
    // within 2^{-6} of e_0 at power 6.
    let config = json!({
        "schema_version": 1,
        "simulate": {
            "operator": step_forward_operator(),
            "space": evens(),
            "epsilon": 0.1,
            "n_iter": 200,
            "window": { "lo": -64, "hi": 64 },
            "vector": [ { "index": -6, "coef": 0.015625 }, { "index": 0, "coef": 1.0 } ],
            "grid": [ [ { "index": 0, "coef": 1.0 } ] ]
        }
    });
    std::fs::write(&config_path, serde_json::to_string(&config).unwrap()).unwrap();
    let run = run_at("simulate", &config_path, &["--trace-csv", csv.to_str().unwrap()]);
    assert_eq!(run.exit, 0, "stdout: {}", run.stdout);
    let body = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(
        lines[0],
        "target,hit,first_hit_power,achieved_distance,best_distance"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0,true,"));
}

#[test]
fn simulate_with_default_grid_builds_a_vector_and_hits_everything() {
    // No vector and no grid: the grid is derived from the subspace (units and
    // pair combinations for the first four members) and the starting vector
    // is built greedily against it.
    let config = json!({
        "schema_version": 1,
        "simulate": {
            "operator": {
                "kind": "unilateral-backward",
                "weights": { "rule": { "type": "constant", "value": 2.0 }, "domain": "unilateral" }
            },
            "space": { "modulus": 2, "residues": [1], "domain": "unilateral" },
            "epsilon": 0.01,
            "n_iter": 256,
            "window": { "lo": 0, "hi": 256 },
            "schedule": { "form": "arithmetic", "stride": 2, "count": 128 }
        }
    });
    let run = run_with("simulate", &config, &["--json"]);
    assert_eq!(run.exit, 0, "stdout: {}", run.stdout);
    let report: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(report["density"]["hit_rate"], 1.0);
    // Four members seed the default grid: eight unit targets plus six
    // normalized pair targets.
    assert_eq!(report["density"]["targets"].as_array().unwrap().len(), 14);
}

#[test]
fn simulate_without_vector_or_schedule_is_a_config_error() {
    let config = json!({
        "schema_version": 1,
        "simulate": {
            "operator": step_forward_operator(),
            "space": evens(),
            "epsilon": 0.1,
            "n_iter": 100,
            "window": { "lo": -8, "hi": 8 }
        }
    });
    let run = run_with("simulate", &config, &[]);
    assert_eq!(run.exit, 1);
    assert!(run.stdout.contains("schedule"));
}

#[test]
fn simulate_with_support_outside_the_window_exits_one() {
    let config = json!({
        "schema_version": 1,
        "simulate": {
            "operator": step_forward_operator(),
            "space": evens(),
            "epsilon": 0.1,
            "n_iter": 100,
            "window": { "lo": -4, "hi": 4 },
            "vector": [ { "index": 100, "coef": 1.0 } ],
            "grid": [ [ { "index": 0, "coef": 1.0 } ] ]
        }
    });
    let run = run_with("simulate", &config, &[]);
    assert_eq!(run.exit, 1, "stdout: {}", run.stdout);
}

#[test]
fn refused_vector_build_reports_the_failed_verdict() {
    // Flat weights never satisfy the decay precheck, so the build is refused.
    let config = json!({
        "schema_version": 1,
        "simulate": {
            "operator": {
                "kind": "bilateral-forward",
                "weights": { "rule": { "type": "constant", "value": 1.0 }, "domain": "bilateral" }
            },
            "space": evens(),
            "epsilon": 0.1,
            "n_iter": 100,
            "window": { "lo": -32, "hi": 32 },
            "schedule": { "form": "arithmetic", "stride": 2, "count": 32 }
        }
    });
    let run = run_with("simulate", &config, &["--json"]);
    assert_eq!(run.exit, 2, "stdout: {}", run.stdout);
    let report: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(report["exit_code"], 2);
    assert_eq!(report["verdict"]["status"], "violated-at-horizon");
}

#[test]
fn construct_validates_a_plain_family() {
    let config = json!({
        "schema_version": 1,
        "construct": {
            "family": "constant",
            "params": { "value": 2.0 }
        }
    });
    let run = run_with("construct", &config, &["--json"]);
    assert_eq!(run.exit, 0, "stdout: {}", run.stdout);
    let report: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(report["weights"]["rule"]["type"], "constant");
    assert_eq!(report["weights"]["domain"], "bilateral");
}

#[test]
fn construct_rejects_non_increasing_blocks() {
    let config = json!({
        "schema_version": 1,
        "construct": {
            "family": "block_interleaved",
            "params": { "low": 0.5, "high": 2.0, "block_lengths": [4, 4] }
        }
    });
    let run = run_with("construct", &config, &[]);
    assert_eq!(run.exit, 1, "stdout: {}", run.stdout);
}

#[test]
fn failed_construction_exits_two_with_both_verdicts() {
    // A single length-1 block leaves one-point schedules: inconclusive on
    // both sides, so the self-check refuses the construction.
    let config = json!({
        "schema_version": 1,
        "construct": {
            "family": "herrero",
            "params": { "low": 0.5, "high": 2.0, "lengths": [1], "p": 2 }
        }
    });
    let run = run_with("construct", &config, &["--json"]);
    assert_eq!(run.exit, 2, "stdout: {}", run.stdout);
    let report: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(report["forward_verdict"]["status"], "inconclusive");
    assert_eq!(report["backward_verdict"]["status"], "inconclusive");
}

#[test]
fn construction_replays_bit_for_bit_through_check() {
    let config = json!({
        "schema_version": 1,
        "construct": {
            "family": "herrero",
            "params": { "low": 0.5, "high": 2.0, "lengths": [2, 4, 8, 16, 32], "p": 2 }
        }
    });
    let run = run_with("construct", &config, &["--json"]);
    assert_eq!(run.exit, 0, "stdout: {}", run.stdout);
    let report: Value = serde_json::from_str(&run.stdout).unwrap();

    let dir = TempDir::new().unwrap();
    for (embedded, expected) in [
        ("forward_check", "forward_verdict"),
        ("backward_check", "backward_verdict"),
    ] {
        let path = dir.path().join(format!("{embedded}.json"));
        std::fs::write(&path, serde_json::to_string(&report[embedded]).unwrap()).unwrap();
        let replay = run_at("check", &path, &["--json"]);
        assert_eq!(replay.exit, 0, "{embedded} stdout: {}", replay.stdout);
        let replay_report: Value = serde_json::from_str(&replay.stdout).unwrap();
        // The embedded config must reproduce the bundled verdict exactly,
        // including every floating-point digit of every trace point.
        assert_eq!(
            replay_report["verdict"], report["bundle"][expected],
            "{embedded} drifted from the bundled verdict"
        );
    }
}

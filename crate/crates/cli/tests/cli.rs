// Copyright 2026 The ht-secrecy Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ht_secrecy_cli::commands::{EvaluateSummary, RegionSummary, SimulateSummary};
use ht_secrecy_cli::{cmd_evaluate, cmd_region, cmd_simulate, load_config, parse_config};
use ht_secrecy_core::region::{Baseline, SolveStatus};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ht-secrecy-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, file: &str, text: &str) -> PathBuf {
    let p = dir.join(file);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ht-secrecy"))
        .args(args)
        .output()
        .unwrap()
}

const SMALL_REGION: &str = r#"{
  "model": {
    "x_size": 2, "y_size": 3, "z_size": 2,
    "px": ["4/5", "1/5"],
    "pyx": [["3/5", "0", "2/5"], ["0", "3/5", "2/5"]],
    "eve_mode": "marginal",
    "pzx_h0": [["4/5", "1/5"], ["1/5", "4/5"]],
    "qzx_h1": [["7/10", "3/10"], ["3/10", "7/10"]]
  },
  "region": { "rates": [RATES], "delta0": DELTA0, "delta1": 0.13, "epsilon": 0.2 }
}"#;

fn small_region(rates: &str, delta0: &str) -> String {
    SMALL_REGION
        .replace("RATES", rates)
        .replace("DELTA0", delta0)
}

#[test]
fn evaluate_identity_and_constant_aux() {
    let dir = scratch("evaluate");
    let cfg = load_config(&configs().join("example_fig2.json")).unwrap();

    let id = write(&dir, "id.json", r#"[["1","0"],["0","1"]]"#);
    let s: EvaluateSummary = serde_json::from_str(&cmd_evaluate(&cfg, &id).unwrap().json).unwrap();
    assert!((s.point.rate_needed - 0.72193).abs() < 1e-5);
    assert!((s.point.exponent - 0.43316).abs() < 1e-5);

    let constant = write(&dir, "const.json", r#"[["1","0"],["1","0"]]"#);
    let s: EvaluateSummary =
        serde_json::from_str(&cmd_evaluate(&cfg, &constant).unwrap().json).unwrap();
    assert!(s.point.rate_needed.abs() < 1e-12);
    assert!(s.point.exponent.abs() < 1e-12);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn invalid_inputs_exit_with_code_two() {
    let dir = scratch("invalid");
    let fig2 = configs().join("example_fig2.json");
    let bad_aux = write(&dir, "bad.json", r#"[["0.5","0.6"],["0","1"]]"#);
    let out = run(&[
        "evaluate",
        "--config",
        fig2.to_str().unwrap(),
        "--aux",
        bad_aux.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("aux[0]"));

    let full_without_pzxy = r#"{
      "model": { "x_size": 2, "y_size": 2, "z_size": 2, "px": ["1/2","1/2"],
                 "pyx": [["1","0"],["0","1"]], "eve_mode": "full" },
      "region": { "rates": [0.1], "delta0": 0, "delta1": 0, "epsilon": 0 }
    }"#;
    let cfg = write(&dir, "full.json", full_without_pzxy);
    let out = run(&["region", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pzxy"));

    let unknown = write(
        &dir,
        "unknown.json",
        &small_region("0.1", "0.13").replace("\"epsilon\"", "\"epsilonn\""),
    );
    assert_eq!(
        run(&["region", "--config", unknown.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["region", "--config", "/nonexistent/config.json"])
            .status
            .code(),
        Some(2)
    );
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn zero_rate_row_is_all_zero() {
    let cfg = parse_config(&small_region("0", "0.13")).unwrap();
    let out = cmd_region(&cfg).unwrap();
    let csv = out.csv.unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], &["0", "0", "0", "0"]);
}

#[test]
fn unreachable_equivocation_is_infeasible_but_succeeds() {
    let dir = scratch("infeasible");
    let cfg = write(&dir, "cfg.json", &small_region("0.2, 0.5, 0.9", "0.6"));
    let out_dir = dir.join("out");
    let out = run(&[
        "region",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let s: RegionSummary =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("region.json")).unwrap())
            .unwrap();
    assert_eq!(s.rows.len(), 3);
    for row in &s.rows {
        for r in row
            .results
            .iter()
            .filter(|r| r.baseline != Baseline::NoSecurity)
        {
            assert!(r.status == SolveStatus::Infeasible && r.theta.is_none());
        }
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn region_summary_round_trips() {
    let cfg = parse_config(&small_region("0.1, 0.4, 0.8", "0.13")).unwrap();
    let json = cmd_region(&cfg).unwrap().json;
    let s: RegionSummary = serde_json::from_str(&json).unwrap();
    assert_eq!(s.command, "region");
    let again = serde_json::to_string_pretty(&s).unwrap();
    let s2: RegionSummary = serde_json::from_str(&again).unwrap();
    assert_eq!(s, s2);
    for row in &s.rows {
        assert!(row.nesting_ok);
    }
}

#[test]
fn simulate_with_switch_always_on() {
    let text = std::fs::read_to_string(configs().join("trend_binary.json"))
        .unwrap()
        .replace("\"epsilon\": 0.2", "\"epsilon\": 1")
        .replace("[4, 6, 8, 10, 20, 40, 50]", "[4, 6]")
        .replace("100000", "2000");
    let cfg = parse_config(&text).unwrap();
    let s: SimulateSummary = serde_json::from_str(&cmd_simulate(&cfg).unwrap().json).unwrap();
    assert_eq!(s.eve_joint, "given");
    for row in &s.rows {
        assert!(row.exact);
        assert!((row.alpha_hat - 1.0).abs() < 1e-12);
        assert!(row.beta_hat.abs() < 1e-12);
        assert!((row.equiv_h0.unwrap() - s.hp_x_z).abs() < 1e-9);
        assert!((row.equiv_h1.unwrap() - s.hq_x_z).abs() < 1e-9);
    }
}

#[test]
fn simulate_constructs_joint_for_marginal_model() {
    let text = r#"{
      "model": {
        "x_size": 2, "y_size": 3, "z_size": 2,
        "px": ["4/5", "1/5"],
        "pyx": [["3/5", "0", "2/5"], ["0", "3/5", "2/5"]],
        "eve_mode": "marginal",
        "pzx_h0": [["4/5", "1/5"], ["1/5", "4/5"]],
        "qzx_h1": [["7/10", "3/10"], ["3/10", "7/10"]]
      },
      "simulate": { "aux": [["1","0"],["0","1"]], "rate_offset": 0.1, "epsilon": 0.2,
                    "n": [4], "trials": 1000, "seed": 3 }
    }"#;
    let cfg = parse_config(text).unwrap();
    let s: SimulateSummary = serde_json::from_str(&cmd_simulate(&cfg).unwrap().json).unwrap();
    assert_eq!(s.eve_joint, "constructed");
    assert_eq!(s.rows.len(), 1);
}

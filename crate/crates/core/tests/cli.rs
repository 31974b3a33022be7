use std::process::Command;

use clap::Parser;
use serde_json::Value;
use siegel_hecke::cli::{execute, provenance, to_csv, Cli};

fn result(args: &[&str]) -> Value {
    let cli = Cli::parse_from(std::iter::once("siegel-hecke").chain(args.iter().copied()));
    execute(&cli).unwrap()
}

fn bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_siegel-hecke")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn degree_of_g1_type() {
    let r = result(&["degree", "--p", "2", "--type", "1,1,2,2"]);
    assert_eq!(r["degree"], 15);
}

#[test]
fn closed_local_zeta_is_exact() {
    let r = result(&["zeta", "--p", "2", "--beta", "4", "--closed"]);
    assert_eq!(r["value"], "16/5");
}

#[test]
fn phase_below_three_has_no_kms_state() {
    let r = result(&["phase", "--beta", "2.5"]);
    assert_eq!(r["verdict"], "NoKMS");
    let sums: Vec<f64> = r["witness"]["partial_sums"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(sums.len() > 5);
    assert!(sums.windows(2).all(|w| w[1] > w[0]));
    assert!(sums.last().unwrap() > &100.0);
}

#[test]
fn cosets_summary_and_reps() {
    let r = result(&["cosets", "--type", "1,2,2,4"]);
    assert_eq!(r["degree"], r["reps"].as_array().unwrap().len());
    assert_eq!(r["multiplier"], 4);
}

#[test]
fn oracle_degree_agrees() {
    let r = result(&["oracle", "degree", "--p", "2", "--l", "2", "--type", "1,2,2,4"]);
    let direct = result(&["degree", "--type", "1,2,2,4"]);
    assert_eq!(r["degree"], direct["degree"]);
}

#[test]
fn oracle_distinct_reads_cosets_output() {
    let dir = std::env::temp_dir().join(format!("siegel-hecke-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("reps.json");
    let (code, _) = bin(&["cosets", "--type", "1,1,3,3", "-o", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r = result(&["oracle", "distinct", "--reps", path.to_str().unwrap()]);
    assert_eq!(r["distinct"], true);
    assert_eq!(r["count"], 40);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_output_is_byte_reproducible() {
    for args in [
        &["zeta", "--p", "3", "--beta", "7/2", "--lmax", "20"][..],
        &["partition", "--beta", "5,6", "--bound", "10,100"][..],
        &["characters", "--mod", "12", "--s", "2", "--terms", "5000"][..],
        &["hecke-verify", "--p", "2", "--radius", "2", "--summary"][..],
    ] {
        let (c1, a) = bin(args);
        let (c2, b) = bin(args);
        assert_eq!((c1, c2), (0, 0), "{args:?}");
        assert_eq!(a, b, "{args:?}");
        let (_, c) = bin(&[args, &["--threads", "1"][..]].concat());
        let v: Value = serde_json::from_str(&c).unwrap();
        let w: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["result"], w["result"], "{args:?}");
    }
}

#[test]
fn errors_are_machine_readable() {
    let (code, out) = bin(&["zeta", "--p", "4", "--beta", "5", "--closed"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["error"]["kind"].is_string());
    assert!(v["error"]["message"].is_string());
    assert_eq!(v["provenance"]["command"], "zeta");
}

#[test]
fn provenance_hash_tracks_config() {
    let a = Cli::parse_from(["siegel-hecke", "zeta", "--p", "2", "--beta", "4"]);
    let b = Cli::parse_from(["siegel-hecke", "zeta", "--p", "2", "--beta", "5"]);
    let c = Cli::parse_from(["siegel-hecke", "zeta", "--p", "2", "--beta", "4"]);
    assert_ne!(provenance(&a)["config_hash"], provenance(&b)["config_hash"]);
    assert_eq!(provenance(&a), provenance(&c));
    assert_eq!(provenance(&a)["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn csv_is_derived_from_json() {
    let cli = Cli::parse_from(["siegel-hecke", "partition", "--beta", "5,6", "--bound", "10,100"]);
    let envelope = serde_json::json!({ "provenance": provenance(&cli), "result": execute(&cli).unwrap() });
    let text = to_csv(&envelope).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# command=partition config_hash="));
    assert!(lines.next().unwrap().contains("beta"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn memory_budget_env_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_siegel-hecke"))
        .args(["oracle", "closure", "--mod", "4"])
        .env("SIEGEL_HECKE_MEMORY_BUDGET", "1K")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"]["message"].as_str().unwrap().contains("budget"));
    let (code, text) = bin(&["oracle", "closure", "--mod", "4", "--memory-budget", "1G"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["result"]["order"], 737_280);
}

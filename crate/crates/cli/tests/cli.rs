use rabi_cli::{to_json, CompareRow, DhoRow, Output, ParityStats, SpectrumRecord};
use rabi_core::analysis::{CapacityReport, ScanSeries};
use std::process::{Command, Output as ProcOutput};

fn rabi(args: &[&str]) -> ProcOutput {
    Command::new(env!("CARGO_BIN_EXE_rabi")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = rabi(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(String::from).collect()).collect()
}

const REFERENCE_ZETAS: [f64; 5] = [-0.217805, 0.0629563, 0.86095, 1.1636, 1.85076];

#[test]
fn spectrum_json_has_reference_zetas() {
    let text = stdout(&[
        "spectrum", "--kappa", "0.7", "--delta", "0.4", "--omega", "1", "--parity", "both", "--levels", "5", "--format",
        "json",
    ]);
    let doc: Output<SpectrumRecord> = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.config.levels, 5);
    assert_eq!(doc.config.trunc, 2000);
    let zetas: Vec<f64> = doc.result.levels.iter().map(|l| l.zeta).collect();
    for want in REFERENCE_ZETAS {
        assert!(zetas.iter().any(|z| (z - want).abs() < 5e-4), "{want} missing from {zetas:?}");
    }
    // byte-identical after a parse/serialize round trip
    assert_eq!(to_json(&doc), text);
}

#[test]
fn dho_csv_epsilon_column() {
    let text = stdout(&["dho", "--kappa", "1", "--levels", "10", "--format", "csv"]);
    let rows = csv_rows(&text);
    let col = rows[0].iter().position(|h| h == "epsilon").unwrap();
    let eps: Vec<f64> = rows[1..].iter().map(|r| r[col].parse().unwrap()).collect();
    assert_eq!(eps, (0..10).map(|l| l as f64 - 1.0).collect::<Vec<_>>());
    assert!(text.contains("# subcommand=\"dho\""));
}

#[test]
fn invalid_kappa_exits_1() {
    let out = rabi(&["spectrum", "--kappa", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappa"));
    assert_eq!(rabi(&["bogus"]).status.code(), Some(1));
    assert_eq!(rabi(&["spectrum"]).status.code(), Some(1));
    assert_eq!(rabi(&["--help"]).status.code(), Some(0));
}

#[test]
fn scan_csv_masks_poles() {
    let text =
        stdout(&["scan", "--kappa", "0.7", "--delta", "0.4", "--schweber", "--samples", "13", "--format", "csv"]);
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["t", "F"]);
    assert_eq!(rows.len(), 14);
    // ζ = 0, 1, 2 fall on the grid
    assert_eq!(rows.iter().filter(|r| r[1] == "NA").count(), 3);
}

#[test]
fn every_result_type_round_trips() {
    let base = ["--kappa", "1.4", "--delta", "0.4", "--format", "json"];
    let run = |cmd: &[&str]| {
        let mut args: Vec<&str> = cmd.to_vec();
        args.extend_from_slice(&base);
        stdout(&args)
    };
    let t = run(&["scan", "--samples", "50"]);
    assert_eq!(to_json(&serde_json::from_str::<Output<Vec<ScanSeries>>>(&t).unwrap()), t);
    let t = run(&["stats", "--levels", "20"]);
    assert_eq!(to_json(&serde_json::from_str::<Output<Vec<ParityStats>>>(&t).unwrap()), t);
    let t = run(&["compare", "--levels", "3"]);
    let doc: Output<Vec<CompareRow>> = serde_json::from_str(&t).unwrap();
    assert!(doc.result.iter().all(|r| r.dev_parity_braak.unwrap() < 1e-6));
    assert_eq!(to_json(&doc), t);
    let t = run(&["braak", "--levels", "3"]);
    assert_eq!(to_json(&serde_json::from_str::<Output<SpectrumRecord>>(&t).unwrap()), t);
    let t = run(&["capacity", "--levels", "100", "--parity", "plus", "--trunc", "400"]);
    let doc: Output<Vec<CapacityReport>> = serde_json::from_str(&t).unwrap();
    assert_eq!(doc.result[0].levels_computed, 100);
    assert_eq!(to_json(&doc), t);
    let t = stdout(&["dho", "--kappa", "0.5", "--levels", "4"]);
    assert_eq!(to_json(&serde_json::from_str::<Output<Vec<DhoRow>>>(&t).unwrap()), t);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["spectrum", "--kappa", "1.4", "--delta", "0.4", "--levels", "12", "--format", "csv"];
    let one = Command::new(env!("CARGO_BIN_EXE_rabi")).args(args).env("RAYON_NUM_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_rabi")).args(args).env("RAYON_NUM_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn writes_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let p = path.to_str().unwrap();
    let out = rabi(&["spectrum", "--kappa", "1", "--levels", "2", "--out", p]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Output<SpectrumRecord> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc.result.levels.len(), 4);
    assert_eq!(doc.config.out.as_deref(), Some(path.as_path()));
}

//! The command-line surface: subcommands, file formats and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use qldpc::gf2::SparseBitMatrix;
use qldpc::graph::BiregularBipartiteGraph;
use qldpc::sim::{SweepResult, CSV_HEADER};
use serde_json::Value;

fn qldpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qldpc"))
        .args(args)
        .env_remove("QLDPC_WORKERS")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = qldpc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn graph_code_and_decode_files() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    ok_json(&["gen-graph", "--n", "12", "--m", "10", "--dv", "5", "--dc", "6", "--seed", "4", "--out", p(&graph)]);
    let text = std::fs::read_to_string(&graph).unwrap();
    assert_eq!(text.lines().next(), Some("12 10 5 6"));
    assert_eq!(text.lines().count(), 1 + 60);
    let g = BiregularBipartiteGraph::from_text(&text).unwrap();

    let bench = ok_json(&["bench-flip", "--graph", p(&graph), "--p", "0.05", "--trials", "300", "--seed", "1"]);
    assert_eq!(bench["trials"], 300);
    assert!(bench["failure_rate"].as_f64().unwrap() <= 1.0 && bench["ci99"].as_f64().is_some());

    let code_dir = dir.path().join("code");
    let manifest = ok_json(&["build-code", "--graph", p(&graph), "--out", p(&code_dir)]);
    assert_eq!(manifest["N"], 244);
    assert_eq!(manifest["block_split"]["v_block"], 144);
    assert_eq!(manifest["weight_profile"]["x_generator_weights"], serde_json::json!([11]));
    let on_disk: Value = serde_json::from_str(&std::fs::read_to_string(code_dir.join("params.json")).unwrap()).unwrap();
    assert_eq!(on_disk, manifest);
    let hx = SparseBitMatrix::from_text(&std::fs::read_to_string(code_dir.join("hx.txt")).unwrap()).unwrap();
    assert_eq!((hx.n_rows(), hx.n_cols()), (g.n_left() * g.n_right(), 244));

    // A single Z error on qubit 0 is found again from its syndrome.
    let syndrome = dir.path().join("s.txt");
    let lines: String = hx.column(0).iter().map(|c| format!("{c}\n")).collect();
    std::fs::write(&syndrome, lines).unwrap();
    let out = ok_json(&["decode", "--code", p(&code_dir), "--syndrome", p(&syndrome)]);
    assert_eq!(out["status"], "converged");
    assert_eq!(out["deduced_error"], serde_json::json!([0]));

    std::fs::write(&syndrome, "9999\n").unwrap();
    assert!(!qldpc(&["decode", "--code", p(&code_dir), "--syndrome", p(&syndrome)]).status.success());
}

#[test]
fn sweep_threshold_compare_and_toric() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    std::fs::write(
        &config,
        r#"{"graph": {"n": 12, "m": 10, "dv": 5, "dc": 6, "candidates": 2, "selection": {"p": 0.05, "trials": 200}},
            "sweep": {"p_grid": [0.01, 0.03], "trials": 200}, "seed": 5, "workers": 2}"#,
    )
    .unwrap();
    let (csv, json, sel) = (dir.path().join("a.csv"), dir.path().join("a.json"), dir.path().join("sel.txt"));
    let out = qldpc(&[
        "sweep", "--config", p(&config), "--csv", p(&csv), "--json", p(&json), "--graph-out", p(&sel),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 2);
    let a: SweepResult = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(a.to_csv(), text);
    assert_eq!(a.metadata.graph_files, vec![p(&sel).to_string()]);
    assert!(BiregularBipartiteGraph::from_text(&std::fs::read_to_string(&sel).unwrap()).is_ok());

    // Flags override the config file.
    let b_json = dir.path().join("b.json");
    let out = qldpc(&["sweep", "--config", p(&config), "--n", "24", "--m", "20", "--json", p(&b_json)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("hgp-5-6-n24-m20,976,"));

    let th = ok_json(&["threshold", p(&json), p(&b_json)]);
    assert!(th["method_note"].as_str().unwrap().contains("crossing"));
    assert!(th.get("p_th").is_some());

    let cmp = ok_json(&["compare", "--sweep", p(&json), "--L", "3", "--trials", "200", "--seed", "1"]);
    assert_eq!(cmp["points"].as_array().unwrap().len(), 2);
    assert!(cmp["points"][0]["comparison"]["toric_ci99"].as_f64().is_some());
    assert!(!qldpc(&["compare", "--sweep", p(&json), "--L", "3", "--trials", "10", "--k", "3"]).status.success());

    let toric = ok_json(&["toric-sim", "--L", "3", "--p", "0.0", "--trials", "50", "--seed", "2"]);
    assert_eq!((toric["q_log"].as_f64(), toric["ci99"].as_f64(), toric["trials"].as_u64()), (Some(0.0), Some(0.0), Some(50)));

    assert!(!qldpc(&["sweep", "--n", "12"]).status.success());
    assert!(!qldpc(&["toric-sim", "--L", "1", "--p", "0.1", "--trials", "5"]).status.success());
}

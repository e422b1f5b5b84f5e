//! End-to-end command line tests: output values, determinism, exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_psitrop"));
    c.env("PSITROP_FIXTURES", fixtures());
    c
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn covers_degrees_d3() {
    let out = run(&["covers", "degrees", "--d", "3"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["results"]["source"], "96");
    assert_eq!(v["results"]["branch"], "24");
    assert_eq!(v["results"]["psi"], "8");
    assert_eq!(v["results"]["ratio"], "1/12");
}

#[test]
fn psi_degree_m04() {
    let out = run(&["psi", "degree", "--n", "4", "--exp", "1,0,0,0"]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["results"]["degree"], "1");
}

#[test]
fn elliptic_values() {
    let out = run(&["elliptic", "psi", "--a", "-3"]);
    assert_eq!(json_of(&out)["results"]["degree"], "-3");
    let out = run(&["elliptic", "isom", "--a", "2", "--b", "2"]);
    assert_eq!(json_of(&out)["results"]["balanced"], true);
    let out = run(&["elliptic", "isom", "--a", "0", "--b", "1"]);
    assert_eq!(json_of(&out)["results"]["balanced"], false);
}

#[test]
fn moduli_info_counts() {
    let out = run(&["moduli", "info", "--n", "5"]);
    let v = json_of(&out);
    assert_eq!(v["results"]["rays"], 10);
    assert_eq!(v["results"]["top_cones"], 15);
    assert_eq!(v["results"]["dimension"], 2);
}

#[test]
fn pencil_and_floors() {
    let fig = fixtures().join("fig_matrixmult.json");
    let out = run(&["pencil", "mult", "--fixture", fig.to_str().unwrap()]);
    assert_eq!(json_of(&out)["results"]["multiplicity"], "1");
    let out = run(&["floors", "count", "--d", "3"]);
    assert_eq!(json_of(&out)["results"]["count"], "12");
    let out = run(&["pencil", "degrees"]);
    let v = json_of(&out);
    assert_eq!(v["results"]["covering_degree"], "5184");
    assert_eq!(v["results"]["ratio"], "1/24");
    assert!(out.status.success());
}

#[test]
fn deterministic_output() {
    let a = run(&["covers", "table", "--d", "4"]);
    let b = run(&["covers", "table", "--d", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["psi", "dilaton", "--n", "4"]);
    let b = run(&["psi", "dilaton", "--n", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    // unknown subcommand: usage error, exit 2
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    // invalid input file: exit 3 with a JSON error object
    let out = run(&["graph", "validate", "--graph", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json_of(&out);
    assert!(v["error"].as_str().unwrap().contains("cannot read"));
    // passing command: exit 0
    let out = run(&["floors", "count", "--d", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn graph_roundtrip_commands() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theta.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "v": 1,
            "vertices": [{"id": 0, "genus": 0}, {"id": 1, "genus": 0}],
            "edges": [
                {"id": 0, "flags": [0, 1], "bounded": true, "leg": false},
                {"id": 1, "flags": [0, 1], "bounded": true, "leg": false},
                {"id": 2, "flags": [0, 1], "bounded": true, "leg": false}
            ],
            "marks": {}
        })
        .to_string(),
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let out = run(&["graph", "validate", "--graph", p]);
    assert_eq!(json_of(&out)["results"]["valid"], true);
    let out = run(&["graph", "genus", "--graph", p]);
    assert_eq!(json_of(&out)["results"]["genus"], 2);
    let out = run(&["graph", "autos", "--graph", p]);
    assert_eq!(json_of(&out)["results"]["order"], 12);
    let out = run(&["graph", "rigidify", "--graph", p]);
    assert_eq!(json_of(&out)["results"]["count"], 24);
    let out = run(&["graph", "contract", "--graph", p, "--edge", "0"]);
    let v = json_of(&out);
    assert_eq!(v["results"]["vertices"].as_array().unwrap().len(), 1);
}

#[test]
fn cycles_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let fan = dir.path().join("plane.json");
    std::fs::write(
        &fan,
        serde_json::json!({
            "v": 1,
            "ambient_rank": 2,
            "rays": [["1","0"],["0","1"],["-1","-1"]],
            "cones": [[0,1],[1,2],[2,0]],
            "dim": 2,
            "weights": [
                {"rays": [0,1], "weight": "1"},
                {"rays": [1,2], "weight": "1"},
                {"rays": [2,0], "weight": "1"}
            ]
        })
        .to_string(),
    )
    .unwrap();
    let func = dir.path().join("min.json");
    std::fs::write(
        &func,
        serde_json::json!({"v": 1, "values_on_rays": ["0", "0", "-1"]}).to_string(),
    )
    .unwrap();
    let out = run(&["cycles", "balance", "--fan", fan.to_str().unwrap()]);
    assert_eq!(json_of(&out)["results"]["balanced"], true);
    let out = run(&["cycles", "intersect", "--fn", func.to_str().unwrap(), "--fan", fan.to_str().unwrap()]);
    let v = json_of(&out);
    let weights = v["results"]["weights"].as_array().unwrap();
    assert_eq!(weights.len(), 3);
    assert!(weights.iter().all(|w| w["weight"] == "1"));

    let matrix = dir.path().join("diag.json");
    std::fs::write(
        &matrix,
        serde_json::json!({"v":1, "rows":2, "cols":2, "entries":["2","0","0","3"]}).to_string(),
    )
    .unwrap();
    let out = run(&["cycles", "index", "--matrix", matrix.to_str().unwrap()]);
    assert_eq!(json_of(&out)["results"]["index"], "6");

    let cocycle = dir.path().join("oa.json");
    std::fs::write(
        &cocycle,
        serde_json::json!({
            "v": 1,
            "charts": 2,
            "transitions": [{"to": 1, "from": 0, "slope": "3"}]
        })
        .to_string(),
    )
    .unwrap();
    let out = run(&["cycles", "chern", "--cocycle", cocycle.to_str().unwrap()]);
    assert_eq!(json_of(&out)["results"]["degree"], "3");
}

#[test]
fn crossratio_eval_on_split_type() {
    let dir = tempfile::tempdir().unwrap();
    // Star tree with 4 marked legs; primitive vertex datum
    // xi_{((f1,f3),(f2,f4))}.
    let star = serde_json::json!({
        "v": 1,
        "vertices": [{"id": 0, "genus": 0}],
        "edges": [
            {"id": 0, "flags": [0], "bounded": false, "leg": true},
            {"id": 1, "flags": [0], "bounded": false, "leg": true},
            {"id": 2, "flags": [0], "bounded": false, "leg": true},
            {"id": 3, "flags": [0], "bounded": false, "leg": true}
        ],
        "marks": {"1": 0, "2": 1, "3": 2, "4": 3}
    });
    let datum = dir.path().join("datum.json");
    std::fs::write(
        &datum,
        serde_json::json!({
            "v": 1,
            "graph": star,
            "path_vertices": [0],
            "path_edges": [],
            "start_flag": [0, 0],
            "end_flag": [2, 0],
            "slopes": [[ [[0,0], 0], [[1,0], -1], [[2,0], 0], [[3,0], 1] ]]
        })
        .to_string(),
    )
    .unwrap();
    // The {1,2}|{3,4} type with edge length 7/2.
    let point = dir.path().join("point.json");
    std::fs::write(
        &point,
        serde_json::json!({
            "v": 1,
            "graph": {
                "v": 1,
                "vertices": [{"id": 0, "genus": 0}, {"id": 1, "genus": 0}],
                "edges": [
                    {"id": 0, "flags": [0], "bounded": false, "leg": true},
                    {"id": 1, "flags": [0], "bounded": false, "leg": true},
                    {"id": 2, "flags": [1], "bounded": false, "leg": true},
                    {"id": 3, "flags": [1], "bounded": false, "leg": true},
                    {"id": 4, "flags": [0, 1], "bounded": true, "leg": false}
                ],
                "marks": {"1": 0, "2": 1, "3": 2, "4": 3}
            },
            "lengths": {"4": "7/2"},
            "edge_map": {"0": 0, "1": 1, "2": 2, "3": 3, "4": null},
            "vertex_map": [0, 0]
        })
        .to_string(),
    )
    .unwrap();
    let out = run(&[
        "crossratio",
        "eval",
        "--datum",
        datum.to_str().unwrap(),
        "--point",
        point.to_str().unwrap(),
    ]);
    assert_eq!(json_of(&out)["results"]["value"], "7/2");
}

#[test]
fn verify_all_smoke_passes() {
    let out = run(&["verify-all", "--level", "smoke"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["pass"] == true));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn treebed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treebed"))
        .args(args)
        .env_remove("TREEBED_THREADS")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn schema_valid(name: &str, out: &Output) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let doc: Value = serde_json::from_str(&stdout(out)).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
    doc
}

#[test]
fn documented_examples() {
    assert_eq!(treebed(&["check-covering", "--n", "1", "--p", "5"]).status.code(), Some(0));
    let rejected = treebed(&["check-covering", "--n", "2", "--p", "6"]);
    assert_eq!(rejected.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&rejected.stderr).contains("1/(p-1) + 1/p"));
    let out = treebed(&["tree-dist", "--n", "1", "--p", "5", "--u", "0,1,2", "--v", "0,1,3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "3");
}

#[test]
fn exit_codes() {
    // (0,1,3) reaches its parent two levels down.
    let capped = treebed(&["tree-dist", "--u", "0,1,3", "--v", "0,1,2", "--scan-cap", "1"]);
    assert_eq!(capped.status.code(), Some(3));
    assert_eq!(treebed(&["tree-dist", "--u", "0,1", "--v", "0,1,2"]).status.code(), Some(2));
    assert_eq!(treebed(&["tree-dist", "--u", "0,1,2", "--v", "1,1,2"]).status.code(), Some(2));
    assert_eq!(treebed(&["embed", "--t", "0", "--x", "1,2"]).status.code(), Some(2));
    assert_eq!(treebed(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(treebed(&["verify", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(treebed(&["check-separation", "--p", "6", "--samples", "500"]).status.code(), Some(1));
    assert_eq!(treebed(&["check-separation", "--samples", "500"]).status.code(), Some(0));
}

#[test]
fn json_outputs_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let ids = dir.path().join("ids.txt");
    std::fs::write(&ids, "# leaves\n0,1,2\n0,1,3\n0,2,-7  # deep\n").unwrap();
    let ids = ids.to_str().unwrap();

    let e = schema_valid("embed", &treebed(&["embed", "--t", "0", "--x", "0.5", "--json"]));
    assert_eq!(e["images"][1]["gamma"][0], -1);
    let d = schema_valid("distance", &treebed(&["distance", "--z", "0,0", "--w", "1,0", "--json"]));
    assert!((d["d_hyp"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let t = schema_valid("tree-dist", &treebed(&["tree-dist", "--u", "0,1,2", "--v", "0,1,3", "--json"]));
    assert_eq!(t["distance"], 3);
    let c = schema_valid("check-covering", &treebed(&["check-covering", "--n", "2", "--p", "7", "--json"]));
    assert_eq!(c["covered"], true);
    schema_valid("check-separation", &treebed(&["check-separation", "--p", "6", "--samples", "300", "--json"]));
    let v = schema_valid("verify", &treebed(&["verify", "--samples", "500", "--timing", "--json"]));
    assert!(v["runtime_ms"].is_u64());
    let x = schema_valid("export-subtree", &treebed(&["export-subtree", "--ids", ids, "--json"]));
    assert_eq!(x["edges"].as_array().unwrap().len() + 1, x["nodes"].as_array().unwrap().len());
}

#[test]
fn text_outputs() {
    let out = stdout(&treebed(&["embed", "--n", "2", "--p", "7", "--t", "-1.3", "--x", "-7,2"]));
    assert_eq!(out.lines().count(), 3);
    assert!(out.lines().all(|l| l.split(',').count() == 4 && l.contains(",-1,")));
    let dot = stdout(&treebed(&["check-covering", "--p", "7"]));
    assert!(dot.starts_with("covered"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let report = dir.path().join("report.csv");
    std::fs::write(
        &cfg,
        format!(
            "n = 1\np = 7\nseed = 3\nsamples = 50\nformat = \"csv\"\noutput_path = {:?}\n[region]\nt_min = -1.0\nt_max = 1.0\n",
            report.to_str().unwrap()
        ),
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = treebed(&["verify", "--config", cfg, "--p", "5", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["params"]["p"], 5);
    assert_eq!(summary["plan"]["seed"], 3);
    assert_eq!(summary["plan"]["region"]["t_max"], 1.0);
    let csv = std::fs::read_to_string(&report).unwrap();
    assert_eq!(csv.lines().count(), 51);
    assert!(csv.starts_with("t,x1,t_prime,x1_prime,d_hyp,d_tree,color0,color1\n"));

    std::fs::write(dir.path().join("bad.toml"), "dimension = 2\n").unwrap();
    let bad = treebed(&["check-covering", "--config", dir.path().join("bad.toml").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn thread_count_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_treebed"))
            .args(["verify", "--samples", "3000", "--seed", "5"])
            .env("TREEBED_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn negative_control_flag() {
    let out = treebed(&["verify", "--samples", "2000", "--level", "0", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let good: Value = serde_json::from_str(&stdout(&treebed(&["verify", "--samples", "2000", "--json"]))).unwrap();
    assert!(v["fit"]["m"].as_f64().unwrap() > good["fit"]["m"].as_f64().unwrap());
}

//! Behavior of the command-line interface: flags, exit codes, output shapes.

mod common;

use common::*;
use serde_json::Value;

fn recommend_json(args: &[&str]) -> Value {
    let mut full = vec!["recommend"];
    full.extend_from_slice(args);
    full.push("--json");
    let out = run_carve(full);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout_of(&out)).expect("valid JSON report")
}

#[test]
fn recommend_ranks_the_selection_box_fixture() {
    let path = testdata().join("selection_box.jx");
    let doc = recommend_json(&[path.to_str().unwrap()]);
    let recs = doc["files"][0]["methods"][0]["recommendations"].as_array().unwrap();
    assert!(!recs.is_empty());
    assert_eq!(recs[0]["rank"], 1);
    assert_eq!(recs[0]["labels"], "S3.2-S3.5");
    assert_eq!(recs[0]["block"], 3);
    assert_eq!(recs[0]["start"], 2);
    assert_eq!(recs[0]["end"], 5);
    assert_eq!(recs[0]["score"]["var"], 0.7778);
}

#[test]
fn recommend_human_output_mentions_top_range() {
    let path = testdata().join("selection_box.jx");
    let out = run_carve(["recommend", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("#1 S3.2-S3.5"), "{text}");
    assert!(text.contains("org.app.ui.SelectionBox.mouseReleased"), "{text}");
}

#[test]
fn recommend_respects_max_recs() {
    let path = testdata().join("selection_box.jx");
    let doc = recommend_json(&[path.to_str().unwrap(), "--max-recs", "1"]);
    for file in doc["files"].as_array().unwrap() {
        for method in file["methods"].as_array().unwrap() {
            assert!(method["recommendations"].as_array().unwrap().len() <= 1);
        }
    }
}

#[test]
fn recommend_on_tiny_methods_is_empty_and_succeeds() {
    let path = testdata().join("tiny.jx");
    let doc = recommend_json(&[path.to_str().unwrap()]);
    assert_eq!(doc["files"].as_array().unwrap().len(), 0);
    let out = run_carve(["recommend", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_of(&out), "no recommendations\n");
}

#[test]
fn recommend_min_score_filters() {
    let path = testdata().join("selection_box.jx");
    let doc = recommend_json(&[path.to_str().unwrap(), "--min-score", "0.99"]);
    assert_eq!(doc["files"].as_array().unwrap().len(), 0);
}

#[test]
fn recommend_explain_lists_dependency_sets() {
    let path = testdata().join("selection_box.jx");
    let doc = recommend_json(&[path.to_str().unwrap(), "--explain"]);
    let rec = &doc["files"][0]["methods"][0]["recommendations"][0];
    let vars: Vec<&str> = rec["explain"]["selection"]["vars"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(vars, vec!["fc", "fcb", "metaType"]);
    assert_eq!(
        rec["explain"]["remainder"]["vars"].as_array().unwrap().len(),
        9
    );
}

#[test]
fn recommend_rejects_broken_input_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jx");
    std::fs::write(&bad, "package p; class C { int f( { }").unwrap();
    let out = run_carve(["recommend", bad.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    assert!(!out.stderr.is_empty());
}

#[test]
fn apply_writes_the_extracted_unit() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("rewritten.jx");
    let path = testdata().join("selection_box.jx");
    let out = run_carve([
        "apply",
        path.to_str().unwrap(),
        "--method",
        "SelectionBox.mouseReleased",
        "--range",
        "3:2:5",
        "--name",
        "attachFigures",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let rewritten = std::fs::read_to_string(&out_path).unwrap();
    assert!(rewritten.contains("void attachFigures(MetaType metaType) {"));

    // the moved statements no longer produce the old top recommendation
    let doc = recommend_json(&[out_path.to_str().unwrap()]);
    for file in doc["files"].as_array().unwrap() {
        for method in file["methods"].as_array().unwrap() {
            if method["method"].as_str().unwrap().ends_with("mouseReleased") {
                for rec in method["recommendations"].as_array().unwrap() {
                    assert_ne!(
                        (rec["block"].as_u64(), rec["start"].as_u64(), rec["end"].as_u64()),
                        (Some(3), Some(2), Some(5))
                    );
                }
            }
        }
    }
}

#[test]
fn apply_invalid_range_exits_2_with_reasons() {
    let path = testdata().join("selection_box.jx");
    let out = run_carve([
        "apply",
        path.to_str().unwrap(),
        "--method",
        "mouseReleased",
        "--range",
        "3:2:3",
        "--name",
        "helper",
    ]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("V1"), "{stderr}");

    let out = run_carve([
        "apply",
        path.to_str().unwrap(),
        "--method",
        "mouseReleased",
        "--range",
        "9:1:1",
        "--name",
        "helper",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn apply_name_clash_exits_2() {
    let path = testdata().join("selection_box.jx");
    let out = run_carve([
        "apply",
        path.to_str().unwrap(),
        "--method",
        "mouseReleased",
        "--range",
        "3:2:5",
        "--name",
        "place",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("place"));
}

#[test]
fn apply_missing_method_exits_1() {
    let path = testdata().join("selection_box.jx");
    let out = run_carve([
        "apply",
        path.to_str().unwrap(),
        "--method",
        "nope",
        "--range",
        "1:1:1",
        "--name",
        "helper",
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn mutate_without_eligible_callees_copies_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("mutated");
    let oracle = dir.path().join("oracle.json");
    let src = testdata().join("tiny.jx");
    let out = run_carve([
        "mutate",
        src.to_str().unwrap(),
        "--seed",
        "9",
        "-o",
        out_dir.to_str().unwrap(),
        "--oracle",
        oracle.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let copied = std::fs::read_to_string(out_dir.join("tiny.jx")).unwrap();
    let original = std::fs::read_to_string(&src).unwrap();
    assert_eq!(copied, original);
    let entries: Value = serde_json::from_str(&std::fs::read_to_string(&oracle).unwrap()).unwrap();
    assert_eq!(entries.as_array().unwrap().len(), 0);
}

#[test]
fn mutate_plants_entries_on_the_ledger_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("mutated");
    let oracle = dir.path().join("oracle.json");
    let src = testdata().join("ledger.jx");
    let out = run_carve([
        "mutate",
        src.to_str().unwrap(),
        "--seed",
        "5",
        "--prob",
        "1.0",
        "-o",
        out_dir.to_str().unwrap(),
        "--oracle",
        oracle.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let entries: Value = serde_json::from_str(&std::fs::read_to_string(&oracle).unwrap()).unwrap();
    assert_eq!(entries.as_array().unwrap().len(), 2);
    for entry in entries.as_array().unwrap() {
        for key in ["file", "class", "method", "block", "start", "end", "inlined_from"] {
            assert!(entry.get(key).is_some(), "missing oracle key {key}");
        }
    }
}

#[test]
fn bench_reports_recall_equals_precision_at_k1_single_recs() {
    let corpus = testdata().join("bench4");
    let oracle = corpus.join("oracle.json");
    let out = run_carve([
        "bench",
        corpus.to_str().unwrap(),
        "--oracle",
        oracle.to_str().unwrap(),
        "--k",
        "1",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    let json_line = text.lines().next().unwrap();
    let report: Value = serde_json::from_str(json_line).unwrap();
    assert_eq!(report["recall"], report["precision"]);
    assert_eq!(report["recall"], 0.5);
    assert!(text.contains("oracles"), "table missing: {text}");
}

#[test]
fn bench_recall_grows_with_k() {
    let corpus = testdata().join("bench4");
    let oracle = corpus.join("oracle.json");
    let recall_at = |k: &str| -> f64 {
        let out = run_carve([
            "bench",
            corpus.to_str().unwrap(),
            "--oracle",
            oracle.to_str().unwrap(),
            "--k",
            k,
        ]);
        assert_eq!(exit_code(&out), 0);
        let text = stdout_of(&out);
        let report: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        report["recall"].as_f64().unwrap()
    };
    assert!(recall_at("3") >= recall_at("1"));
}

#[test]
fn bench_dangling_oracle_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir_all(&corpus).unwrap();
    std::fs::copy(testdata().join("bench4/bench_a.jx"), corpus.join("bench_a.jx")).unwrap();
    let oracle = dir.path().join("oracle.json");
    std::fs::write(
        &oracle,
        r#"[{"file":"ghost.jx","class":"C","method":"m","block":1,"start":1,"end":3,"inlined_from":"h"}]"#,
    )
    .unwrap();
    let out = run_carve([
        "bench",
        corpus.to_str().unwrap(),
        "--oracle",
        oracle.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn label_prefixes_statements() {
    let path = testdata().join("shapes.jx");
    let out = run_carve(["label", path.to_str().unwrap(), "--method", "flat"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    for label in ["S1.1", "S1.2", "S1.3"] {
        assert!(text.contains(label), "{text}");
    }

    let out = run_carve(["label", path.to_str().unwrap(), "--method", "branchy"]);
    let text = stdout_of(&out);
    assert!(text.contains("S2.1"), "{text}");
    assert!(text.contains("S3.1"), "{text}");
}

#[test]
fn label_missing_method_exits_1() {
    let path = testdata().join("shapes.jx");
    let out = run_carve(["label", path.to_str().unwrap(), "--method", "ghost"]);
    assert_eq!(exit_code(&out), 1);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nhcech_cli::{load_diagram, CliError};
use tempfile::TempDir;

fn nhcech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhcech")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn gallery_file(dir: &TempDir, name: &str) -> PathBuf {
    let o = nhcech(&["gallery", name]);
    assert!(o.status.success());
    write(dir, &format!("{name}.json"), &stdout(&o))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const BAD_A3: &str = r#"{"field": 2,
  "pieces": [{"id": "1", "simplices": [["a"], ["b"]]},
             {"id": "2", "simplices": [["a"], ["b"]]},
             {"id": "3", "simplices": [["a"], ["b"]]}],
  "gluings": [{"i": "1", "j": "2", "pairs": [["a", "a"], ["b", "b"]]},
              {"i": "2", "j": "3", "pairs": [["a", "a"], ["b", "b"]]},
              {"i": "1", "j": "3", "pairs": [["a", "b"], ["b", "a"]]}]}"#;

#[test]
fn load_two_origin() {
    let dir = TempDir::new().unwrap();
    let p = gallery_file(&dir, "two_origin_line");
    let sys = load_diagram(&p, None).unwrap();
    assert_eq!(sys.pieces.len(), 2);
    let d = nhcech::diagram::canonicalize(&sys).unwrap();
    assert_eq!(d.global_labels().count(), 4);
}

#[test]
fn load_errors() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(gallery_file(&dir, "two_origin_line")).unwrap();
    let dup = write(&dir, "dup.json", &text.replace("\"id\": \"2\"", "\"id\": \"1\""));
    assert!(matches!(load_diagram(&dup, None), Err(CliError::Parse { .. })));
    let p4 = write(&dir, "p4.json", &text.replacen("\"field\": 2", "\"field\": 4", 1));
    assert!(matches!(load_diagram(&p4, None), Err(CliError::NonPrimeModulus(4))));
    let a3 = write(&dir, "a3.json", BAD_A3);
    assert!(matches!(load_diagram(&a3, None), Err(CliError::InvalidSystem(_))));
    let missing = dir.path().join("missing.json");
    assert!(matches!(load_diagram(&missing, None), Err(CliError::Io { .. })));
}

#[test]
fn validate_reports_a3_witness() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad_a3.json", BAD_A3);
    let o = nhcech(&["validate", s(&p)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("A3 violated"), "{}", stdout(&o));
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(gallery_file(&dir, "two_origin_line")).unwrap();
    let dup = write(&dir, "dup.json", &text.replace("\"id\": \"2\"", "\"id\": \"1\""));
    let o = nhcech(&["cohomology", s(&dup)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("duplicate piece id"));

    let broken = write(&dir, "broken.json", "{\"field\": 2,\n \"pieces\": [}");
    let o = nhcech(&["cohomology", s(&broken)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let p = gallery_file(&dir, "three_circles");
    assert_eq!(nhcech(&["--field", "4", "cohomology", s(&p)]).status.code(), Some(2));
    assert_eq!(nhcech(&["--field", "3", "count", s(&p)]).status.code(), Some(2));
    assert_eq!(nhcech(&["refine-check", s(&p)]).status.code(), Some(2));
    assert_eq!(nhcech(&["frobnicate", s(&p)]).status.code(), Some(2));
    assert_eq!(nhcech(&["gallery", "nope"]).status.code(), Some(2));
    assert_eq!(nhcech(&["cohomology"]).status.code(), Some(2));
}

#[test]
fn cohomology_table() {
    let dir = TempDir::new().unwrap();
    let p = gallery_file(&dir, "two_origin_line");
    let o = nhcech(&["cohomology", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row = out.lines().find(|l| l.trim_start().starts_with("N ")).unwrap();
    assert_eq!(row.split_whitespace().collect::<Vec<_>>(), ["N", "1", "1"]);
}

#[test]
fn other_fields_run() {
    let dir = TempDir::new().unwrap();
    let p = gallery_file(&dir, "bug_eyed_circle");
    for cmd in ["cohomology", "mv", "fibred", "collapse-check", "refine-check"] {
        let o = nhcech(&["--field", "5", cmd, s(&p)]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stdout(&o));
    }
}

#[test]
fn count_flags_literal_form() {
    let dir = TempDir::new().unwrap();
    let p = gallery_file(&dir, "three_circles");
    let rp = dir.path().join("r.json");
    let o = nhcech(&["count", s(&p), "--report", s(&rp)]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rp).unwrap()).unwrap();
    assert_eq!(report["command"], "count");
    assert_eq!(report["details"]["count"]["dimension_form"], 8);
    assert_eq!(report["details"]["count"]["literal_form"], 4);
    assert_eq!(report["details"]["count"]["ground_truth"], 8);
    assert!(report["flags"].as_array().unwrap().iter().any(|f| f.as_str().unwrap().contains("literal form mismatch")));
    assert!(report.get("wall_time_ms").is_none());
}

#[test]
fn timing_is_opt_in() {
    let dir = TempDir::new().unwrap();
    let p = gallery_file(&dir, "two_origin_line");
    let rp = dir.path().join("r.json");
    nhcech(&["--timing", "cohomology", s(&p), "--report", s(&rp)]);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rp).unwrap()).unwrap();
    assert!(report["wall_time_ms"].is_number());
}

#[test]
fn gallery_commands() {
    let o = nhcech(&["gallery", "list"]);
    assert_eq!(stdout(&o).lines().count(), 5);
    let o = nhcech(&["gallery", "branching_line_n", "--n", "3"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["pieces"].as_array().unwrap().len(), 3);
    let o = nhcech(&["gallery", "two_origin_line"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let labels = |i: usize| {
        let mut v: Vec<String> = doc["pieces"][i]["simplices"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|s| s.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()))
            .collect();
        v.sort();
        v.dedup();
        v
    };
    assert_eq!(labels(0), ["l", "o1", "r"]);
    assert_eq!(labels(1), ["l", "o2", "r"]);
    let o = nhcech(&["gallery", "random", "--seed", "7"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed 7"));
    assert_eq!(stdout(&o), stdout(&nhcech(&["gallery", "random", "--seed", "7"])));
}

#[test]
fn all_gallery_batch() {
    let dir = TempDir::new().unwrap();
    let rp = dir.path().join("batch.json");
    let o = nhcech(&["--all-gallery", "mv", "--report", s(&rp)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let batch: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rp).unwrap()).unwrap();
    let names: Vec<&str> = batch["cases"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        [
            "two_origin_line",
            "branching_line_2",
            "branching_line_3",
            "bug_eyed_circle",
            "three_circles",
            "random_seed_0"
        ]
    );
    let o = nhcech(&["--all-gallery", "refine-check"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn obstructed_bundle_is_reported() {
    // k^{13} at a disagrees with k^{23} k^{12}
    let dir = TempDir::new().unwrap();
    let o = nhcech(&["gallery", "branching_line_n", "--n", "3"]);
    let mut doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    doc["bundle"] = serde_json::json!({"rank": 1, "identifications": [{"i": "1", "j": "2", "label": "l", "value": 1}]});
    let p = write(&dir, "obstructed.json", &doc.to_string());
    let o = nhcech(&["bundles", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("obstructed"), "{}", stdout(&o));

    doc["bundle"] = serde_json::json!({"rank": 1, "transitions": [{"piece": "1", "edge": ["l", "b1"], "value": 1}]});
    let p = write(&dir, "sign.json", &doc.to_string());
    let o = nhcech(&["validate", s(&p)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn rank_two_bundle() {
    let dir = TempDir::new().unwrap();
    let o = nhcech(&["gallery", "two_origin_line"]);
    let mut doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    doc["bundle"] = serde_json::json!({"rank": 2, "identifications": [{"i": "1", "j": "2", "label": "r", "value": [[0, 1], [1, 0]]}]});
    let p = write(&dir, "rank2.json", &doc.to_string());
    let rp = dir.path().join("r.json");
    let o = nhcech(&["bundles", s(&p), "--report", s(&rp)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rp).unwrap()).unwrap();
    // the swap has a fixed line, so one of the two dimensions survives the loop
    assert_eq!(report["details"]["document_bundle"]["parallel_sections"], 1);

    doc["bundle"]["identifications"][0]["value"] = serde_json::json!([[1, 1], [1, 1]]);
    let p = write(&dir, "singular.json", &doc.to_string());
    assert_eq!(nhcech(&["bundles", s(&p)]).status.code(), Some(2));
}

//! End-to-end tests of the `reedy` binary: exit codes, output stability,
//! and the advertised behavior of every subcommand.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(label: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("reedy-cli-{label}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn reedy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reedy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn catalog_exports_are_byte_stable_and_revalidate() {
    let dir = scratch("catalog");
    let dir_s = dir.to_str().unwrap();

    let first = reedy(&["catalog", "delta", "--max-degree", "2", "--out", dir_s]);
    assert_eq!(exit_code(&first), 0, "{}", stderr(&first));
    let path = dir.join("delta2.json");
    let bytes = fs::read(&path).unwrap();

    let second = reedy(&["catalog", "delta", "--max-degree", "2", "--out", dir_s]);
    assert_eq!(exit_code(&second), 0);
    assert_eq!(bytes, fs::read(&path).unwrap(), "export is byte-stable");

    let validated = reedy(&["validate", path.to_str().unwrap()]);
    assert_eq!(exit_code(&validated), 0, "{}", stderr(&validated));
    assert!(stdout(&validated).contains("31 morphisms"));

    let unknown = reedy(&["catalog", "no-such-builder", "--out", dir_s]);
    assert_eq!(exit_code(&unknown), 2);

    let listing = reedy(&["catalog", "list"]);
    assert_eq!(exit_code(&listing), 0);
    assert!(stdout(&listing).contains("example-square"));
}

#[test]
fn analyze_reports_verdicts_and_witnesses() {
    let dir = scratch("analyze");
    let dir_s = dir.to_str().unwrap();
    let exported = reedy(&["catalog", "example-square", "--out", dir_s]);
    assert_eq!(exit_code(&exported), 0, "{}", stderr(&exported));
    let functor = dir.join("example-square.functor.json");
    let functor_s = functor.to_str().unwrap();

    let both = reedy(&["analyze", functor_s, "--mode", "both", "--witness"]);
    assert_eq!(exit_code(&both), 1);
    let text = stdout(&both);
    assert!(text.contains("fibering: fails"));
    assert!(text.contains("sigma=qp"));
    assert!(text.contains("cofibering: holds"));

    let cofibering = reedy(&["analyze", functor_s, "--mode", "cofibering"]);
    assert_eq!(exit_code(&cofibering), 0);

    let json = reedy(&["analyze", functor_s, "--format", "json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(value["fibering"], serde_json::json!(false));
    assert_eq!(value["cofibering"], serde_json::json!(true));
    assert_eq!(value["witnesses"][0]["sigma"], serde_json::json!("qp"));
    assert_eq!(value["witnesses"][0]["side"], serde_json::json!("inverse"));
    assert_eq!(value["witnesses"].as_array().unwrap().len(), 1);

    let rest = reedy(&["catalog", "rest-delta2", "--out", dir_s]);
    assert_eq!(exit_code(&rest), 0, "{}", stderr(&rest));
    let rest_functor = dir.join("rest-delta2.functor.json");
    let verdict = reedy(&["analyze", rest_functor.to_str().unwrap()]);
    assert_eq!(exit_code(&verdict), 0, "{}", stderr(&verdict));
}

#[test]
fn matchprod_reports_the_square_counterexample() {
    let dir = scratch("matchprod");
    let dir_s = dir.to_str().unwrap();
    reedy(&["catalog", "example-square", "--out", dir_s]);
    let functor = dir.join("example-square.functor.json");
    let functor_s = functor.to_str().unwrap();

    let report = reedy(&["matchprod", functor_s, "--alpha", "alpha", "--beta", "beta"]);
    assert_eq!(exit_code(&report), 0, "{}", stderr(&report));
    let text = stdout(&report);
    assert!(text.contains("S: 2 elements"));
    assert!(text.contains("T: 2 classes"));
    assert!(text.contains("not injective"));
    assert!(text.contains("matching product: holds"));

    let bad = reedy(&["matchprod", functor_s, "--alpha", "nope", "--beta", "beta"]);
    assert_eq!(exit_code(&bad), 2);

    // Vacuous anchor: no matching objects at all.
    let empty = reedy(&["matchprod", functor_s, "--alpha", "delta", "--beta", "beta"]);
    assert_eq!(exit_code(&empty), 0);
    assert!(stdout(&empty).contains("S: 0 elements"));
}

fn write_walking_arrow(dir: &PathBuf) {
    fs::write(
        dir.join("arrow.json"),
        r#"{
  "objects": [{"id": "x"}, {"id": "y"}],
  "morphisms": [{"id": "f", "src": "x", "dst": "y"}],
  "composition": []
}"#,
    )
    .unwrap();
    fs::write(
        dir.join("point.json"),
        r#"{"objects": [{"id": "t"}], "morphisms": [], "composition": []}"#,
    )
    .unwrap();
    fs::write(
        dir.join("incl.json"),
        r#"{"source": "point.json", "target": "arrow.json", "on_objects": {"t": "y"}, "on_morphisms": {}}"#,
    )
    .unwrap();
    fs::write(
        dir.join("diag.json"),
        r#"{
  "category": "arrow.json",
  "sets": {"x": ["a", "b"], "y": ["u"]},
  "functions": {"f": {"a": "u", "b": "u"}}
}"#,
    )
    .unwrap();
}

#[test]
fn limits_and_cofinality_on_the_walking_arrow() {
    let dir = scratch("limits");
    write_walking_arrow(&dir);
    let diag = dir.join("diag.json");
    let diag_s = diag.to_str().unwrap();

    let lim = reedy(&["limits", diag_s, "--op", "limit"]);
    assert_eq!(exit_code(&lim), 0, "{}", stderr(&lim));
    let value: serde_json::Value = serde_json::from_str(&stdout(&lim)).unwrap();
    assert_eq!(value["size"], serde_json::json!(2));

    let colim = reedy(&["limits", diag_s, "--op", "colimit"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&colim)).unwrap();
    assert_eq!(value["size"], serde_json::json!(1));

    let incl = dir.join("incl.json");
    let incl_s = incl.to_str().unwrap();
    let right = reedy(&["cofinal", incl_s, "--side", "right"]);
    assert_eq!(exit_code(&right), 0, "{}", stderr(&right));
    let left = reedy(&["cofinal", incl_s, "--side", "left"]);
    assert_eq!(exit_code(&left), 1);
    assert!(stdout(&left).contains("fails at `x`"));

    // Kan extension of a one-point diagram along the endpoint inclusion.
    fs::write(
        dir.join("pdiag.json"),
        r#"{"category": "point.json", "sets": {"t": ["p", "q"]}, "functions": {}}"#,
    )
    .unwrap();
    let pdiag = dir.join("pdiag.json");
    let kan = reedy(&[
        "limits",
        pdiag.to_str().unwrap(),
        "--op",
        "kan",
        "--along",
        incl_s,
        "--side",
        "right",
    ]);
    assert_eq!(exit_code(&kan), 0, "{}", stderr(&kan));
    let value: serde_json::Value = serde_json::from_str(&stdout(&kan)).unwrap();
    assert_eq!(value["sets"]["x"].as_array().unwrap().len(), 2);

    let missing = reedy(&["limits", diag_s, "--op", "matching"]);
    assert_eq!(exit_code(&missing), 2, "matching needs --alpha and degrees");
}

#[test]
fn invalid_files_exit_two_with_located_errors() {
    let dir = scratch("invalid");
    // a∘b = b but b∘b = a breaks associativity on (a, b, b).
    fs::write(
        dir.join("broken.json"),
        r#"{
  "objects": [{"id": "x"}],
  "morphisms": [
    {"id": "a", "src": "x", "dst": "x"},
    {"id": "b", "src": "x", "dst": "x"}
  ],
  "composition": [
    {"first": "a", "then": "a", "equals": "b"},
    {"first": "a", "then": "b", "equals": "b"},
    {"first": "b", "then": "a", "equals": "b"},
    {"first": "b", "then": "b", "equals": "a"}
  ]
}"#,
    )
    .unwrap();
    let broken = reedy(&["validate", dir.join("broken.json").to_str().unwrap()]);
    assert_eq!(exit_code(&broken), 2);
    assert!(stderr(&broken).contains("associativity"));

    write_walking_arrow(&dir);
    fs::write(
        dir.join("unmapped.json"),
        r#"{"source": "arrow.json", "target": "arrow.json", "on_objects": {"x": "x", "y": "y"}, "on_morphisms": {}}"#,
    )
    .unwrap();
    let unmapped = reedy(&["validate", dir.join("unmapped.json").to_str().unwrap()]);
    assert_eq!(exit_code(&unmapped), 2);
    assert!(stderr(&unmapped).contains("not mapped"));

    let garbled = dir.join("garbled.json");
    fs::write(&garbled, "{not json").unwrap();
    assert_eq!(exit_code(&reedy(&["validate", garbled.to_str().unwrap()])), 2);
    assert_eq!(exit_code(&reedy(&["validate", dir.join("absent.json").to_str().unwrap()])), 2);
}

#[test]
fn size_limit_flag_guards_big_inputs() {
    let dir = scratch("limitflag");
    let dir_s = dir.to_str().unwrap();
    reedy(&["catalog", "delta", "--max-degree", "2", "--out", dir_s]);
    let path = dir.join("delta2.json");
    let guarded = reedy(&["validate", path.to_str().unwrap(), "--limit", "10"]);
    assert_eq!(exit_code(&guarded), 2);
    assert!(stderr(&guarded).contains("limit"));
}

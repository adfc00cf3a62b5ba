use std::path::Path;
use std::process::Command;

use fuzzy_tcp::cli::run;
use fuzzy_tcp::elicitation::validate_partition;
use fuzzy_tcp::io;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("fuzzy-tcp").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

#[test]
fn infer_prints_priority() {
    let (code, out, err) = call(&["infer", "20", "65"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "priority 81.22 (High)\n");
    assert!(err.is_empty());
}

#[test]
fn infer_explain_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("agg.csv");
    let (code, out, _) = call(&["infer", "20", "65", "--explain", "--plot-out", plot.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("Rule 16") && out.contains("Rule 20"), "{out}");
    let csv = std::fs::read_to_string(plot).unwrap();
    assert_eq!(csv.lines().count(), 1001);
}

#[test]
fn structured_and_text_outputs_agree() {
    let (_, text, _) = call(&["prioritize"]);
    let (code, json, _) = call(&["--format", "structured", "prioritize"]);
    assert_eq!(code, 0);
    let rows: Vec<Value> = serde_json::from_str(&json).unwrap();
    let text_rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), text_rows.len());
    for (row, line) in rows.iter().zip(text_rows) {
        let cols: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cols[1], row["id"].to_string());
        assert!(line.contains(&format!("{:.2}", row["final_score"].as_f64().unwrap())));
    }

    let (_, text, _) = call(&["infer", "33", "41"]);
    let (_, json, _) = call(&["--format", "structured", "infer", "33", "41"]);
    let doc: Value = serde_json::from_str(&json).unwrap();
    let expected = format!("priority {:.2} ({})\n", doc["priority"].as_f64().unwrap(), doc["level"].as_str().unwrap());
    assert_eq!(text, expected);
}

#[test]
fn commands_are_deterministic() {
    for args in [&["prioritize"][..], &["schedule", "--mode", "fresh-chain"], &["infer", "7", "93"]] {
        assert_eq!(call(args), call(args));
    }
}

#[test]
fn schedule_evaluate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let fuzzy = dir.path().join("fuzzy.json");
    let unsorted = dir.path().join("unsorted.json");
    let (code, _, err) = call(&["schedule", "--out", fuzzy.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (code, _, err) = call(&["schedule", "--order", "dataset", "--out", unsorted.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");

    let faults = data("faults-example.txt");
    let (code, out, err) = call(&["evaluate", fuzzy.to_str().unwrap(), unsorted.to_str().unwrap(), "--faults", &faults]);
    assert_eq!(code, 0, "{err}");
    let header = out.lines().next().unwrap();
    assert!(header.contains("fuzzy") && header.contains("unsorted"), "{out}");
    assert!(header.find("fuzzy") < header.find("unsorted"));
    let found = out.lines().find(|l| l.starts_with("Failures found")).unwrap();
    assert_eq!(found.split_whitespace().filter(|w| *w == "5").count(), 2, "{out}");

    let (_, json, _) = call(&[
        "--format",
        "structured",
        "evaluate",
        fuzzy.to_str().unwrap(),
        unsorted.to_str().unwrap(),
        "--faults",
        &faults,
    ]);
    let reports: Vec<Value> = serde_json::from_str(&json).unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["total_time"], 495.0);
    assert_eq!(reports[1]["executed"], 20);
}

#[test]
fn evaluate_rejects_unsound_plans() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"version": 1, "mode": "run-once", "steps": [
            {"id": 4, "reason": "ranked", "name": "Open profile", "exec_time": 5, "cumulative_time": 5}
        ], "total_time": 5}"#,
    )
    .unwrap();
    let (code, out, err) = call(&["evaluate", bad.to_str().unwrap(), "--faults", &data("faults-example.txt")]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.starts_with("error: "), "{err}");
}

#[test]
fn elicit_produces_a_valid_partition() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("et.json");
    let (code, out, err) =
        call(&["elicit", &data("survey-execution-time.csv"), "--var", "execution-time", "--out", out_path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let vars = io::load_variables(&out_path).unwrap();
    assert_eq!(io::parse_variables(&out, Path::new("stdout")).unwrap(), vars);
    assert!(validate_partition(&vars[0]).is_empty());
    assert_eq!(vars[0].name(), "ExecutionTime");
}

#[test]
fn validate_reports_findings() {
    let (code, out, _) = call(&["validate"]);
    assert_eq!((code, out.as_str()), (0, "ok\n"));

    let dir = tempfile::tempdir().unwrap();
    let vars = dir.path().join("gap.json");
    std::fs::write(
        &vars,
        r#"{"name": "G", "unit": "", "universe": [0, 50], "terms": [
            {"label": "A", "shape": "trapezoidal", "params": [0, 0, 10, 20]},
            {"label": "B", "shape": "trapezoidal", "params": [25, 30, 50, 50]}]}"#,
    )
    .unwrap();
    let (code, out, _) = call(&["--variables", vars.to_str().unwrap(), "validate"]);
    assert_eq!(code, 1);
    assert!(out.contains("coverage gap"), "{out}");
}

#[test]
fn bad_arguments_fail() {
    let (code, out, err) = call(&["infer", "abc", "5"]);
    assert_ne!(code, 0);
    assert!(out.is_empty());
    assert!(!err.is_empty());

    let (code, _, err) = call(&["prioritize", "--dataset", "/no/such/file.csv"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: ") && err.contains("/no/such/file.csv"), "{err}");

    let (code, _, _) = call(&["--resolution", "0", "infer", "1", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_fuzzy-tcp");
    let ok = Command::new(bin).args(["infer", "20", "65"]).output().unwrap();
    assert!(ok.status.success());
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "priority 81.22 (High)\n");

    let bad = Command::new(bin).args(["infer", "abc", "5"]).output().unwrap();
    assert!(!bad.status.success());
    assert!(bad.stdout.is_empty());

    let warn = Command::new(bin).args(["infer", "130", "50"]).output().unwrap();
    assert!(warn.status.success());
    assert!(String::from_utf8_lossy(&warn.stderr).contains("clamp"), "{:?}", warn);
}

use std::path::PathBuf;
use std::process::{Command, Output};

use agd::algebroid::verify_algebroid;
use agd::dsl::{build_named_extension, export_extension, load_model, load_str, run};
use agd::report::Status;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn agd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agd"))
        .args(args)
        .output()
        .expect("binary runs")
}

const FIXTURES: [&str; 4] = ["so3_action.agd", "mackenzie.agd", "closed_form.agd", "shear.agd"];

#[test]
fn every_fixture_passes() {
    for name in FIXTURES {
        let model = load_model(fixture(name)).unwrap();
        let report = run(&model, None).unwrap();
        assert!(!report.entries.is_empty(), "{name}");
        assert!(!report.failed(), "{name}:\n{report}");
        assert_eq!(report.exit_code(), 0);
    }
}

#[test]
fn entries_follow_declaration_order() {
    let model = load_model(fixture("so3_action.agd")).unwrap();
    let report = run(&model, None).unwrap();
    let mut seen: Vec<&str> = report.entries.iter().map(|e| e.task.as_str()).collect();
    seen.dedup();
    let declared: Vec<&str> = model.tasks.iter().map(|t| t.name.as_str()).collect();
    assert_eq!(seen, declared);
}

fn keys(v: &Value) -> Vec<&str> {
    let mut k: Vec<&str> = v.as_object().expect("object").keys().map(String::as_str).collect();
    k.sort_unstable();
    k
}

#[test]
fn json_report_schema() {
    let path = fixture("closed_form.agd");
    let src = std::fs::read_to_string(&path)
        .unwrap()
        .replace("zeta d_x1 d_x3: x2", "zeta d_x1 d_x3: -x2");
    let out = run(&load_str(&src).unwrap(), None).unwrap();
    let json: Value = serde_json::from_str(&out.to_json()).unwrap();
    assert_eq!(keys(&json), ["entries", "warnings"]);
    let entries = json["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    let mut saw_residual = false;
    for e in entries {
        let k = keys(e);
        let required = ["check", "residuals", "status", "task", "wall_time_ms"];
        assert!(required.iter().all(|r| k.contains(r)), "{k:?}");
        assert!(k.iter().all(|x| required.contains(x) || *x == "note"), "{k:?}");
        assert!(["pass", "fail", "skipped"].contains(&e["status"].as_str().unwrap()));
        assert!(e["wall_time_ms"].as_f64().unwrap() >= 0.0);
        assert!(e["task"].is_string() && e["check"].is_string());
        for r in e["residuals"].as_array().unwrap() {
            assert_eq!(keys(r), ["at", "value"]);
            assert!(r["at"].is_string() && r["value"].is_string());
            saw_residual = true;
        }
    }
    assert!(saw_residual);
    assert!(json["warnings"].as_array().unwrap().iter().all(Value::is_string));
}

#[test]
fn exit_code_zero_when_everything_passes() {
    let out = agd(&["check", fixture("so3_action.agd").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().ends_with("0 failed, 0 skipped"), "{text}");
}

#[test]
fn exit_code_one_lists_the_failing_residual() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flipped.agd");
    let src = std::fs::read_to_string(fixture("closed_form.agd")).unwrap();
    std::fs::write(&path, src.replace("zeta d_x1 d_x3: x2", "zeta d_x1 d_x3: -x2")).unwrap();
    let out = agd(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[fail] strict"), "{text}");
    assert!(text.contains("at (d_x1, d_x2, d_x3): 2*e"), "{text}");
}

#[test]
fn exit_code_two_on_load_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.agd");
    std::fs::write(&path, "patch x1\ntask t3: classify zeta2\n").unwrap();
    let out = agd(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("`zeta2` is not declared") && err.contains("t3"), "{err}");
    assert_eq!(agd(&["check", "/nonexistent/model.agd"]).status.code(), Some(2));
}

#[test]
fn empty_filter_warns_and_exits_zero() {
    let out = agd(&[
        "check",
        fixture("so3_action.agd").to_str().unwrap(),
        "--task",
        "nothing*",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("no task matches `nothing*`"));
    assert!(String::from_utf8(out.stdout).unwrap().contains("0 checks"));
}

#[test]
fn json_format_flag() {
    let out = agd(&[
        "check",
        fixture("so3_action.agd").to_str().unwrap(),
        "--task",
        "verify_*",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let tasks: Vec<&str> = json["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["task"].as_str().unwrap())
        .collect();
    assert!(tasks.iter().all(|t| t.starts_with("verify_")));
    assert!(tasks.contains(&"verify_K"));
}

fn round_trip(file: &str, ext: &str, rank: usize) {
    let model = load_model(fixture(file)).unwrap();
    let built = build_named_extension(&model, ext).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("export.agd");
    export_extension(&model, ext, &out).unwrap();
    let back = load_model(&out).unwrap();
    let a = &back.algebroids[ext];
    assert_eq!(a.rank(), rank);
    assert_eq!(a.structure(), built.a.structure());
    assert_eq!(a.anchor_matrix(), built.a.anchor_matrix());
    assert!(verify_algebroid(a).passed());
    let report = run(&back, None).unwrap();
    assert!(
        !report.failed() && report.entries.iter().all(|e| e.status == Status::Pass),
        "{report}"
    );
}

#[test]
fn export_round_trips() {
    round_trip("so3_action.agd", "A", 6);
    round_trip("mackenzie.agd", "A", 5);
    round_trip("mackenzie.agd", "M", 5);
    round_trip("so3_action.agd", "B", 7);
}

#[test]
fn export_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.agd");
    let status = agd(&[
        "export",
        fixture("mackenzie.agd").to_str().unwrap(),
        "--extension",
        "M",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        status.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    assert_eq!(agd(&["check", out.to_str().unwrap()]).status.code(), Some(0));
    let missing = agd(&[
        "export",
        fixture("mackenzie.agd").to_str().unwrap(),
        "--extension",
        "nope",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn rank_zero_export_is_the_tangent_declaration() {
    let src = "patch x1 x2\nalgebroid T tangent\nalgebroid E\n  frame\nend\nadjustment adj\n  E = E\n  F = T\nend\nextension A = adj\n";
    let model = load_str(src).unwrap();
    let text = agd::dsl::export_extension_text(&model, "A").unwrap();
    let back = load_str(&text).unwrap();
    assert_eq!(
        back.algebroids["A"],
        agd::algebroid::tangent_algebroid(model.patch.as_ref().unwrap())
    );
}

#[test]
fn conventions_sheet() {
    let out = agd(&["conventions"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), agd::conventions::SHEET);
}

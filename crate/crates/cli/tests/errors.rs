use std::process::Command;

use logfan_cli::document::parse;
use logfan_cli::error::CliError;
use logfan_cli::report::{Outcome, ResultValue};
use logfan_cli::runner::{run, RunConfig};

fn doc(objects: &str, tasks: &str) -> String {
    format!(r#"{{"version": "logfan/1", "objects": [{objects}], "tasks": [{tasks}]}}"#)
}

#[test]
fn validation_errors() {
    let monoid = r#"{"name": "N", "kind": "monoid", "generators": [[1]]}"#;
    assert!(matches!(
        parse(&doc(monoid, r#"{"op": "saturate", "args": ["M"]}"#)),
        Err(CliError::UnresolvedReference { name, .. }) if name == "M"
    ));
    assert!(matches!(
        parse(&doc(monoid, r#"{"op": "hodge", "args": ["N"]}"#)),
        Err(CliError::KindMismatch { .. })
    ));
    assert!(matches!(
        parse(&doc(monoid, r#"{"op": "frobnicate", "args": ["N"]}"#)),
        Err(CliError::UnknownOperation { .. })
    ));
    assert!(matches!(
        parse(&doc(monoid, r#"{"op": "saturate", "args": ["N", "N"]}"#)),
        Err(CliError::Arity {
            expected: 1,
            found: 2,
            ..
        })
    ));
    assert!(matches!(
        parse(&doc(&format!("{monoid},{monoid}"), "")),
        Err(CliError::DuplicateName(n)) if n == "N"
    ));
    assert!(matches!(
        parse(r#"{"version": "logfan/9", "objects": [], "tasks": []}"#),
        Err(CliError::UnsupportedVersion(_))
    ));
}

#[test]
fn parse_errors_name_the_field() {
    let text = "{\"version\": \"logfan/1\",\n \"objects\": [{\"name\": \"x\", \"kind\": \"monoid\", \"generators\": [[\"a\"]]}]}";
    match parse(text) {
        Err(CliError::Parse { line, path, .. }) => {
            assert_eq!(line, 2);
            assert!(path.contains("generators"), "{path}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn failing_tasks_do_not_stop_later_ones() {
    let text = doc(
        r#"{"name": "A2", "kind": "complex", "fan": {"rays": [[1, 0], [0, 1]], "cones": [[0, 1]]}},
           {"name": "E", "kind": "model", "builtin": "nodal_cubic"},
           {"name": "bad", "kind": "model", "builtin": "marked_p1"}"#,
        r#"{"op": "star", "args": ["A2"], "params": {"cone": 3, "point": [-1, 1]}},
           {"op": "star", "args": ["A2"], "params": {"cone": 3}},
           {"op": "hodge", "args": ["bad"]},
           {"op": "euler_check", "args": ["E"]}"#,
    );
    let report = run(&parse(&text).unwrap(), RunConfig::default());
    let kinds: Vec<String> = report
        .tasks
        .iter()
        .map(|t| match &t.outcome {
            Outcome::Error(d) => d.kind.clone(),
            Outcome::Ok(_) => "ok".into(),
        })
        .collect();
    assert_eq!(
        kinds,
        [
            "RayOutsideSupport",
            "InvalidParams",
            "DependencyFailed",
            "ok"
        ]
    );
    assert!(matches!(
        &report.tasks[3].outcome,
        Outcome::Ok(v) if matches!(**v, ResultValue::Integer { .. })
    ));
    assert_eq!(report.exit_code(), 1);
}

#[test]
fn scope_errors_are_diagnostics() {
    let text = doc(
        r#"{"name": "E", "kind": "model", "builtin": "nodal_cubic"},
           {"name": "A", "kind": "model", "builtin": "affine_space", "d": 1},
           {"name": "L", "kind": "model", "builtin": "mixed_affine", "n": 1, "log": [0]},
           {"name": "g", "kind": "action", "model": "L", "group_orders": [2], "characters": [[1]]}"#,
        r#"{"op": "log_diagonal", "args": ["E"]},
           {"op": "euler_check", "args": ["A"]},
           {"op": "orbifold_hh", "args": ["g"], "params": {"order": 50}}"#,
    );
    let report = run(&parse(&text).unwrap(), RunConfig::default());
    let kinds: Vec<String> = report
        .tasks
        .iter()
        .map(|t| match &t.outcome {
            Outcome::Error(d) => d.kind.clone(),
            Outcome::Ok(_) => "ok".into(),
        })
        .collect();
    assert_eq!(kinds[0], "ok");
    assert_eq!(kinds[1], "SeriesNotSupported");
    assert_eq!(kinds[2], "TruncationTooSmall");
}

fn logfan(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_logfan"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

#[test]
fn exit_codes() {
    let (code, out) = logfan(&["check", "examples/nodal_cubic.lf.json"]);
    assert_eq!(code, 0);
    assert!(out.contains("1 objects, 3 tasks"));
    assert_eq!(logfan(&["run", "examples/r_lines.lf.json"]).0, 0);
    assert_eq!(logfan(&["run", "examples/missing.lf.json"]).0, 2);
    assert_eq!(
        logfan(&["run", "examples/nodal_cubic.lf.json", "--format", "dot"]).0,
        2
    );
    assert_eq!(
        logfan(&["run", "examples/nodal_cubic.lf.json", "--format", "yaml"]).0,
        2
    );

    let dir = std::env::temp_dir().join(format!("logfan-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let failing = dir.join("failing.lf.json");
    std::fs::write(
        &failing,
        doc(
            r#"{"name": "X", "kind": "model", "builtin": "projective_space", "d": 2},
               {"name": "F", "kind": "complex", "of_model": "X"}"#,
            r#"{"op": "star", "args": ["F"], "params": {"cone": 0, "point": [1]}},
               {"op": "hodge", "args": ["X"]}"#,
        ),
    )
    .unwrap();
    let (code, out) = logfan(&["run", failing.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("error"));
}

#[test]
fn truncation_flag_and_environment() {
    let (_, out) = logfan(&["run", "examples/orbifold_line.lf.json", "--truncation", "4"]);
    assert!(out.contains("O(t^5)"));
    let out = Command::new(env!("CARGO_BIN_EXE_logfan"))
        .args(["run", "examples/orbifold_line.lf.json", "--seed", "7"])
        .env("LOGFAN_TRUNCATION", "3")
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("O(t^4)"), "{text}");
}

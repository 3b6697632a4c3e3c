use std::collections::BTreeMap;
use std::path::PathBuf;

use logfan::logmodel::GradedEntry;
use logfan_cli::document::parse;
use logfan_cli::report::{emit, Format, Outcome, Report, ResultValue};
use logfan_cli::runner::{run, RunConfig};

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

fn examples() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> =
        std::fs::read_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.to_string_lossy().ends_with(".lf.json"))
            .collect();
    out.sort();
    out
}

fn run_file(path: &PathBuf, jobs: usize) -> Report {
    let doc = parse(&std::fs::read_to_string(path).unwrap()).unwrap();
    run(
        &doc,
        RunConfig {
            jobs,
            ..RunConfig::default()
        },
    )
}

fn value(report: &Report, index: usize) -> &ResultValue {
    match &report.tasks[index].outcome {
        Outcome::Ok(v) => v,
        Outcome::Error(d) => panic!("task {index} failed: {d:?}"),
    }
}

#[test]
fn every_example_parses_and_succeeds() {
    let files = examples();
    assert!(files.len() >= 6);
    for f in &files {
        let report = run_file(f, 0);
        assert!(report.succeeded(), "{}: {report:?}", f.display());
        assert_eq!(report.exit_code(), 0);
    }
}

#[test]
fn json_round_trips() {
    for f in examples() {
        let report = run_file(&f, 0);
        let text = emit(&report, Format::Json).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report, "{}", f.display());
    }
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    for f in examples() {
        let a = run_file(&f, 1);
        let b = run_file(&f, 4);
        for format in [Format::Text, Format::Json] {
            assert_eq!(emit(&a, format).unwrap(), emit(&b, format).unwrap());
        }
    }
}

#[test]
fn r_lines_give_r_components() {
    let report = run_file(&example("r_lines.lf.json"), 0);
    let counts: Vec<String> = (0..3)
        .map(|i| match value(&report, i) {
            ResultValue::Saturation(s) => s.components.to_string(),
            other => panic!("{other:?}"),
        })
        .collect();
    assert_eq!(counts, ["2", "3", "5"]);
}

#[test]
fn nodal_cubic_table() {
    let report = run_file(&example("nodal_cubic.lf.json"), 0);
    let ResultValue::Hochschild(h) = value(&report, 1) else {
        panic!("expected a Hochschild table");
    };
    let expected: BTreeMap<i64, GradedEntry> = [(-1, 1), (0, 2), (1, 1)]
        .into_iter()
        .map(|(n, v)| (n, GradedEntry::Finite(v)))
        .collect();
    assert_eq!(h.degrees, expected);

    let text = emit(&report, Format::Text).unwrap();
    let table: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.contains("hh_homology"))
        .skip(2)
        .take_while(|l| l.starts_with("  "))
        .collect();
    assert_eq!(table, ["      -1  1", "       0  2", "       1  1"]);

    let json: serde_json::Value =
        serde_json::from_str(&emit(&report, Format::Json).unwrap()).unwrap();
    let degrees = &json["tasks"][1]["outcome"]["ok"]["hochschild"]["degrees"];
    let keys: Vec<&String> = degrees.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["-1", "0", "1"]);
}

#[test]
fn waffle_dot_has_three_nodes_and_four_edges() {
    let report = run_file(&example("waffle.lf.json"), 0);
    let dot = emit(&report, Format::Dot).unwrap();
    let nodes = dot.lines().filter(|l| l.contains("[label=")).count();
    let edges: Vec<&str> = dot
        .lines()
        .filter(|l| l.contains("->"))
        .map(str::trim)
        .collect();
    assert_eq!(nodes, 3);
    assert_eq!(edges, ["c0 -> c1;", "c0 -> c2;", "c1 -> c2;", "c1 -> c2;"]);
    assert!(matches!(
        value(&report, 1),
        ResultValue::Flag { value: true }
    ));
}

#[test]
fn dot_needs_a_complex() {
    let report = run_file(&example("nodal_cubic.lf.json"), 0);
    assert!(emit(&report, Format::Dot).is_err());
}

#[test]
fn blowup_and_orbifold_examples() {
    let report = run_file(&example("diagonals.lf.json"), 0);
    assert_eq!(value(&report, 3), value(&report, 4));
    let ResultValue::Complex(b) = value(&report, 1) else {
        panic!("expected a complex");
    };
    assert_eq!(b.cones.len(), 2);

    let report = run_file(&example("orbifold_line.lf.json"), 0);
    let ResultValue::Sector(s) = value(&report, 0) else {
        panic!("expected a sector");
    };
    assert!(s.empty);
    let ResultValue::Hochschild(h) = value(&report, 3) else {
        panic!("expected a table");
    };
    assert_eq!(
        h.degrees[&0].as_series().unwrap().coeffs,
        [2, 0, 1, 0, 1, 0, 1]
    );
    assert!(matches!(
        value(&report, 4),
        ResultValue::Flag { value: false }
    ));
}

use geowalk::experiment::{self, QueryStatus, Scenario};
use geowalk::Error;

const SMALL: &str = r#"{
  "schema": 1,
  "name": "small",
  "domain": {"named": {"builder": "rectangle"}},
  "grid": {"h": 0.2, "m": 2},
  "metric": "quasihyperbolic",
  "queries": [
    {"name": "across", "from": [-2.5, 0.1], "to": [2.5, -0.1]},
    {"name": "stay", "from": [0.0, 0.0], "to": [0.0, 0.0]}
  ],
  "analyses": [
    {"kind": "medial_axis_fraction", "query": "across"},
    {"kind": "ratio", "numerator": "across", "denominator": "across"}
  ]
}"#;

fn small() -> Scenario {
    Scenario::from_json(SMALL).unwrap()
}

fn pointer_of(text: &str) -> String {
    match Scenario::from_json(text) {
        Err(Error::Scenario { pointer, .. }) => pointer,
        other => panic!("expected a scenario error, got {other:?}"),
    }
}

#[test]
fn builtins_survive_a_json_round_trip() {
    for name in experiment::builtin_names() {
        let s = experiment::builtin(name).unwrap();
        s.validate().unwrap();
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s, "{name}");
        assert_eq!(back.hash(), s.hash());
    }
    assert!(experiment::builtin("nope").is_none());
}

#[test]
fn hash_changes_with_content() {
    let a = small();
    let mut b = a.clone();
    b.grid.h = 0.1;
    assert_eq!(a.hash().len(), 64);
    assert_ne!(a.hash(), b.hash());
}

#[test]
fn parse_and_validation_errors_point_at_the_field() {
    assert_eq!(pointer_of(&SMALL.replace("\"schema\": 1", "\"schema\": 2")), "/schema");
    assert_eq!(pointer_of(&SMALL.replace("\"h\": 0.2", "\"h\": -0.2")), "/grid/h");
    assert_eq!(pointer_of(&SMALL.replace("\"m\": 2", "\"m\": 0")), "/grid/m");
    assert_eq!(pointer_of(&SMALL.replace("[2.5, -0.1]", "[9.0, 0.0]")), "/queries/0/to");
    assert_eq!(
        pointer_of(&SMALL.replace("\"name\": \"stay\"", "\"name\": \"across\"")),
        "/queries/1/name"
    );
    assert_eq!(
        pointer_of(&SMALL.replace("\"numerator\": \"across\"", "\"numerator\": \"ghost\"")),
        "/analyses/1/numerator"
    );
    let unknown = SMALL.replace("\"m\": 2", "\"m\": 2, \"colour\": 1");
    assert!(pointer_of(&unknown).starts_with("/grid"));
    assert!(matches!(Scenario::from_json("{"), Err(Error::Scenario { .. })));
}

#[test]
fn empty_query_list_runs_cleanly() {
    let mut s = small();
    s.queries.clear();
    s.analyses.clear();
    let r = experiment::run_scenario(&s).unwrap();
    assert!(r.queries.is_empty() && r.analyses.is_empty());
    assert_eq!(r.exit_code(), 0);
    let csv = experiment::summary_csv(&r).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn reports_lengths_and_analyses() {
    let r = experiment::run_scenario(&small()).unwrap();
    assert_eq!(r.exit_code(), 0);
    for q in &r.queries {
        assert_eq!(q.status, QueryStatus::Ok);
        let (len, check) = (q.length.unwrap(), q.validated_length.unwrap());
        assert!(
            (len - check).abs() <= 1e-12 * len.max(1.0),
            "{}: {len} vs {check}",
            q.name
        );
    }
    assert_eq!(r.length("stay"), Some(0.0));
    assert_eq!(r.path("stay").unwrap().len(), 1);
    let ratio = r.analyses.iter().find(|a| a.kind == "ratio").unwrap();
    assert_eq!(ratio.value("ratio"), Some(1.0));
    let fraction = r.analyses[0].value("fraction").unwrap();
    assert!((0.0..=1.0).contains(&fraction));
    assert_eq!(r.scenario_hash, small().hash());
}

#[test]
fn zero_length_path_csv_has_one_row() {
    let r = experiment::run_scenario(&small()).unwrap();
    let csv = experiment::path_csv(r.path("stay").unwrap()).unwrap();
    assert_eq!(csv.lines().count(), 2, "{csv}");
}

#[test]
fn blocked_query_reports_no_path_without_stopping_the_others() {
    let text = SMALL.replace(
        r#""to": [2.5, -0.1]}"#,
        r#""to": [2.5, -0.1], "barriers": [[[0.05, -2.0], [0.05, 2.0]]]}"#,
    );
    let r = experiment::run_scenario(&Scenario::from_json(&text).unwrap()).unwrap();
    assert_eq!(r.query("across").unwrap().status, QueryStatus::NoPath);
    assert_eq!(r.query("stay").unwrap().status, QueryStatus::Ok);
    assert_eq!(r.exit_code(), 3);
    assert!(r.analyses.iter().all(|a| a.error.is_some()));
}

#[test]
fn written_outputs_are_complete_and_reproducible() {
    let s = small();
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let w1 = experiment::write_outputs(&experiment::run_scenario(&s).unwrap(), &s, d1.path()).unwrap();
    experiment::write_outputs(&experiment::run_scenario(&s).unwrap(), &s, d2.path()).unwrap();
    let names: Vec<String> = w1
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for f in [
        "summary.csv",
        "analyses.csv",
        "path_0.csv",
        "path_1.csv",
        "figure.svg",
        "report.json",
    ] {
        assert!(names.iter().any(|n| n == f), "{f} missing from {names:?}");
    }
    for f in ["summary.csv", "analyses.csv", "path_0.csv", "path_1.csv", "figure.svg"] {
        let a = std::fs::read(d1.path().join(f)).unwrap();
        let b = std::fs::read(d2.path().join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between runs");
    }
    assert!(!d1
        .path()
        .read_dir()
        .unwrap()
        .any(|e| e.unwrap().path().extension().is_some_and(|x| x == "tmp")));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d1.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["scenario_hash"], s.hash());
}

#[test]
fn output_flags_suppress_files() {
    let mut s = small();
    s.outputs.svg = false;
    s.outputs.report = false;
    s.outputs.paths = false;
    let dir = tempfile::tempdir().unwrap();
    let written = experiment::write_outputs(&experiment::run_scenario(&s).unwrap(), &s, dir.path()).unwrap();
    assert_eq!(written.len(), 2);
}

#[test]
fn svg_draws_boundary_paths_and_decorations() {
    let s = experiment::asterisk(3);
    let r = experiment::run_scenario(&s).unwrap();
    let paths: Vec<_> = r.paths.iter().flatten().collect();
    let decorations = experiment::decorations(&r, &s);
    let svg = experiment::render_svg(
        r.domain.as_ref().unwrap(),
        &paths,
        &decorations,
        experiment::report_view(&r),
    );
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert_eq!(svg.matches("class=\"path\"").count(), paths.len());
    assert_eq!(svg.matches("class=\"inscribed\"").count(), 1);
    assert!(svg.contains("class=\"boundary\""));
}

#[test]
fn map_eval_lists_vertices_then_samples() {
    let csv = experiment::map_eval(r#"{"a": 0.4, "b": 0.5, "c": 1.1, "r": 0.5, "samples": [[0.0, 1.0], [2.0, 0.5]]}"#)
        .unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "kind,index,z_x,z_y,w_x,w_y");
    assert_eq!(rows.len(), 7);
    assert!(rows[1].starts_with("vertex,0,0,0,0,0"), "{}", rows[1]);
    assert!(rows[4].starts_with("vertex,3,inf,"));
    assert!(rows[5].starts_with("sample,0,"));
    let bad = experiment::map_eval(r#"{"a": 0.4, "b": 0.5, "c": 1.1, "r": 0.5, "extra": 1}"#);
    assert!(matches!(bad, Err(Error::Scenario { .. })));
}

#[test]
fn shipped_scenario_files_match_the_builtins() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    for name in experiment::builtin_names() {
        let text = std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap();
        assert_eq!(
            Scenario::from_json(&text).unwrap(),
            experiment::builtin(name).unwrap(),
            "{name}"
        );
    }
}

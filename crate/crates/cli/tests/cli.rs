use std::path::Path;
use std::process::{Command, Output};

fn tilings(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilings"))
        .args(args)
        .env_remove("TILINGS_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn mul_examples() {
    for (a, b, want) in [("U1", "R2", "0"), ("R2", "L2", "R2*L2"), ("I1", "U1", "U1")] {
        let out = tilings(&["mul", "-m", "4", a, b]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out).trim(), want, "{a} * {b}");
    }
}

#[test]
fn mul_parse_error_is_a_usage_error() {
    let out = tilings(&["mul", "-m", "4", "U1*(R2", "L2"]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("position"), "{err}");
}

#[test]
fn op_examples() {
    let cases: &[(&[&str], &str)] = &[
        (
            &[
                "op", "-m", "4", "-w", "0,0,0,0", "U1", "R2", "R3", "U4", "L3", "L2",
            ],
            "t*I1",
        ),
        (&["op", "-m", "3", "-w", "0,0,2", "U1^2", "U2^2"], "t^2*I1"),
        (&["op", "-m", "4", "-w", "0,0,0,0", "U1"], "0"),
    ];
    for (args, want) in cases {
        let out = tilings(args);
        assert_eq!(code(&out), 0, "{args:?}");
        assert_eq!(stdout(&out).trim(), *want, "{args:?}");
    }
}

#[test]
fn op_rejects_a_short_weight() {
    let out = tilings(&["op", "-m", "4", "-w", "0,0", "U1", "R2"]);
    assert_ne!(code(&out), 0);
}

#[test]
fn enumerate_json_matches_census_and_loads_back() {
    let out = tilings(&["--format", "json", "enumerate", "-m", "4", "-d", "1"]);
    assert_eq!(code(&out), 0);
    let docs: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(docs.len(), 20);
    for doc in &docs {
        let g = tilings_core::tiling::TilingGraph::from_json(doc).unwrap();
        assert!(g.validate().is_valid());
        assert_eq!(&g.to_json(), doc);
    }
}

#[test]
fn enumerate_dot_has_one_document_per_graph() {
    let out = tilings(&["--format", "dot", "enumerate", "-m", "4", "-d", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).matches("digraph").count(), 20);
}

#[test]
fn enumerate_over_budget_exits_2() {
    let out = tilings(&["enumerate", "-m", "4", "-d", "99"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn enumerate_output_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = (0..2)
        .map(|k| dir.path().join(format!("g{k}.json")))
        .collect();
    for f in &files {
        let out = tilings(&[
            "--format",
            "json",
            "enumerate",
            "-m",
            "3",
            "-d",
            "2",
            "--output",
            f.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(
        std::fs::read(&files[0]).unwrap(),
        std::fs::read(&files[1]).unwrap()
    );
    let docs: Vec<serde_json::Value> =
        serde_json::from_slice(&std::fs::read(&files[0]).unwrap()).unwrap();
    assert_eq!(docs.len(), 36);
}

#[test]
fn verify_passes_at_desk_scale() {
    for args in [
        [
            "verify",
            "-m",
            "4",
            "--grading-bound",
            "8",
            "--weight-bound",
            "1",
        ],
        [
            "verify",
            "-m",
            "3",
            "--grading-bound",
            "8",
            "--weight-bound",
            "2",
        ],
    ] {
        let out = tilings(&args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn verify_reports_budget_abort() {
    let out = tilings(&["verify", "-m", "4", "--grading-bound", "40", "--d-max", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.jsonl");
    let out = tilings(&[
        "verify",
        "-m",
        "3",
        "--grading-bound",
        "6",
        "--weight-bound",
        "1",
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(lines.len() > 1);
    assert!(lines.iter().any(|l| l.get("summary").is_some()));
}

#[test]
fn index_build_fills_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let out = tilings(&["--cache", cache, "index-build", "-m", "3", "-d", "2"]);
    assert_eq!(code(&out), 0);
    let file = Path::new(cache).join(tilings_core::enumerator::OperationIndex::cache_file_name(
        3, 2,
    ));
    let bytes = std::fs::read(&file).unwrap();
    // Operations then use the cached file.
    let out = tilings(&[
        "--cache", cache, "op", "-m", "3", "-w", "0,0,2", "U1^2", "U2^2",
    ]);
    assert_eq!(stdout(&out).trim(), "t^2*I1");
    assert_eq!(std::fs::read(&file).unwrap(), bytes);
}

#[test]
fn gradings_prints_both_gradings() {
    let out = tilings(&["gradings", "-m", "4", "t*I1"]);
    assert_eq!(code(&out), 0);
    assert!(!stdout(&out).trim().is_empty());
}

#[test]
fn help_and_unknown_commands() {
    assert_eq!(code(&tilings(&["--help"])), 0);
    assert_eq!(code(&tilings(&["frobnicate"])), 3);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn space(name: &str) -> String {
    repo_root()
        .join("spaces")
        .join(format!("{name}.json"))
        .display()
        .to_string()
}

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greedy-lab"))
        .args(args)
        .env_remove("GREEDY_LAB_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 output")
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON document per line"))
        .collect()
}

fn validator(schema: &str) -> jsonschema::JSONSchema {
    let path = repo_root().join("schemas").join(schema);
    let text = std::fs::read_to_string(&path).expect("schema file");
    let schema: Value = serde_json::from_str(&text).expect("schema is JSON");
    jsonschema::JSONSchema::compile(&schema).expect("schema compiles")
}

fn assert_valid(schema: &jsonschema::JSONSchema, doc: &Value) {
    if let Err(errors) = schema.validate(doc) {
        let msgs: Vec<String> = errors
            .map(|e| format!("{e} at {}", e.instance_path))
            .collect();
        panic!("{doc} violates schema: {msgs:?}");
    }
}

#[test]
fn norm_of_a_term_literal() {
    let o = lab(&["norm", "--space", &space("l2"), "--vector", "3e1 + 1e2"]);
    assert_eq!(o.status.code(), Some(0));
    let value: f64 = stdout(&o).trim().parse().unwrap();
    assert_eq!(value, 10f64.sqrt());
    let o = lab(&["norm", "--space", &space("l1"), "--vector", "1:-2,4:0.5"]);
    assert_eq!(stdout(&o).trim(), "2.5");
}

#[test]
fn malformed_space_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(
        &path,
        "{\n  \"name\": \"x\",\n  \"kind\": \"lp\"\n  \"params\": {}\n}\n",
    )
    .unwrap();
    let o = lab(&["norm", "--space", path.to_str().unwrap(), "--vector", "1:1"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("line 4 column 3"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn configuration_errors_exit_one() {
    let l1 = space("l1");
    let cases: Vec<Vec<&str>> = vec![
        vec!["verify", "--space", &l1, "--theorem", "no-such-theorem"],
        vec!["verify", "--space", &l1, "--lambda", "1/2"],
        vec!["constants", "--space", &l1, "--constant", "C_unknown"],
        vec![
            "sigma", "--space", &l1, "--vector", "1:1", "--m", "1", "--kind", "other",
        ],
        vec![
            "norm",
            "--space",
            "/nonexistent/space.json",
            "--vector",
            "1:1",
        ],
        vec!["norm", "--space", &l1, "--vector", "1:x"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = lab(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
    let o = lab(&["verify", "--space", &l1, "--theorem", "bogus"]);
    assert!(
        stderr(&o).contains("ul-property"),
        "unknown ids list the valid ones"
    );
    assert_eq!(lab(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_exit_codes_and_csv() {
    let o = lab(&[
        "verify",
        "--space",
        &space("l1"),
        "--theorem",
        "truncation",
        "--ambient",
        "8",
        "--output",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["theorem_id", "status", "worst_ratio", "bound_used"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "truncation");
    assert_eq!(&rows[0][1], "pass");

    let o = lab(&[
        "verify",
        "--space",
        &space("increasing-weights"),
        "--theorem",
        "unit-insertion",
        "--ambient",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let report = &json_lines(&o)[0];
    assert_eq!(report["status"], "fail");
    assert!(report["witness"].is_object());
}

#[test]
fn verify_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&[
        "verify",
        "--space",
        &space("l2"),
        "--theorem",
        "ul-property",
        "--ambient",
        "6",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let jsonl = std::fs::read(dir.path().join("reports.jsonl")).unwrap();
    assert_eq!(jsonl, o.stdout);
    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(csv.starts_with("theorem_id,status,worst_ratio,bound_used\nul-property,pass,"));
}

#[test]
fn reverse_conservative_is_exact_on_the_two_weight_space() {
    let o = lab(&[
        "constants",
        "--space",
        &space("counterexample"),
        "--constant",
        "Delta_rc",
        "--ambient",
        "32",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let est = &json_lines(&o)[0];
    assert_eq!(est["exact"], true);
    assert_eq!(est["name"], "Delta_rc");
    assert!(est["max_ratio"].as_f64().unwrap() > 1.0);
}

#[test]
fn emitted_json_matches_schemas() {
    let spec_schema = validator("space_spec.schema.json");
    let o = lab(&["corpus", "--ambient", "16"]);
    let corpus = json_lines(&o);
    assert_eq!(corpus.len(), 7);
    for doc in &corpus {
        assert_valid(&spec_schema, doc);
    }
    for entry in std::fs::read_dir(repo_root().join("spaces")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        assert_valid(&spec_schema, &serde_json::from_str(&text).unwrap());
    }

    let sigma_schema = validator("sigma_result.schema.json");
    for kind in ["reverse", "check", "hat", "pg_tail"] {
        let o = lab(&[
            "sigma",
            "--space",
            &space("l1"),
            "--vector",
            "1:1,2:-3,5:2",
            "--set",
            "2",
            "--m",
            "2",
            "--kind",
            kind,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_valid(&sigma_schema, &json_lines(&o)[0]);
    }

    let trace_schema = validator("greedy_trace.schema.json");
    let o = lab(&["greedy-trace", "--vector", "1:1,2:1,3:0.5", "--k", "3"]);
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1]["sets"].as_array().unwrap().len(), 1);
    for doc in &lines {
        assert_valid(&trace_schema, doc);
    }

    let estimate_schema = validator("constant_estimate.schema.json");
    for (constant, lambda) in [
        ("C_q", None),
        ("Delta_lambda_rc", Some("3/2")),
        ("C_lambda_rp", Some("2")),
    ] {
        let path = space("counterexample");
        let mut args = vec![
            "constants",
            "--space",
            &path,
            "--constant",
            constant,
            "--ambient",
            "6",
        ];
        if let Some(l) = lambda {
            args.extend(["--lambda", l]);
        }
        let o = lab(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_valid(&estimate_schema, &json_lines(&o)[0]);
    }

    let report_schema = validator("check_report.schema.json");
    for name in ["l1", "increasing-weights"] {
        let o = lab(&["verify", "--space", &space(name), "--ambient", "6"]);
        for doc in json_lines(&o) {
            assert_valid(&report_schema, &doc);
        }
    }
}

#[test]
fn worker_count_does_not_change_reports() {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_greedy-lab"))
            .args([
                "verify",
                "--space",
                &space("counterexample"),
                "--ambient",
                "8",
                "--seed",
                "5",
            ])
            .env("GREEDY_LAB_WORKERS", workers)
            .output()
            .unwrap()
    };
    let one = run("1");
    let three = run("3");
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(one.status.code(), three.status.code());
    let bad = run("zero");
    assert_eq!(bad.status.code(), Some(1));
}

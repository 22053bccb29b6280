use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn datum_file(name: &str, json: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("multiegs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multiegs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const CONSTANT: &str = r#"{"p": 3, "families": {"1": [[1, 1]], "2": [[1, 1]]}}"#;
const PERIODIC: &str = r#"{"p": 5, "vectors": [[1, 4, 0, 0], [0, 1, 4, 0]]}"#;
const GUPTA_SIDKI: &str = r#"{"p": 3, "vectors": [[1, 2]]}"#;

#[test]
fn classify_reports_the_case() {
    let f = datum_file("classify.json", PERIODIC);
    let out = run(&[
        "classify",
        "--input",
        f.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["classification"]["kind"], "multi-ggs");
    assert_eq!(v["classification"]["periodic"], true);
    assert_eq!(v["classification"]["threshold_k"], 3);
}

#[test]
fn verify_exit_code_follows_the_verdict() {
    let f = datum_file("verify.json", CONSTANT);
    let out = run(&[
        "verify",
        "--input",
        f.to_str().unwrap(),
        "--k",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"]["status"], "VERIFIED");
    assert_eq!(v["totals"]["pairs"], 16);

    let p = datum_file("undecided.json", PERIODIC);
    let out = run(&[
        "verify",
        "--input",
        p.to_str().unwrap(),
        "--k",
        "3",
        "--cap",
        "1",
        "--no-invariants",
        "--no-lifting",
        "--no-quotients",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).trim_end().ends_with("UNDECIDED"));
}

#[test]
fn verify_output_is_byte_identical() {
    let f = datum_file("determinism.json", PERIODIC);
    let args = [
        "verify",
        "--input",
        f.to_str().unwrap(),
        "--k",
        "3",
        "--format",
        "json",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    let threaded = run(&[&args[..], &["--threads", "2"]].concat());
    assert_eq!(first.stdout, threaded.stdout);
}

#[test]
fn invalid_or_out_of_scope_input_exits_3() {
    let bad = datum_file("bad.json", r#"{"p": 4, "vectors": [[1, 2, 3]]}"#);
    assert_eq!(
        run(&["classify", "--input", bad.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
    let malformed = datum_file("malformed.json", "{ nope");
    assert_eq!(
        run(&["classify", "--input", malformed.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
    let gs = datum_file("ggs.json", GUPTA_SIDKI);
    let out = run(&["verify", "--input", gs.to_str().unwrap(), "--k", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let p = datum_file("big.json", PERIODIC);
    let out = run(&["order", "--input", p.to_str().unwrap(), "--k", "6"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max-leaves"));
}

#[test]
fn tower_order_and_rank() {
    let gs = datum_file("tower.json", GUPTA_SIDKI);
    let out = run(&[
        "tower",
        "--input",
        gs.to_str().unwrap(),
        "--k",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let orders: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["order"].as_str().unwrap())
        .collect();
    assert_eq!(orders, ["3", "27", "2187"]);

    let p = datum_file("rank.json", PERIODIC);
    let ranks: Vec<String> = (1..=3)
        .map(|k| {
            stdout(&run(&[
                "rank",
                "--input",
                p.to_str().unwrap(),
                "--k",
                &k.to_string(),
            ]))
            .trim()
            .to_string()
        })
        .collect();
    assert_eq!(ranks, ["1", "2", "3"]);

    let out = run(&["order", "--input", p.to_str().unwrap(), "--k", "1"]);
    assert_eq!(stdout(&out).trim(), "5 = 5^1");
}

#[test]
fn element_prints_portrait_and_leaves() {
    let gs = datum_file("element.json", GUPTA_SIDKI);
    let out = run(&[
        "element",
        "--input",
        gs.to_str().unwrap(),
        "--k",
        "1",
        "--word",
        "a b1.1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("3 1\n1\n"), "{text}");
    assert!(text.contains("leaves 1 2 0"), "{text}");
    let out = run(&[
        "element",
        "--input",
        gs.to_str().unwrap(),
        "--k",
        "2",
        "--word",
        "b7.1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn lemma_suite_passes_on_the_symmetric_datum() {
    let f = datum_file(
        "lemmas.json",
        r#"{"p": 5, "families": {"1": [[1, 4, 4, 1]], "2": [[1, 4, 4, 1]]}}"#,
    );
    let out = run(&["lemmas", "--input", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(!text.contains("FAIL"), "{text}");
    assert_eq!(text.matches("order-of-b-b'").count(), 3);
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_funcert"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn topic_is_sat_with_witness() {
    let path = example("topic.fd");
    let o = run(&["solve", path.to_str().unwrap(), "--witness"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("status: sat\n"), "{out}");
    assert!(out.contains("witness 0"));
}

#[test]
fn cyclic_under_basic_reports_the_loop() {
    let path = example("cyclic.fd");
    let o = run(&["solve", path.to_str().unwrap(), "--control", "basic"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("loop detected; retry with --control quasi"));
    let o = run(&["solve", path.to_str().unwrap(), "--control", "auto"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("control: quasi"));
}

#[test]
fn parity_divergence_is_unsat() {
    let path = example("diverge_parity.fd");
    let o = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn parse_errors_exit_with_three() {
    let dir = std::env::temp_dir().join(format!("funcert-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.fd");
    std::fs::write(&bad, "features f;\nx <f y;\n").unwrap();
    let o = run(&["solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = run(&["solve", dir.join("missing.fd").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn records_and_trace_are_json_lines() {
    let dir = std::env::temp_dir().join(format!("funcert-trace-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let trace = dir.join("trace.jsonl");
    let path = example("topic.fd");
    let o = run(&[
        "solve",
        path.to_str().unwrap(),
        "--format",
        "records",
        "--witness",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let kinds: Vec<String> = stdout(&o)
        .lines()
        .map(|l| {
            serde_json::from_str::<serde_json::Value>(l).unwrap()["kind"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(kinds.first().map(String::as_str), Some("status"));
    assert_eq!(kinds.last().map(String::as_str), Some("stats"));
    assert!(kinds.iter().any(|k| k == "witness"));
    let steps = std::fs::read_to_string(&trace).unwrap();
    assert!(steps.lines().count() > 0);
    for line in steps.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["rule"].is_string());
    }
}

#[test]
fn output_is_deterministic() {
    for name in ["topic.fd", "cyclic.fd", "diverge_parity.fd"] {
        let path = example(name);
        let args = [
            "solve",
            path.to_str().unwrap(),
            "--witness",
            "--emit",
            "presolved",
            "--control",
            "quasi",
        ];
        assert_eq!(run(&args).stdout, run(&args).stdout, "{name}");
    }
}

#[test]
fn heuristic_and_strict_flags_are_accepted() {
    let path = example("topic.fd");
    let o = run(&[
        "solve",
        path.to_str().unwrap(),
        "--control",
        "heuristic",
        "--delay-threshold",
        "6",
        "--strict-paper",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("control: heuristic"));
}

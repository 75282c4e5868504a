//! End-to-end checks of the binary: exit codes, determinism, and the
//! evaluate/report round trip over a trimmed corpus.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn newsgen() -> Command {
    Command::new(env!("CARGO_BIN_EXE_newsgen"))
}

fn assets() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../assets")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

#[test]
fn generate_rule_realizes_the_sample_events() {
    let output = newsgen()
        .args(["generate", "--system", "rule", "--events"])
        .arg(assets().join("demo/sample_events.json"))
        .arg("--templates")
        .arg(assets().join("templates/news.tpl"))
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let text = stdout_of(&output);
    assert!(text.contains("Germany is well placed avoid wave of coronavirus."));
    assert!(text.contains("Moreover, we are living with the virus."));
}

#[test]
fn unknown_system_name_exits_2() {
    let output = newsgen()
        .args(["generate", "--system", "neural", "--events", "x.json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("neural"));
}

#[test]
fn missing_required_inputs_exit_2() {
    let output = newsgen()
        .args(["generate", "--system", "rule"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    let output = newsgen()
        .args(["evaluate", "--corpus", "/nonexistent.jsonl", "--config"])
        .arg(assets().join("config/experiment.json"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn stage_errors_exit_3_with_stage_tag() {
    let dir = tempfile::tempdir().unwrap();
    let events = dir.path().join("events.json");
    // valid event that no shipped template covers (verb only)
    std::fs::write(&events, r#"[{"subject":"","verb":"ran","object":""}]"#).unwrap();
    let output = newsgen()
        .args(["generate", "--system", "hybrid", "--events"])
        .arg(&events)
        .arg("--templates")
        .arg(assets().join("templates/news.tpl"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&output.stderr).contains("realize:"));
}

#[test]
fn hybrid_generation_is_deterministic_per_seed() {
    let run = || {
        let output = newsgen()
            .args(["generate", "--system", "hybrid", "--seed", "7", "--events"])
            .arg(assets().join("demo/sample_events.json"))
            .arg("--templates")
            .arg(assets().join("templates/news.tpl"))
            .arg("--lexicon")
            .arg(assets().join("lexicon.tsv"))
            .output()
            .unwrap();
        assert!(output.status.success());
        stdout_of(&output)
    };
    assert_eq!(run(), run());
}

#[test]
fn paraphrase_reads_stdin_and_preserves_line_count() {
    let mut child = newsgen()
        .args(["paraphrase", "--seed", "3", "--lexicon"])
        .arg(assets().join("lexicon.tsv"))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"The council approved a new plan.\nWork continues in Berlin.\n")
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success());
    let lines: Vec<String> = stdout_of(&output).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 2);
    for line in &lines {
        assert!(line.ends_with(['.', '!', '?']), "bad sentence: {line}");
    }
}

#[test]
fn evaluate_then_report_reproduces_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    // trim the demo corpus so the experiment stays fast
    let full = std::fs::read_to_string(assets().join("demo/corpus.jsonl")).unwrap();
    let trimmed: Vec<&str> = full.lines().take(40).collect();
    let corpus = dir.path().join("corpus.jsonl");
    std::fs::write(&corpus, trimmed.join("\n")).unwrap();

    let run_dir = dir.path().join("run");
    let output = newsgen()
        .args(["evaluate", "--corpus"])
        .arg(&corpus)
        .arg("--config")
        .arg(assets().join("config/experiment.json"))
        .args([
            "--groups",
            "2",
            "--train-fraction",
            "0.5",
            "--jobs",
            "2",
            "--out-dir",
        ])
        .arg(&run_dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let table = stdout_of(&output);
    assert!(table.contains("Contextual logic similarity"));
    assert!(table.contains("Machine writing style similarity"));
    assert!(table.contains("average"));

    let report = newsgen()
        .args(["report", "--run"])
        .arg(&run_dir)
        .output()
        .unwrap();
    assert!(report.status.success());
    let persisted = std::fs::read_to_string(run_dir.join("report.csv")).unwrap();
    assert_eq!(stdout_of(&report), persisted);
}

#[test]
fn evaluate_full_demo_corpus_prints_five_group_rows() {
    let output = newsgen()
        .args(["evaluate", "--corpus"])
        .arg(assets().join("demo/corpus.jsonl"))
        .arg("--config")
        .arg(assets().join("config/experiment.json"))
        .args(["--jobs", "2"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let table = stdout_of(&output);
    for group in 1..=5 {
        assert!(
            table.lines().any(|l| l.starts_with(&group.to_string())),
            "missing group {group} row in:\n{table}"
        );
    }
    assert_eq!(
        table.lines().filter(|l| l.starts_with("average")).count(),
        2,
        "one average row per metric table"
    );
    assert!(table.contains("rule: MC"));
    assert!(table.contains("baseline: HU"));
}

#[test]
fn split_writes_train_and_group_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("splits");
    let output = newsgen()
        .args(["split", "--corpus"])
        .arg(assets().join("demo/corpus.jsonl"))
        .args(["--groups", "5", "--seed", "42", "--out-dir"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    assert!(out_dir.join("train.jsonl").exists());
    for i in 1..=5 {
        assert!(out_dir.join(format!("group_{i}.jsonl")).exists());
    }
}

#[test]
fn version_prints_a_build_identifier() {
    let output = newsgen().arg("--version").output().unwrap();
    assert!(output.status.success());
    assert!(stdout_of(&output).contains(env!("CARGO_PKG_VERSION")));
}

//! End-to-end checks of the `robotalk` binary: flags, file outputs, and the
//! exit-code contract (0 success, 1 bad input, 2 tick limit exceeded).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn robotalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robotalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn simulate_water_plants_completes_and_summarizes() {
    let dir = tempfile::tempdir().unwrap();
    let transcript = dir.path().join("transcript.txt");
    let output = robotalk(&[
        "simulate",
        "--config",
        fixture("water_plants.json").to_str().unwrap(),
        "--transcript",
        transcript.to_str().unwrap(),
    ]);
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let summary = stdout(&output);
    assert!(
        summary.contains("tasks completed: 5/5"),
        "summary:\n{summary}"
    );
    assert!(
        summary.contains("outcome: completed"),
        "summary:\n{summary}"
    );

    let text = fs::read_to_string(&transcript).unwrap();
    assert!(text.lines().count() >= 5);
    assert!(
        text.contains("hey robot Hi all, I am Bot"),
        "transcript:\n{text}"
    );
    assert!(text.contains("[delivered]"));
}

#[test]
fn simulate_missing_config_exits_one() {
    let output = robotalk(&["simulate", "--config", "/nonexistent/scenario.json"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(!output.stderr.is_empty());
}

#[test]
fn simulate_malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"mode\": \"water_plants\"").unwrap();
    let output = robotalk(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn simulate_tick_limited_run_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let transcript = dir.path().join("partial.txt");
    let output = robotalk(&[
        "simulate",
        "--config",
        fixture("lossy_coordinating.json").to_str().unwrap(),
        "--transcript",
        transcript.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2), "{}", stdout(&output));
    assert!(stdout(&output).contains("tick limit exceeded"));
    // The partial transcript is still written.
    assert!(fs::read_to_string(&transcript).unwrap().contains("[lost]"));
}

#[test]
fn simulate_seed_override_changes_the_run() {
    let config = fixture("water_plants.json");
    let base = robotalk(&["simulate", "--config", config.to_str().unwrap()]);
    let overridden = robotalk(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "8",
    ]);
    assert_eq!(base.status.code(), Some(0));
    assert_eq!(overridden.status.code(), Some(0));
    assert!(stdout(&overridden).contains("seed: 8"));
    assert_ne!(stdout(&base), stdout(&overridden));
}

#[test]
fn wake_word_experiment_writes_the_expected_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let output = robotalk(&[
        "experiment",
        "wake-word",
        "--min",
        "10",
        "--max",
        "300",
        "--step",
        "10",
        "--trials",
        "20",
        "--noise-db",
        "20",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );

    let text = fs::read_to_string(&out).unwrap();
    let comments: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).collect();
    assert!(
        comments.iter().any(|l| l.contains("seed=7")),
        "header:\n{text}"
    );
    assert!(
        comments.iter().any(|l| l.contains("plateau_success")),
        "header:\n{text}"
    );

    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "distance_cm,trials,successes,rate");
    assert_eq!(rows.len() - 1, 30, "one row per distance point");
    for row in &rows[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 4);
        let trials: u32 = fields[1].parse().unwrap();
        let successes: u32 = fields[2].parse().unwrap();
        assert_eq!(trials, 20);
        assert!(successes <= trials);
        // rate is successes/trials at four decimals, exactly.
        let expected = format!("{:.4}", f64::from(successes) / f64::from(trials));
        assert_eq!(fields[3], expected);
    }
}

#[test]
fn zero_step_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let output = robotalk(&[
        "experiment",
        "wake-word",
        "--step",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn mode_experiment_produces_comparable_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |mode: &str, out: &Path| {
        let output = robotalk(&[
            "experiment",
            "mode",
            "--mode",
            mode,
            "--min",
            "20",
            "--max",
            "40",
            "--step",
            "10",
            "--trials",
            "10",
            "--noise-db",
            "20",
            "--seed",
            "7",
            "--jobs",
            "2",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(
            output.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&output.stderr)
        );
    };
    let coordinating = dir.path().join("c.csv");
    let volunteering = dir.path().join("v.csv");
    run("coordinating", &coordinating);
    run("volunteering", &volunteering);

    let parse_rows = |path: &Path| -> Vec<(String, f64)> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("distance_cm"))
            .map(|l| {
                let fields: Vec<&str> = l.split(',').collect();
                (fields[0].to_string(), fields[3].parse().unwrap())
            })
            .collect()
    };
    let c = parse_rows(&coordinating);
    let v = parse_rows(&volunteering);
    assert_eq!(c.len(), 3);
    assert_eq!(v.len(), 3);
    // Same distance grid, so the two files line up row for row.
    assert_eq!(
        c.iter().map(|(d, _)| d).collect::<Vec<_>>(),
        v.iter().map(|(d, _)| d).collect::<Vec<_>>()
    );
}

#[test]
fn lexicon_experiment_reports_both_settings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.csv");
    let output = robotalk(&[
        "experiment",
        "lexicon",
        "--trials",
        "400",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("with_lexicon,max_distance_cm"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("false,"));
    assert!(rows[2].starts_with("true,"));
}

#[test]
fn experiments_are_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for out in [&first, &second] {
        let output = robotalk(&[
            "experiment",
            "wake-word",
            "--trials",
            "10",
            "--seed",
            "123",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0));
    }
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn validate_tables_accepts_pristine_and_rejects_edited_rows() {
    let pristine = robotalk(&["validate-tables"]);
    assert_eq!(
        pristine.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&pristine.stderr)
    );

    // An edited "read" row must be caught and named.
    let dir = tempfile::tempdir().unwrap();
    let edited = dir.path().join("pronunciations.txt");
    let original =
        fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/pronunciations.txt"))
            .unwrap();
    fs::write(
        &edited,
        original.replace("read|r-ehd|r-eed|r-eed", "read|r-ehd|r-eed|r-ehd"),
    )
    .unwrap();
    let output = robotalk(&[
        "validate-tables",
        "--pronunciations",
        edited.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("read"), "stderr:\n{stderr}");

    let missing = robotalk(&[
        "validate-tables",
        "--confusions",
        "/nonexistent/confusions.txt",
    ]);
    assert_eq!(missing.status.code(), Some(1));
}

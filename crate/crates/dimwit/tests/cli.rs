use std::path::Path;
use std::process::{Command, Output};

use dimwit::format::{ConfigFile, SearchExport};

fn dimwit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimwit"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn gen_config_writes_builtin_angles() {
    let dir = tempfile::tempdir().unwrap();
    let o = dimwit(&["gen-config", "--config", "II-0", "--out", "c.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file: ConfigFile = serde_json::from_slice(&std::fs::read(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(file.id, "II-0");
    assert_eq!(file.preparations[4][1], std::f64::consts::FRAC_PI_2);
    assert!(stdout(&o).contains("n1 = "));
}

#[test]
fn custom_config_round_trips_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let custom = r#"{
  "id": "mine",
  "preparations": [[7.0, -0.1], [0.3, 0.2], [1.0, 2.0], [2.5, 0.7], [0.0, 1e-3]],
  "measurements": [[0.1, 0.2], [3.0, 1.0], [4.0, 5.0], [6.0, 0.5]]
}"#;
    std::fs::write(dir.path().join("in.json"), custom).unwrap();
    let o = dimwit(&["gen-config", "--config", "in.json", "--out", "a.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = dimwit(&["gen-config", "--config", "a.json", "--out", "b.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let file: ConfigFile = serde_json::from_slice(&a).unwrap();
    assert_eq!(file.preparations[0], [7.0, -0.1]);
}

#[test]
fn malformed_config_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        (
            "short.json",
            r#"{"id": "x", "preparations": [[0, 0]], "measurements": []}"#,
        ),
        (
            "text.json",
            r#"{"id": "x", "preparations": "none", "measurements": []}"#,
        ),
        (
            "repeated.json",
            r#"{"id": "x", "preparations": [[0,0],[0,0],[1,2],[2,3],[3,4]], "measurements": [[0,0],[1,1],[2,2],[3,3]]}"#,
        ),
    ] {
        std::fs::write(dir.path().join(name), body).unwrap();
        let o = dimwit(&["gen-config", "--config", name, "--out", "out.json"], dir.path());
        assert_eq!(o.status.code(), Some(2), "{name}: {}", stderr(&o));
        assert!(!dir.path().join("out.json").exists());
    }
}

#[test]
fn unknown_id_lists_valid_ids() {
    let dir = tempfile::tempdir().unwrap();
    let o = dimwit(&["gen-config", "--config", "III", "--out", "c.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("I-second") && stderr(&o).contains("II-4"));
}

#[test]
fn bad_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = dimwit(
        &["simulate", "--config", "II-0", "--jobs", "many", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let o = dimwit(
        &["simulate", "--config", "II-0", "--jobs", "0", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let o = dimwit(
        &[
            "simulate",
            "--config",
            "II-0",
            "--leak-lambda",
            "1.5",
            "--out",
            "r.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let o = dimwit(&["optimize", "--dim", "5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, out: &str| {
        let args = [
            "simulate",
            "--config",
            "I-prime",
            "--jobs",
            "6",
            "--shots",
            "500",
            "--reps",
            "3",
            "--seed",
            seed,
            "--drift-eps",
            "0.01",
            "--out",
            out,
        ];
        let o = dimwit(&args, dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(run("4", "a.json"), run("4", "b.json"));
    assert_ne!(run("4", "a.json"), run("5", "c.json"));
}

#[test]
fn simulate_echoes_budget_and_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate", "--config", "II-0", "--jobs", "60", "--shots", "32000", "--reps", "15", "--out", "r.json",
    ];
    let o = dimwit(&args, dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("T = 28800000"));
    assert!(stdout(&o).contains("sigma = "));
}

#[test]
fn simulate_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let sim = [
        "simulate", "--config", "II-1", "--jobs", "20", "--shots", "20000", "--reps", "2", "--seed", "9", "--out",
        "r.json",
    ];
    assert_eq!(dimwit(&sim, dir.path()).status.code(), Some(0));
    let o = dimwit(&["analyze", "r.json", "--out", "s.csv", "--svg", "s.svg"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(
        text.contains("per-job") && text.contains("pooled") && text.contains("PASS"),
        "{text}"
    );
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(csv.starts_with("job,job_id,w,sigma\n"));
    assert_eq!(csv.lines().count(), 21);
    let svg = std::fs::read_to_string(dir.path().join("s.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<circle").count() == 20);

    let o = dimwit(&["analyze", "r.json", "--out", "t.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv, std::fs::read_to_string(dir.path().join("t.csv")).unwrap());
}

#[test]
fn coherent_leak_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let sim = [
        "simulate",
        "--config",
        "II-0",
        "--jobs",
        "20",
        "--shots",
        "100000",
        "--reps",
        "8",
        "--coherent-leak",
        "0.3",
        "--out",
        "r.json",
    ];
    assert_eq!(dimwit(&sim, dir.path()).status.code(), Some(0));
    let o = dimwit(&["analyze", "r.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn record_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("empty.json"),
        r#"{"config_id": "a", "device": "d", "jobs": []}"#,
    )
    .unwrap();
    let o = dimwit(&["analyze", "empty.json"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("jobs"));

    std::fs::write(
        dir.path().join("typo.json"),
        r#"{"config_id": "a", "device": "d", "jobs": [{"job_id": "j", "shots": -3, "repetitions": 1, "counts": []}]}"#,
    )
    .unwrap();
    let o = dimwit(&["analyze", "typo.json"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("jobs[0].shots"), "{}", stderr(&o));

    std::fs::write(
        dir.path().join("short.json"),
        r#"{"config_id": "a", "device": "d", "jobs": [{"job_id": "j", "shots": 1, "repetitions": 1, "counts": [[[0, 1]]]}]}"#,
    )
    .unwrap();
    let o = dimwit(&["analyze", "short.json"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("jobs[0].counts"), "{}", stderr(&o));
}

#[test]
fn io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = dimwit(&["analyze", "absent.json"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let o = dimwit(
        &["gen-config", "--config", "II-0", "--out", "no/such/dir/c.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn audit_drift_reports_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = dimwit(
        &["audit-drift", "--config", "II-0", "--drift-eps", "0", "--trials", "10"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("PASS").count(), 2);
    let args = [
        "audit-drift",
        "--config",
        "II-0",
        "--drift-eps",
        "0.01",
        "--trials",
        "300",
        "--out",
        "a.csv",
    ];
    let o = dimwit(&args, dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1.131371e-2"), "{}", stdout(&o));
    let csv = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert!(csv.starts_with("mode,epsilon,trials,max_abs_w,bound,fraction,verdict\n"));
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",PASS")));
}

#[test]
fn optimize_reports_targets() {
    let dir = tempfile::tempdir().unwrap();
    let o = dimwit(&["optimize", "--dim", "2", "--restarts", "5"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("target   = 0.0000000"), "{}", stdout(&o));

    let args = [
        "optimize",
        "--dim",
        "3",
        "--field",
        "real",
        "--restarts",
        "20",
        "--seed",
        "1",
        "--out",
        "s.json",
    ];
    let o = dimwit(&args, dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("target   = 0.5966213"), "{}", stdout(&o));
    let export: SearchExport = serde_json::from_slice(&std::fs::read(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(export.restart_values.len(), 20);
    assert_eq!(export.prob_matrix[4], [1.0; 5]);
    assert!((export.best_w - 27.0 * 2f64.sqrt() / 64.0).abs() < 1e-6);

    let o = dimwit(&["optimize", "--dim", "4", "--restarts", "2"], dir.path());
    assert!(stdout(&o).contains("target   = 1.8728852"), "{}", stdout(&o));
}

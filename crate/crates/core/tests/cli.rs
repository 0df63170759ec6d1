use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sldp::io::ProblemFile;

fn problems() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems")
}

fn sldp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sldp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_accepts_shipped_files() {
    for name in ["caroe_n2_int.json", "control_t3.json"] {
        let out = sldp(&["validate", "--problem", path_str(&problems().join(name))]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn bad_probabilities_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = ProblemFile::read(&problems().join("caroe_n2_int.json")).unwrap();
    for s in &mut file.scenarios[1] {
        s.probability = 0.225;
    }
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, file.to_json()).unwrap();
    let out = sldp(&["validate", "--problem", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scenarios[1]"));
}

#[test]
fn malformed_json_reports_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(problems().join("caroe_n2_int.json")).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, text.replacen("\"sense\": \"<=\"", "\"sense\": \"<\"", 1)).unwrap();
    let out = sldp(&["solve", "--problem", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("templates[1].rows[0].sense"), "{err}");
}

#[test]
fn solver_failures_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = ProblemFile::read(&problems().join("caroe_n2_int.json")).unwrap();
    // y1 + ... <= -100 with binary y and nonnegative copies has no solution.
    file.templates[1].rows[0].rhs = -100.0;
    let bad = dir.path().join("infeasible.json");
    std::fs::write(&bad, file.to_json()).unwrap();
    let out = sldp(&["solve", "--problem", path_str(&bad), "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn solve_writes_artifacts_and_reaches_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = sldp(&[
        "solve",
        "--problem",
        path_str(&problems().join("caroe_n2_int.json")),
        "--cuts",
        "sab",
        "--iters",
        "200",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let result: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    let lb = result["lower_bound"].as_f64().unwrap();
    assert!((lb + 57.0).abs() <= 1e-3, "lb {lb}");
    assert_eq!(result["seed"], 0);
    let csv = std::fs::read_to_string(dir.path().join("iterations.csv")).unwrap();
    assert!(csv.starts_with("iter,lb,cuts_total,stage_solves\n"));
    assert_eq!(csv.lines().count(), 201);
}

#[test]
fn iteration_logs_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = sldp(&[
            "solve",
            "--problem",
            path_str(&problems().join("control_t3.json")),
            "--cuts",
            "sab",
            "--mode",
            "sampled",
            "--iters",
            "15",
            "--seed",
            "4",
            "--sim-samples",
            "10",
            "--out",
            path_str(dir.path()),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("iterations.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn oracle_suite_reproduces_the_optima() {
    let dir = tempfile::tempdir().unwrap();
    let out = sldp(&["oracle", "--suite", "caroe", "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for v in ["-57.000", "-59.333", "-61.222"] {
        assert!(text.contains(v), "{text}");
    }
    for n in [2, 3, 6] {
        let grid = std::fs::read_to_string(dir.path().join(format!("oracle_caroe_n{n}.csv"))).unwrap();
        assert_eq!(grid.lines().count(), 37);
    }
}

#[test]
fn bad_flags_exit_with_code_two() {
    let out = sldp(&["solve", "--problem", "x.json", "--cuts", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sldp(&["solve", "--problem", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

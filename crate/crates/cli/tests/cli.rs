use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn willmore(dir: &Path, args: &[&str], config: &str) -> Output {
    let path = dir.join("config.json");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_willmore"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn csv_rows(dir: &Path, command: &str) -> Vec<Vec<String>> {
    let text = fs::read_to_string(dir.join("out").join(format!("{command}.csv"))).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# willmore"));
    lines.skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn column(dir: &Path, file: &str) -> Vec<f64> {
    let text = fs::read_to_string(dir.join("out").join("plot").join(file)).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# t\t"));
    lines.map(|l| l.split('\t').nth(1).unwrap().parse().unwrap()).collect()
}

#[test]
fn thm11_equality_case_exits_zero() {
    let dir = TempDir::new().unwrap();
    let out = willmore(
        dir.path(),
        &["thm11"],
        r#"{"command": "thm11", "manifold": "hyperbolic", "profile": "zero", "n": 2, "r0": 1}"#,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(dir.path(), "thm11");
    assert_eq!(rows.len(), 1);
    let (lhs, rhs, margin): (f64, f64, f64) =
        (rows[0][5].parse().unwrap(), rows[0][6].parse().unwrap(), rows[0][7].parse().unwrap());
    assert!(margin.abs() <= 1e-6 * rhs && (lhs - rhs).abs() <= 1e-6 * rhs);
    assert_eq!(rows[0][13], "true");
}

#[test]
fn lemma31_rejects_q_at_the_boundary() {
    let dir = TempDir::new().unwrap();
    let out = willmore(dir.path(), &["lemma31"], r#"{"p": 2, "q": 1.0}"#);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q must be"));
}

#[test]
fn lemma31_flags_override_config() {
    let dir = TempDir::new().unwrap();
    let out = willmore(dir.path(), &["lemma31", "--q", "3", "--eps-grid", "1,0.1"], r#"{"p": 2, "q": 1.0}"#);
    assert_eq!(out.status.code(), Some(0));
    // two eps values give two rows each plus the vanishing row
    assert_eq!(csv_rows(dir.path(), "lemma31").len(), 5);
}

#[test]
fn sweep_over_equality_cases() {
    let dir = TempDir::new().unwrap();
    let out = willmore(dir.path(), &["sweep"], r#"{"ns": [1, 2, 3], "r0s": [0.5, 1, 2]}"#);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(dir.path(), "sweep");
    assert_eq!(rows.len(), 9);
    let order: Vec<(&str, &str)> = rows.iter().map(|r| (r[1].as_str(), r[3].as_str())).collect();
    assert_eq!(order[0], ("1", "0.5"));
    assert_eq!(order[5], ("2", "2.0"));
    assert!(rows.iter().all(|r| r[13] == "true"));
}

#[test]
fn sweep_output_is_independent_of_thread_count() {
    let config = r#"{"ns": [1, 2], "r0s": [0.5, 1], "r_eval": 20}"#;
    let run = |threads: &str| {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("config.json");
        fs::write(&path, config).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_willmore"))
            .args(["sweep", "--config"])
            .arg(&path)
            .arg("--out")
            .arg(dir.path())
            .env("WILLMORE_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        fs::read(dir.path().join("sweep.csv")).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn malformed_config_reports_a_line() {
    let dir = TempDir::new().unwrap();
    let out = willmore(dir.path(), &["thm11"], "{\n  \"n\": 2,\n  \"r0\": ,\n}\n");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("config.json:3:"), "{err}");

    let out = willmore(dir.path(), &["thm11"], "{\n  \"n\": 2,\n\n  \"step\": 0.02\n}\n");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("config.json:4:") && err.contains("step"), "{err}");

    let out = willmore(dir.path(), &["thm11"], r#"{"n": 2, "r0": -1}"#);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn command_mismatch_is_an_error() {
    let dir = TempDir::new().unwrap();
    let out = willmore(dir.path(), &["thm12"], r#"{"command": "thm11"}"#);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn violation_beyond_tolerance_exits_two() {
    // the zero-profile bounds hold with equality, so rounding noise of order 1e-13
    // exceeds a tolerance of 1e-20
    let dir = TempDir::new().unwrap();
    let out = willmore(dir.path(), &["lemma21", "--tol", "1e-20"], r#"{"profile": "zero", "t_max": 5}"#);
    assert_eq!(out.status.code(), Some(2));
    let rows = csv_rows(dir.path(), "lemma21");
    assert!(rows.iter().any(|r| r[5] == "false"));
    for r in rows {
        let margin: f64 = r[4].parse().unwrap();
        assert_eq!(r[5] == "true", margin >= -1e-20);
    }
}

#[test]
fn plot_data_is_monotone() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"profile": {"family": "exponential", "a": 1, "c": 1}, "t_max": 10, "plot": true}"#;
    assert_eq!(willmore(dir.path(), &["lemma21"], config).status.code(), Some(0));
    let up = column(dir.path(), "lemma21_0_psi1_over_sinh.dat");
    assert!(up.len() > 100 && up.windows(2).all(|w| w[1] >= w[0]));

    assert_eq!(willmore(dir.path(), &["lemma22"], config).status.code(), Some(0));
    let down = column(dir.path(), "lemma22_0_psi2_over_psi1.dat");
    assert!(down.len() > 100 && down.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn riccati_and_thm12_commands() {
    let dir = TempDir::new().unwrap();
    let out = willmore(dir.path(), &["riccati-blowup"], r#"{"profile": {"family": "exponential", "a": 1, "c": 1}}"#);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(dir.path(), "riccati-blowup");
    assert!(rows.iter().filter(|r| r[2] == "blow_up").all(|r| r[3].parse::<f64>().unwrap().is_finite()));

    let config = r#"{"warp": {"psi1": {"family": "smooth_bump", "a": 0.1, "t_lo": 1, "t_hi": 2}}, "r0": 0.5, "p": 2}"#;
    assert_eq!(willmore(dir.path(), &["thm12"], config).status.code(), Some(0));
    let rows = csv_rows(dir.path(), "thm12");
    assert!(rows[0][11].parse::<f64>().unwrap() > 0.0);
}

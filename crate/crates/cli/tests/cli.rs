use std::path::Path;
use std::process::{Command, Output};

fn axiswalk(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_axiswalk"));
    cmd.args(args).env_remove("AXISWALK_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn listing_and_constants_succeed() {
    let o = axiswalk(&["list-targets"], &[]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 15);
    let o = axiswalk(&["constants", "--alpha", "0.5"], &[]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["c1"], 1.0);
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let bad_config = tmp.path().join("bad.json");
    std::fs::write(&bad_config, r#"{"replicaz": 3}"#).unwrap();
    for args in [
        vec!["constants", "--alpha", "9"],
        vec!["frobnicate"],
        vec!["simulate", "--n", "10", "--excursions", "10", "--out", out],
        vec!["simulate", "--n", "10"],
        vec!["simulate", "--replicas", "0", "--out", out],
        vec!["simulate", "--model", "hexagonal", "--out", out],
        vec!["simulate", "--config", bad_config.to_str().unwrap(), "--out", out],
        vec!["verify", "no-such-target"],
        vec!["verify", "arcsine", "--replicas", "5"],
        vec!["dump-trajectory", "--n", "10", "--stride", "0"],
    ] {
        let o = axiswalk(&args, &[]);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn thread_variable_overrides_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let args = ["simulate", "--n", "100", "--replicas", "3", "--threads", "2", "--out", out];
    assert_eq!(code(&axiswalk(&args, &[("AXISWALK_THREADS", "zero")])), 2);
    assert_eq!(code(&axiswalk(&args, &[("AXISWALK_THREADS", "0")])), 2);
    assert_eq!(code(&axiswalk(&args, &[("AXISWALK_THREADS", "1")])), 0);
    // The variable wins even over an invalid flag.
    let bad_flag = ["simulate", "--n", "100", "--replicas", "3", "--threads", "0", "--out", out];
    assert_eq!(code(&axiswalk(&bad_flag, &[])), 2);
    assert_eq!(code(&axiswalk(&bad_flag, &[("AXISWALK_THREADS", "2")])), 0);
}

#[test]
fn simulate_writes_identical_files_for_identical_configs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let run = |dir: &Path, threads: &str| {
        let o = axiswalk(
            &["simulate", "--model", "coupled", "--alpha", "0.3", "--excursions", "200", "--replicas", "70", "--seed", "5", "--out", dir.to_str().unwrap()],
            &[("AXISWALK_THREADS", threads)],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(dir.join("results.csv")).unwrap()
    };
    assert_eq!(run(a.path(), "1"), run(b.path(), "2"));
}

#[test]
fn config_file_is_read_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"n": 50, "replicas": 9, "seed": 1}"#).unwrap();
    let out = tmp.path().join("run");
    let o = axiswalk(
        &["simulate", "--config", cfg.to_str().unwrap(), "--replicas", "2", "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 13);
}

#[test]
fn verdicts_map_to_exit_codes() {
    let pass = axiswalk(&["verify", "ballistic", "--n", "20000", "--replicas", "10", "--json"], &[]);
    assert_eq!(code(&pass), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&pass)).unwrap();
    assert_eq!(v["passed"], true);

    // At α = 0.4 the expansion misses a term of order x^{2α−1}, far above
    // the tolerance at x = 10^6, so this target reports a failure.
    let fail = axiswalk(&["verify", "mean-asymptotic", "--alpha", "0.4"], &[]);
    assert_eq!(code(&fail), 1);
    assert!(stdout(&fail).contains("FAIL"));
}

#[test]
fn trajectory_goes_to_stdout_or_file() {
    let o = axiswalk(&["dump-trajectory", "--n", "10", "--stride", "5", "--seed", "3"], &[]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("t,x,y"));
    assert_eq!(text.lines().count(), 4);

    let tmp = tempfile::tempdir().unwrap();
    let o = axiswalk(&["dump-trajectory", "--n", "7", "--out", tmp.path().to_str().unwrap()], &[]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap().lines().count(), 9);
}

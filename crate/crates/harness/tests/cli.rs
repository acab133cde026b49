use std::path::Path;
use std::process::Command;

fn emql() -> Command {
    Command::new(env!("CARGO_BIN_EXE_emql"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("exp.cfg");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "[agent]\nkind = mbs\n[delay]\nd = 2\n[run]\nepisodes = 20\niterations = 2\nwindow = 5\n",
    );
    let status = emql()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for f in ["episodes.csv", "summary.csv", "reward.svg"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
}

#[test]
fn overrides_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let cfg = write_config(dir.path(), "run.window = 5\n");
    let status = emql()
        .args([
            "compare",
            "--agents",
            "emql,mbs",
            "--delay-geom",
            "0.5",
            "--episodes",
            "15",
        ])
        .args(["--iterations", "2", "--seed", "4", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("emql/episodes.csv").is_file());
    assert!(out.join("mbs/summary.csv").is_file());
    assert!(out.join("comparison.svg").is_file());
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "run.episodes = 10\nrun.window = 50\n");
    let code = emql()
        .args(["run", "--config"])
        .arg(&bad)
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(2));
    let code = emql()
        .args([
            "run",
            "--agent",
            "emdp",
            "--delay-geom",
            "0.5",
            "--episodes",
            "60",
        ])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(2));
    let code = emql()
        .args(["run", "--agent", "sarsa"])
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(2));
}

#[test]
fn verify_subcommand_passes_on_a_sample() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("verify.csv");
    let output = emql()
        .args(["verify", "--scale", "0.02", "--out"])
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("value_bound"));
    let csv = std::fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with("suite,instance,seed,states,actions,delay,lhs,rhs,slack,passed"));
}

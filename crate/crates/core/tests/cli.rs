use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rescue-planner"))
}

#[test]
fn solve_prints_one_tab_separated_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("instance.txt");
    fs::write(
        &file,
        "# supervisor, one robot, control center\n1\n0 0\n1 10\n2 0\n0 1 3\n0 2 4\n1 0 3\n1 2 2\n2 0 4\n2 1 2\n",
    )
    .unwrap();
    let out = bin().arg("solve").arg(&file).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<&str> = text.trim_end().split('\t').collect();
    assert_eq!(fields.len(), 5);
    assert_eq!(fields[0], "0,1,2");
    assert_eq!(fields[1], "5");
    assert!(fields[2].parse::<u64>().unwrap() >= 1);
    fields[3].parse::<u64>().unwrap();
    fields[4].parse::<u128>().unwrap();
}

#[test]
fn solve_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.txt");
    fs::write(&file, "1\n0 0\n").unwrap();
    let out = bin().arg("solve").arg(&file).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn verify_bound_reports_every_instance() {
    let out = bin()
        .args([
            "verify-bound",
            "--instances",
            "4",
            "--n",
            "3",
            "--lambda",
            "0.1",
            "--seed",
            "9",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "instance,gap,bound,holds");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..5].iter().all(|l| l.ends_with(",true")));
    assert_eq!(lines[5], "# 0 violations in 4 instances");
}

#[test]
fn run_writes_results_and_honors_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("grid.toml");
    fs::write(
        &config,
        "trials = 1\npatterns = [2]\nautonomy = [\"high\"]\nfleets = [\"large\"]\n\n[geometry]\nrows = 36\nrow_length = 6\nmargin = 1\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let status = bin()
        .arg("run")
        .arg("--config")
        .arg(&config)
        .args([
            "--policies",
            "ptp,greedy-cr",
            "--seed",
            "3",
            "--jobs",
            "2",
            "--trace",
            "--out",
        ])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let trials = fs::read_to_string(out_dir.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 3);
    assert!(trials.lines().nth(1).unwrap().starts_with("ptp,2,high,large,"));
    assert!(out_dir.join("coverage_ptp.csv").exists());
    assert!(!out_dir.join("coverage_gittins.csv").exists());
    assert_eq!(fs::read_dir(out_dir.join("traces")).unwrap().count(), 2);
}

#[test]
fn run_rejects_unknown_policy() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("grid.toml");
    fs::write(&config, "trials = 1\n").unwrap();
    let out = bin()
        .arg("run")
        .arg("--config")
        .arg(&config)
        .args(["--policies", "greedy-xyz"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

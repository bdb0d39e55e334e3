use std::process::Command;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mac-forest"))
}

#[test]
fn gen_prints_a_path() {
    let out = cli().args(["gen", "--kind", "path", "--n", "5", "--m", "4"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "5 4 0\n1 2\n2 3\n3 4\n4 5\n");
}

#[test]
fn run_then_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let runs = dir.path().join("runs.jsonl");
    let summary = dir.path().join("summary.csv");
    let status = cli()
        .args(["run", "--algo", "rand-simple", "--n", "20", "--m", "40", "--seeds", "0..10"])
        .arg("--out")
        .arg(&runs)
        .arg("--summary")
        .arg(&summary)
        .status()
        .unwrap();
    assert!(status.success());
    let out = cli().arg("report").arg(&runs).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), std::fs::read_to_string(&summary).unwrap());
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    std::fs::write(&graph, "4 3 1\n1 2 1\n2 3 1/2\n1 3 3\n").unwrap();
    let config = dir.path().join("exp.toml");
    let summary = dir.path().join("s.csv");
    std::fs::write(
        &config,
        format!(
            "algorithm = \"rand-weighted\"\nseeds = \"0..4\"\nsummary = {:?}\ninstances = [{{ file = {:?} }}]\n",
            summary.display().to_string(),
            graph.display().to_string()
        ),
    )
    .unwrap();
    let out = cli().args(["run", "--format", "csv", "--config"]).arg(&config).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().skip(1).all(|l| l.contains(",3/2,true,")));
}

#[test]
fn failing_checks_give_a_nonzero_exit() {
    let out = cli().args(["run", "--algo", "rand-weighted", "--kind", "path", "--n", "5", "--m", "4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = cli().args(["run", "--algo", "det-simple", "--n", "5", "--m", "4", "--cap", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = cli().args(["run", "--algo", "no-such-thing", "--n", "5", "--m", "4"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn lowerbound_verbs() {
    for args in [
        vec!["lowerbound", "--adversary", "five-phase", "--n", "16", "--m", "32", "--seeds", "0..3"],
        vec!["lowerbound", "--adversary", "weight", "--m", "16", "--algo", "rand-weighted"],
        vec!["lowerbound", "--adversary", "activation", "--m", "64", "--kind", "star", "--format", "csv"],
    ] {
        let out = cli().args(&args).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

use std::path::Path;
use std::process::{Command, Output};

fn ssbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssbm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("{key} missing in\n{report}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_fixture_file_with_fixed_xi() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fixture.txt", "0 1 1\n2 3 1\n0 2 -1\n0 3 -1\n1 2 -1\n1 3 -1\n");
    let o = ssbm(&["solve", &f, "--xi", "1", "--labels"]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout(&o);
    assert_eq!(value(&r, "objective"), "12");
    assert_eq!(value(&r, "community_plus"), "2");
    assert_eq!(value(&r, "converged"), "true");
    let labels: Vec<&str> = r.lines().rev().take(4).collect();
    let l = |i: usize| labels[3 - i].split(' ').nth(1).unwrap();
    assert_eq!(l(0), l(1));
    assert_eq!(l(2), l(3));
    assert_ne!(l(0), l(2));
}

#[test]
fn one_based_input_matches_zero_based() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "z.txt", "0 1 1\n2 3 1\n0 2 -1\n0 3 -1\n1 2 -1\n1 3 -1\n");
    let one = write(dir.path(), "o.txt", "1 2 1\n3 4 1\n1 3 -1\n1 4 -1\n2 3 -1\n2 4 -1\n");
    let a = ssbm(&["solve", &zero, "--xi", "1"]);
    let b = ssbm(&["solve", &one, "--xi", "1", "--one-based"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn generate_then_estimate_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.txt");
    let e = edges.to_str().unwrap();
    let o = ssbm(&["generate", "--n", "300", "--seed", "7", "--out", e]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let truth = std::fs::read_to_string(format!("{e}.truth")).unwrap();
    let labels: Vec<i32> = truth
        .lines()
        .map(|l| l.split(' ').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(labels.len(), 300);
    assert_eq!(labels.iter().sum::<i32>(), 0);

    let again = dir.path().join("g2.txt");
    ssbm(&["generate", "--n", "300", "--seed", "7", "--out", again.to_str().unwrap()]);
    assert_eq!(std::fs::read(&edges).unwrap(), std::fs::read(&again).unwrap());

    let est = stdout(&ssbm(&["estimate", e]));
    assert_eq!(value(&est, "nodes"), "300");
    let xi: f64 = value(&est, "xi").parse().unwrap();
    assert!(xi.is_finite());
    let csv = stdout(&ssbm(&["estimate", e, "--csv"]));
    assert!(csv.starts_with("n,alpha_plus,beta_plus,alpha_minus,beta_minus,xi,plausible\n300,"));

    let solved = stdout(&ssbm(&["solve", e]));
    assert_eq!(value(&solved, "xi"), value(&est, "xi"));
    assert_eq!(value(&solved, "community_plus"), "150");
}

#[test]
fn sweep_without_timing_is_reproducible() {
    let args = [
        "sweep", "--n", "100", "--trials", "2", "--x-start", "1", "--x-stop", "2",
        "--y-start", "9", "--y-stop", "9", "--no-timing",
    ];
    let a = ssbm(&args);
    let b = ssbm(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha_plus,beta_plus,alpha_minus,beta_minus,n,trials,recovery_ratio,mean_error_rate,mean_pi_iters,mean_gpi_iters,it_gap,status"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn bench_writes_one_row_per_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let o = ssbm(&[
        "bench", "--n-list", "100,200", "--trials", "1", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("100,1,"));
    assert!(rows[2].starts_with("200,1,"));
}

#[test]
fn exit_codes() {
    assert_eq!(ssbm(&["--help"]).status.code(), Some(0));
    assert_eq!(ssbm(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ssbm(&["solve"]).status.code(), Some(1));
    assert_eq!(ssbm(&["solve", "x.txt", "--xi", "banana"]).status.code(), Some(1));
    assert_eq!(ssbm(&["sweep", "--trials", "0"]).status.code(), Some(1));
    assert_eq!(ssbm(&["bench", "--alpha-plus", "-1"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.txt");
    assert_eq!(ssbm(&["solve", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.txt", "0 1 1\n0 1 -1\n");
    let o = ssbm(&["estimate", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let garbage = write(dir.path(), "garbage.txt", "0 one 1\n");
    assert_eq!(ssbm(&["solve", &garbage]).status.code(), Some(2));
}

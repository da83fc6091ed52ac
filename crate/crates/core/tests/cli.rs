use std::fs;
use std::process::{Command, Output};

use dtba::io::{load_csv, load_solution};

fn dtba(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtba"))
        .args(args)
        .env_remove("DTBA_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const SMALL: [&str; 8] = ["--sigma-min", "-12", "--sigma-max", "8", "--points", "257", "--tol", "1e-9"];

#[test]
fn oracle_prints_multipliers_at_the_symmetric_point() {
    let o = dtba(&["oracle"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    for l in &lines[..5] {
        let (re, im) = l.split_once(',').unwrap();
        assert!(re.parse::<f64>().unwrap().abs() < 1e-8);
        assert!((im.parse::<f64>().unwrap() + phi).abs() < 1e-8);
    }
    assert!(lines[5].starts_with("residual,"));
}

#[test]
fn usage_and_input_errors_exit_with_one() {
    assert_eq!(code(&dtba(&["oracle", "--radius", "1"])), 1);
    assert_eq!(code(&dtba(&["solve", "--points", "0"])), 1);
    assert_eq!(code(&dtba(&["solve", "--bogus"])), 1);
    let o = Command::new(env!("CARGO_BIN_EXE_dtba"))
        .args(["oracle"])
        .env("DTBA_THREADS", "x")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn solve_writes_identical_files_twice() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let mut args = vec!["solve", "--a-re", "0.2"];
        args.extend(SMALL);
        args.extend(["--format", "both", "--out", out.to_str().unwrap()]);
        let o = dtba(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.contains("iterations") && text.contains("residual"));
        out
    };
    let (p, q) = (run("one.json"), run("two.json"));
    let (pj, qj) = (fs::read(p.with_extension("json")).unwrap(), fs::read(q.with_extension("json")).unwrap());
    assert_eq!(pj, qj);
    assert_eq!(fs::read(p.with_extension("csv")).unwrap(), fs::read(q.with_extension("csv")).unwrap());
    let sol = load_solution(&p.with_extension("json")).unwrap();
    assert_eq!(sol.grid.n, 257);
    assert_eq!(load_csv(&p.with_extension("csv")).unwrap().sigma.len(), 257);
}

#[test]
fn assumption_violation_and_non_convergence_have_their_own_codes() {
    let mut args = vec!["solve", "--a-im", "6", "--guard", "0.5"];
    args.extend(SMALL);
    assert_eq!(code(&dtba(&args)), 2);
    let mut args = vec!["solve", "--a-re", "0.3", "--max-iter", "3"];
    args.extend(SMALL);
    assert_eq!(code(&dtba(&args)), 3);
}

#[test]
fn compare_reports_and_enforces_the_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp.json");
    let mut args = vec!["compare", "--samples", "5", "--out", out.to_str().unwrap()];
    args.extend(SMALL);
    assert_eq!(code(&dtba(&args)), 0);
    assert!(fs::read_to_string(&out).unwrap().contains("\"max_rel_error\""));
    let mut args = vec!["compare", "--samples", "5", "--accept", "1e-15"];
    args.extend(SMALL);
    assert_eq!(code(&dtba(&args)), 4);
}

#[test]
fn eigen_finds_real_roots_or_reports_none() {
    let o = dtba(&["eigen", "--a", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(!text.is_empty() && !text.contains("no roots"));
    for l in text.lines() {
        let mut f = l.split(',');
        assert!(f.next().unwrap().parse::<f64>().unwrap() < 0.0);
        assert!(f.next().unwrap().parse::<f64>().unwrap().abs() < 1e-6);
    }
    let o = dtba(&["eigen", "--b-min", "-0.4", "--b-max", "-0.3", "--steps", "4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "no roots");
}

#[test]
fn suite_is_reproducible_for_a_seed() {
    let run = || dtba(&["--threads", "2", "suite", "--seed", "7", "--trials", "3"]);
    let (a, b) = (run(), run());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8(a.stdout).unwrap().contains("\"categories\""));
}

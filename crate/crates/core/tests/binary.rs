use std::path::PathBuf;
use std::process::{Command, Output};

fn maxmul(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxmul")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("maxmul-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn range_table_from_config_file() {
    let cfg = scratch("range.cfg");
    std::fs::write(&cfg, "scenario = range-table\ndim = 2\nalpha = 0.75\nbeta = 1.5\nexponent = const:2\n").unwrap();
    let out = maxmul(&["range-table", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("thm22,admissible,1.5,3,")), "{text}");
}

#[test]
fn out_flag_and_overrides() {
    let csv = scratch("norm.csv");
    let out = maxmul(&["norm", "--out", csv.to_str().unwrap(), "--set", "tol=1e-13"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let norm: f64 = row[row.len() - 2].parse().unwrap();
    assert!((norm - 1.4915578673).abs() < 1e-9);
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(maxmul(&["norm", "--set", "colour=blue"]).status.code(), Some(2));
    assert_eq!(maxmul(&["norm", "--set", "samples=100"]).status.code(), Some(2));
    assert_eq!(maxmul(&["spiral"]).status.code(), Some(2));
    assert_eq!(maxmul(&["norm", "--config", "/nonexistent/maxmul.cfg"]).status.code(), Some(2));
    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "dim = 1\nthis line has no separator\n").unwrap();
    let out = maxmul(&["norm", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn verify_passes_and_is_repeatable() {
    let a = maxmul(&["verify"]);
    let b = maxmul(&["verify", "--set", "threads=1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8(a.stdout).unwrap().contains(",fail,"));
}

#[test]
fn decay_fit_shows_square_function_gain() {
    let out = maxmul(&["decay-fit", "--set", "measure=cantor-radial:m=4", "--set", "xi_max=1024"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let alpha = |kind: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(&format!("{kind},"))).unwrap();
        line.split(',').nth(2).unwrap().parse().unwrap()
    };
    let sq = alpha("square");
    assert!((0.65..=0.85).contains(&sq), "{sq}");
    assert!(sq - alpha("pointwise") > 0.15);
}

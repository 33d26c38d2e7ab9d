use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const N01: &str = "algebra N01 dim 4\ne1*e1 = e2\n";

fn bicomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bicomm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bicomm-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn check_reports_both_identities() {
    let d = scratch("check");
    let f = write(&d, "n01.alg", N01);
    let o = bicomm(&["--porcelain", "check", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "right=holds\nleft=holds\n");
}

#[test]
fn check_fails_on_a_non_bicommutative_table() {
    let d = scratch("nonbicom");
    let f = write(&d, "x.alg", "algebra X dim 4\ne1*e2 = e3\ne3*e1 = e4\n");
    let o = bicomm(&["--porcelain", "check", &f, "--identity", "both"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn h2_dimensions() {
    let d = scratch("h2");
    let f = write(&d, "n01.alg", N01);
    let out = stdout(&bicomm(&["--porcelain", "h2", &f]));
    assert!(out.contains("dim_h2=10\n"), "{out}");
    assert!(out.contains("dim_h2_com=6\n"), "{out}");
    assert!(out.contains("dim_b2=1\n"), "{out}");
}

#[test]
fn extend_writes_a_parseable_algebra() {
    let d = scratch("extend");
    let f = write(&d, "n01.alg", N01);
    let out = d.join("ext.alg");
    let o = bicomm(&["--porcelain", "extend", &f, "--cocycle", "D(1,2)", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bicommutative=true"));
    let fp = stdout(&bicomm(&["--porcelain", "fingerprint", out.to_str().unwrap()]));
    assert!(fp.starts_with("fingerprint=(5,2,1,0,4,"), "{fp}");
}

#[test]
fn distinguish_and_isosearch_agree_on_equal_inputs() {
    let d = scratch("iso");
    let a = write(&d, "a.alg", N01);
    let b = write(&d, "b.alg", "algebra M dim 4\ne2*e2 = -e4\n");
    let o = stdout(&bicomm(&["--porcelain", "distinguish", &a, &b]));
    assert!(o.contains("distinct=false"), "{o}");
    let o = bicomm(&["--porcelain", "isosearch", &a, &b, "--prime", "3", "--prime", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("F3=found"), "{}", stdout(&o));
}

#[test]
fn aut_count_over_f2() {
    let d = scratch("aut");
    let f = write(&d, "n01.alg", N01);
    let o = stdout(&bicomm(&["--porcelain", "aut-count", &f, "--prime", "2"]));
    assert!(o.contains("aut=192"), "{o}");
}

#[test]
fn configuration_errors_exit_with_two() {
    let d = scratch("bad");
    let f = write(&d, "bad.alg", "not an algebra\n");
    assert_eq!(bicomm(&["check", &f]).status.code(), Some(2));
    assert_eq!(bicomm(&["check", "/nonexistent/file.alg"]).status.code(), Some(2));
    assert_eq!(bicomm(&["verify", "tables", "--catalog", "/nonexistent/catalog"]).status.code(), Some(2));
    let g = write(&d, "n01.alg", N01);
    assert_eq!(bicomm(&["extend", &g, "--cocycle", "Q(1,2)"]).status.code(), Some(2));
}

#[test]
fn verify_tables_porcelain() {
    let o = bicomm(&["--porcelain", "verify", "tables"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("tables.N01.status=pass\n"), "{out}");
    assert!(out.contains("tables.fail=0\n"), "{out}");
    assert!(out.lines().all(|l| l.contains('=')), "porcelain output is key=value only");
}

#[test]
fn verify_actions_reports_failures_with_exit_one() {
    let o = bicomm(&["--porcelain", "verify", "actions"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("actions.N01/phi.status=pass"), "{}", stdout(&o));
}

#[test]
fn rep_builds_a_catalog_representative() {
    let o = bicomm(&["--porcelain", "rep", "B01"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("source=N01"));
    assert_eq!(bicomm(&["rep", "B9999"]).status.code(), Some(2));
}

//! Drives the binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn randgeo(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randgeo"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("RANDGEO_SEED")
        .output()
        .unwrap()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn mst_verifies_against_kruskal() {
    let dir = tempfile::tempdir().unwrap();
    let o = randgeo(dir.path(), &["mst", "--n", "2000", "--d", "2", "--seed", "7", "--algo", "dc", "--verify"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["verified"], true);
    let csv = std::fs::read_to_string(dir.path().join("mst.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("i,j,weight"));
    assert_eq!(csv.lines().count(), 2000);
    for f in ["manifest.json", "timing.json", "stats.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn distsel_large_radius_counts_every_pair() {
    let dir = tempfile::tempdir().unwrap();
    let o = randgeo(dir.path(), &["distsel", "--n", "100", "--r", "2.0"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["count"], 4950);
    assert!(v["elapsed_ms"].is_number());
    let file = std::fs::read_to_string(dir.path().join("distsel.csv")).unwrap();
    assert!(!file.contains("elapsed"));
}

#[test]
fn manifest_records_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = randgeo(dir.path(), &["--threads", "2", "concentrate", "--n", "300", "--r", "0.1", "--trials", "4", "--seed", "9"]);
    assert!(o.status.success());
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["subcommand"], "concentrate");
    assert_eq!(m["config"]["seed"], 9);
    assert_eq!(m["config"]["trials"], 4);
    assert_eq!(m["config"]["c_d"], 10.0);
    let t: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("timing.json")).unwrap()).unwrap();
    assert_eq!(t["threads"], 2);
    let trials = std::fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 5);
    assert!(trials.lines().nth(1).unwrap().starts_with("9,"));
}

#[test]
fn seed_comes_from_environment() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    randgeo(a.path(), &["sample", "--n", "50", "--seed", "5"]);
    let o = Command::new(env!("CARGO_BIN_EXE_randgeo"))
        .arg("--out")
        .arg(b.path())
        .args(["sample", "--n", "50"])
        .env("RANDGEO_SEED", "5")
        .output()
        .unwrap();
    assert!(o.status.success());
    let read = |d: &Path| std::fs::read(d.join("points.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let o = randgeo(dir.path(), &["distsel", "--n", "100", "--d", "3", "--r", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d=2"));
    let o = randgeo(dir.path(), &["mst", "--algo", "kruskal", "--n", "9000"]);
    assert_eq!(o.status.code(), Some(1));
    let o = randgeo(dir.path(), &["hull", "--n", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = randgeo(dir.path(), &["frobnicate"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn verify_flags_pass_on_every_builder() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["hull", "--n", "3000", "--d", "3", "--verify"][..],
        &["delaunay", "--n", "800", "--d", "3", "--verify"],
        &["mst", "--n", "6000", "--d", "2", "--algo", "nlogn", "--verify"],
        &["distsel", "--n", "2000", "--r", "0.2", "--grid", "60", "--verify"],
    ] {
        let o = randgeo(dir.path(), args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout_json(&o)["verified"], true, "{args:?}");
    }
}

#[test]
fn bench_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = randgeo(dir.path(), &["bench", "--algo", "hull", "--n-min", "500", "--n-max", "2000", "--reps", "5"]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,algorithm,median_ms,p10_ms,p90_ms");
    let ns: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["500", "1000", "2000"]);
}

//! End-to-end runs of the `voterlab` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use voter_core::graph::load_graph;

fn voterlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voterlab")).args(args).output().expect("binary runs")
}

fn prefix(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn gen_graph_writes_a_loadable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let p = prefix(dir.path(), "g");
    let out = voterlab(&["gen-graph", "--n", "100", "--d", "4", "--seed", "3", "--out", &p]);
    assert!(out.status.success());
    let g = load_graph(fs::read(format!("{p}.graph")).unwrap().as_slice()).unwrap();
    assert_eq!((g.n(), g.d(), g.m()), (100, 4, 200));
    assert!(String::from_utf8_lossy(&out.stdout).contains("m=200"));
}

#[test]
fn fd_curve_to_stdout() {
    let out = voterlab(&["fd-curve", "--d", "3", "--grid", "lin:0:4:5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,survival,meeting_cdf,expected_discordance");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("0,1,0,"));
}

#[test]
fn simulate_reads_a_saved_graph() {
    let dir = tempfile::tempdir().unwrap();
    let p = prefix(dir.path(), "g");
    assert!(voterlab(&["gen-graph", "--n", "50", "--d", "3", "--out", &p]).status.success());
    let graph = format!("{p}.graph");
    let out = voterlab(&["simulate", "--graph", &graph, "--grid", "lin:0:10:11", "--t-cap", "1e5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(String::from_utf8_lossy(&out.stderr).contains("consensus at"));
}

#[test]
fn dual_samples_csv() {
    let out = voterlab(&["dual", "--n", "100", "--replicas", "20", "--mode", "coalesce"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("replica,outcome,time"));
    assert_eq!(text.lines().filter(|l| l.contains(",coalesced,")).count(), 20);
}

#[test]
fn experiment_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = prefix(dir.path(), "a");
    let b = prefix(dir.path(), "b");
    let common = ["experiment", "plateau", "--n", "1000", "--replicas", "40", "--seed", "5"];
    let run_a = voterlab(&[&common[..], &["--workers", "1", "--out", &a]].concat());
    let run_b = voterlab(&[&common[..], &["--workers", "3", "--out", &b]].concat());
    assert_eq!(run_a.status.code(), Some(0), "{}", String::from_utf8_lossy(&run_a.stdout));
    assert_eq!(run_b.status.code(), Some(0));
    assert_eq!(fs::read(format!("{a}.data.csv")).unwrap(), fs::read(format!("{b}.data.csv")).unwrap());
    let ja: serde_json::Value = serde_json::from_slice(&fs::read(format!("{a}.summary.json")).unwrap()).unwrap();
    let jb: serde_json::Value = serde_json::from_slice(&fs::read(format!("{b}.summary.json")).unwrap()).unwrap();
    // Only the worker echo differs.
    let strip = |v: &serde_json::Value| {
        let mut m = v.as_object().unwrap().clone();
        m.remove("spec.workers");
        m
    };
    assert_eq!(strip(&ja), strip(&jb));
    assert_eq!(ja["spec.seed"], "5");
    assert!(ja["version"].is_string());

    let again = prefix(dir.path(), "again");
    voterlab(&[&common[..], &["--workers", "1", "--out", &again]].concat());
    assert_eq!(fs::read(format!("{a}.summary.json")).unwrap(), fs::read(format!("{again}.summary.json")).unwrap());
}

#[test]
fn tolerance_failure_exits_with_two() {
    // At n = 200 the sup-deviation over t <= n^0.8 is far above 0.05.
    let out = voterlab(&["experiment", "concentration-sweep", "--n", "200", "--replicas", "20"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL] exceedance"));
}

#[test]
fn invalid_input_exits_with_one() {
    for args in [
        &["experiment", "plateau", "--d", "2"][..],
        &["experiment", "plateau", "--n", "999"],
        &["simulate", "--grid", "lin:5:1:3"],
        &["simulate", "--graph", "/nonexistent/graph"],
    ] {
        let out = voterlab(args);
        assert_ne!(out.status.code(), Some(0), "{args:?}");
        assert!(matches!(out.status.code(), Some(1) | Some(2)), "{args:?}");
    }
    let out = voterlab(&["experiment", "plateau", "--u", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("initial density"));
}

#[test]
fn workers_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_voterlab"))
        .args(["experiment", "fvtl-returns", "--n", "100", "--replicas", "100"])
        .env("VOTERLAB_WORKERS", "2")
        .output()
        .unwrap();
    assert!(out.status.code().is_some_and(|c| c == 0 || c == 2));
}

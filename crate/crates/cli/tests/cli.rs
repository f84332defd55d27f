use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ssa(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssa"))
        .current_dir(dir)
        .arg("--quiet")
        .args(args)
        .output()
        .expect("spawn ssa")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn check_reports_gaps_and_exits_zero_either_way() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&ssa(d.path(), &["gen", "ghz", "--out", "g.json"])), 0);
    assert_eq!(code(&ssa(d.path(), &["check", "g.json", "--which", "ssa2", "--out", "r2.json"])), 0);
    let r = report(d.path().join("r2.json"));
    assert_eq!(r["kind"], "gap");
    assert!(r["payload"]["gaps"][0]["gap_bits"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(r["payload"]["gaps"][0]["saturated"], true);

    assert_eq!(code(&ssa(d.path(), &["check", "g.json", "--which", "ssa1", "--out", "r1.json"])), 0);
    let r = report(d.path().join("r1.json"));
    assert!((r["payload"]["gaps"][0]["gap_bits"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(r["payload"]["gaps"][0]["saturated"], false);
}

#[test]
fn arity_mismatch_is_an_input_error() {
    let d = TempDir::new().unwrap();
    ssa(d.path(), &["gen", "state", "--dims", "2,2", "--out", "ab.json"]);
    let o = ssa(d.path(), &["check", "ab.json", "--which", "ssa1"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("subsystems"));
}

#[test]
fn corrupted_and_missing_files_exit_one() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("bad.json"), "{\"format_version\": \"1\", \"labels\": [").unwrap();
    assert_eq!(code(&ssa(d.path(), &["decompose", "bad.json", "--mode", "markov"])), 1);
    assert_eq!(code(&ssa(d.path(), &["decompose", "nope.json", "--mode", "markov"])), 1);
    assert_eq!(code(&ssa(d.path(), &["no-such-command"])), 1);
}

#[test]
fn trace_violation_names_the_field() {
    let d = TempDir::new().unwrap();
    fs::write(
        d.path().join("t.json"),
        "{\"format_version\":\"1\",\"labels\":[\"A\"],\"dims\":[2],\"matrix\":[[[0.5,0.0],[0.0,0.0]],[[0.0,0.0],[0.4,0.0]]]}",
    )
    .unwrap();
    let o = ssa(d.path(), &["check", "t.json"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("trace") && err.contains("matrix"), "{err}");
}

#[test]
fn ghz_markov_is_not_saturated() {
    let d = TempDir::new().unwrap();
    ssa(d.path(), &["gen", "ghz", "--out", "g.json"]);
    assert_eq!(code(&ssa(d.path(), &["decompose", "g.json", "--mode", "markov", "--out", "r.json"])), 2);
    let r = report(d.path().join("r.json"));
    assert_eq!(r["payload"]["status"], "not_saturated");
    assert_eq!(code(&ssa(d.path(), &["decompose", "g.json", "--mode", "bi-ssa"])), 2);
}

#[test]
fn channel_analyses() {
    let d = TempDir::new().unwrap();
    let p = d.path();
    ssa(p, &["gen", "dephasing", "--out", "deph.json"]);
    fs::write(
        p.join("diag.json"),
        "{\"format_version\":\"1\",\"labels\":[\"A\"],\"dims\":[2],\"matrix\":[[[0.3,0.0],[0.0,0.0]],[[0.0,0.0],[0.7,0.0]]]}",
    )
    .unwrap();
    fs::write(
        p.join("plus.json"),
        "{\"format_version\":\"1\",\"labels\":[\"A\"],\"dims\":[2],\"matrix\":[[[0.5,0.0],[0.5,0.0]],[[0.5,0.0],[0.5,0.0]]]}",
    )
    .unwrap();

    assert_eq!(code(&ssa(p, &["channel", "deph.json", "diag.json", "--analyze", "holevo", "--out", "h.json"])), 0);
    let r = report(p.join("h.json"));
    assert_eq!(r["kind"], "holevo_saturation");
    assert!(r["payload"]["exchange"]["gap_bits"].as_f64().unwrap().abs() < 1e-9);
    assert!(r["payload"]["output_reassembly_error"].as_f64().unwrap() <= 1e-7);

    assert_eq!(
        code(&ssa(p, &["channel", "deph.json", "plus.json", "--analyze", "average-entropy", "--out", "a.json"])),
        0
    );
    let r = report(p.join("a.json"));
    assert!(r["payload"]["report"]["gap"]["gap_bits"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(r["payload"]["saturation"]["rank_one"], false);

    ssa(p, &["--seed", "5", "gen", "channel", "--d-in", "3", "--d-out", "3", "--n-kraus", "1", "--out", "u.json"]);
    ssa(p, &["gen", "state", "--dims", "3", "--out", "r3.json"]);
    assert_eq!(code(&ssa(p, &["channel", "u.json", "r3.json", "--analyze", "saturation", "--out", "s.json"])), 0);
    let r = report(p.join("s.json"));
    assert_eq!(r["payload"]["report"]["rank_one"], true);
    assert!(r["payload"]["report"]["reconstruction_error"].as_f64().unwrap() <= 1e-9);

    assert_eq!(code(&ssa(p, &["channel", "deph.json", "plus.json", "--analyze", "coherent"])), 0);
    // dimension mismatch
    assert_eq!(code(&ssa(p, &["channel", "u.json", "plus.json", "--analyze", "holevo"])), 1);
}

#[test]
fn unknown_scramble_label_is_rejected() {
    let d = TempDir::new().unwrap();
    ssa(d.path(), &["gen", "ghz", "--out", "g.json"]);
    assert_eq!(code(&ssa(d.path(), &["gen", "scramble", "g.json", "--labels", "Q"])), 1);
}

#[test]
fn gen_is_deterministic() {
    let d = TempDir::new().unwrap();
    for name in ["a.json", "b.json"] {
        ssa(d.path(), &["--seed", "17", "gen", "state", "--dims", "2,3", "--out", name]);
    }
    let a = fs::read(d.path().join("a.json")).unwrap();
    assert_eq!(a, fs::read(d.path().join("b.json")).unwrap());
    ssa(d.path(), &["--seed", "18", "gen", "state", "--dims", "2,3", "--out", "c.json"]);
    assert_ne!(a, fs::read(d.path().join("c.json")).unwrap());
}

#[test]
fn selftest_passes() {
    let d = TempDir::new().unwrap();
    let o = ssa(d.path(), &["selftest"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.lines().all(|l| l.starts_with("PASS")));
}

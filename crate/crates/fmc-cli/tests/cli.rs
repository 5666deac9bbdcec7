//! The `fmc` binary on the bundled examples.

use std::path::PathBuf;
use std::process::{Command, Output};

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../examples")
}

fn fmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmc"))
        .args(args)
        .current_dir(examples())
        .env_remove("FMC_CONFIG")
        .output()
        .expect("the binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fmc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn run_state_example() {
    let o = fmc(&["run", "state.fmc", "--cell", "c=0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "c=[5]");
}

#[test]
fn check_swap_example() {
    let o = fmc(&["check", "swap.fmc"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "s t > t s");
}

#[test]
fn weak_measure_matches_step_count() {
    let m = fmc(&["measure", "redex.fmc", "--kind", "weak"]);
    let r = fmc(&["run", "redex.fmc", "--count-steps"]);
    assert_eq!(m.status.code(), Some(0));
    let steps = stdout(&r)
        .lines()
        .last()
        .unwrap()
        .trim_start_matches("steps: ")
        .to_string();
    assert_eq!(stdout(&m), steps);
}

#[test]
fn strong_measure_is_enough_fuel() {
    let o = fmc(&["measure", "redex.fmc", "--kind", "strong", "--fuel-check"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("machine steps"));
}

#[test]
fn normalize_shows_steps() {
    let o = fmc(&["normalize", "state.fmc", "--strategy", "lo", "--show-steps"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("beta"));
    assert!(out.lines().any(|l| l.trim() == "c<_>.[5]c"), "{out}");
}

#[test]
fn translate_lambda_to_fmc() {
    for s in ["cbv", "cbn"] {
        let o = fmc(&[
            "translate",
            "--from",
            "lambda",
            "--to",
            "fmc",
            "--strategy",
            s,
            "twice.lam",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(!stdout(&o).is_empty());
    }
}

#[test]
fn collapse_with_explicit_order() {
    let p = tmp("two.fmc", "[#u]a.[#v]b\n");
    let sig = tmp("two.sig.fmc", ".sig\nbase o\nval u v : o\n.end\n*\n");
    let o = fmc(&[
        "--signature",
        sig.to_str().unwrap(),
        "collapse",
        p.to_str().unwrap(),
        "--order",
        "lam,a,b",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn equiv_reports_json_and_exit_codes() {
    let head = ".sig\nbase s t\nval a c : s\nval b : t\n.end\n";
    let m = tmp("m.fmc", &format!("{head}<x:s>.<y:t>.[y].[x]\n"));
    let n = tmp("n.fmc", &format!("{head}<x:s>.<y:t>.[y].[#a]\n"));
    let (m, n) = (m.to_str().unwrap(), n.to_str().unwrap());
    let same = fmc(&["equiv", m, m, "--type", "s t > t s", "--depth", "2"]);
    assert_eq!(same.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&same)).unwrap();
    assert_eq!(v["verdict"], "equivalent");
    assert!(v["inputs-tested"].as_u64().unwrap() > 0);
    let diff = fmc(&["equiv", m, n, "--depth", "2"]);
    assert_eq!(diff.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&diff)).unwrap();
    assert_eq!(v["verdict"], "distinguished");
    assert!(v.get("witness").is_some());
}

#[test]
fn exit_codes() {
    assert_eq!(fmc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fmc(&["run", "missing.fmc"]).status.code(), Some(2));
    assert_eq!(
        fmc(&["run", "state.fmc", "--fuel", "2", "--cell", "c=0"]).status.code(),
        Some(1)
    );
    let bad = tmp("bad.fmc", "<x:s>.[x].[x].<y:s>.<z:t>.*\n");
    assert_eq!(fmc(&["check", bad.to_str().unwrap()]).status.code(), Some(1));
    let stuck = tmp("stuck.fmc", "<x>.*\n");
    assert_eq!(fmc(&["run", stuck.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn config_file_then_flags() {
    let cfg = tmp("fmc.toml", "fuel = 2\n[cells]\nc = \"0\"\n");
    let o = Command::new(env!("CARGO_BIN_EXE_fmc"))
        .args(["run", "state.fmc"])
        .current_dir(examples())
        .env("FMC_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1), "fuel 2 from the file is too little");
    let o = Command::new(env!("CARGO_BIN_EXE_fmc"))
        .args(["run", "state.fmc", "--fuel", "100"])
        .current_dir(examples())
        .env("FMC_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "c=[5]");
}

#[test]
fn scripted_stream_and_trace() {
    let input = tmp("in.txt", "7 8\n");
    let prog = tmp("echo.fmc", "in<x>.in<y>.[y].[x]out.[x]\n");
    let trace = std::env::temp_dir().join(format!("fmc-trace-{}.jsonl", std::process::id()));
    let stream = format!("in={}", input.display());
    let o = fmc(&[
        "run",
        prog.to_str().unwrap(),
        "--stream",
        &stream,
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("out=[7]"), "{out}");
    assert!(out.contains("lam=[8, 7]"), "{out}");
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert!(lines.lines().count() >= 5);
    for l in lines.lines() {
        serde_json::from_str::<serde_json::Value>(l).unwrap();
    }
}

#[test]
fn selftest_passes() {
    let o = fmc(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 9);
}

#[test]
fn lambda_to_slc_and_back() {
    let slc = fmc(&["translate", "--from", "lambda", "--to", "slc", "twice.lam"]);
    assert_eq!(slc.status.code(), Some(0));
    let out = stdout(&slc);
    assert!(out.starts_with("main : > o = "), "{out}");
    let prog = tmp("twice.slc.fmc", &out);
    let sig = tmp("twice.sig.fmc", ".sig\nbase o\nval a : o\ncomp k : o > o\n.end\n*\n");
    let back = fmc(&[
        "--signature",
        sig.to_str().unwrap(),
        "translate",
        "--from",
        "slc",
        "--to",
        "lambda",
        prog.to_str().unwrap(),
    ]);
    assert_eq!(back.status.code(), Some(0), "{}", String::from_utf8_lossy(&back.stderr));
    assert!(stdout(&back).ends_with("(\\s'1:o. k@s'1) #a"), "{}", stdout(&back));
}

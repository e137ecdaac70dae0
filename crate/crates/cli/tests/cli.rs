use std::path::PathBuf;
use std::process::{Command, Output};

use lyapsyn::{exit, Report};

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name).display().to_string()
}

fn lyapsyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lyapsyn")).args(args).output().unwrap()
}

fn report(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn synth_proved_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = lyapsyn(&["synth", &example("va.json"), "--out", dir.path().to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(exit::SUCCESS));
    let r = report(&out);
    assert_eq!(r.outcome, "proved");
    assert_eq!(r.command, "synth");
    assert!(r.v.is_some() && r.params.is_some());
    for f in ["trace.json", "certificate.json", "verify_000_r0.smt2", "learn_000.smt2", "recheck_r0.smt2"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let cert: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["regions"][0]["verdict"], "unsat");
}

#[test]
fn synth_infeasible_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = lyapsyn(&["synth", &example("vb_n2.json"), "--out", dir.path().to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(exit::REFUTED));
    let r = report(&out);
    assert_eq!(r.outcome, "template_infeasible");
    assert!(r.counterexample.is_some());
    assert!(!dir.path().join("certificate.json").exists());
}

#[test]
fn synth_exhausted_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = lyapsyn(&[
        "synth",
        &example("va.json"),
        "--initial-params",
        "-1,1",
        "--max-iter",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(exit::EXHAUSTED));
    assert!(stdout(&out).starts_with("synth: exhausted"));
}

#[test]
fn check_verdicts() {
    let valid = lyapsyn(&["check", &example("vd.json"), "--candidate", "p1=1/2,p2=1/4", "--json"]);
    assert_eq!(valid.status.code(), Some(exit::SUCCESS));
    assert_eq!(report(&valid).regions.len(), 2);

    let invalid = lyapsyn(&["check", &example("vd_reversed.json"), "--candidate", "p1=1/2,p2=1/4", "--json"]);
    assert_eq!(invalid.status.code(), Some(exit::REFUTED));
    let r = report(&invalid);
    assert_eq!(r.outcome, "invalid");
    assert_eq!(r.counterexample.unwrap().region, 1);
}

#[test]
fn check_writes_scripts_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let out = lyapsyn(&["check", &example("ve.json"), "--candidate", "p1=1/2,p2=1/2", "--out", dir.path().to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(exit::SUCCESS));
    let r = report(&out);
    assert!(!r.artifacts.is_empty());
    assert!(r.artifacts.iter().all(|a| std::path::Path::new(a).is_file()));
}

#[test]
fn usage_errors_exit_four() {
    let cases: Vec<Vec<String>> = vec![
        vec!["check".into(), example("va.json"), "--candidate".into(), "p1=1".into()],
        vec!["check".into(), example("va.json"), "--candidate".into(), "p1=1,p3=2".into()],
        vec!["synth".into(), example("va.json"), "--max-iter".into(), "0".into()],
        vec!["synth".into(), example("va.json"), "--initial-params".into(), "1".into()],
        vec!["synth".into(), "no-such-file.json".into()],
        vec!["check".into(), example("va.json"), "--candidate".into(), "p1=1,p2=1".into(), "--solver-cmd".into(), "no-such-solver-binary".into()],
        vec!["frobnicate".into()],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = lyapsyn(&args);
        assert_eq!(out.status.code(), Some(exit::USAGE), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn solver_that_never_answers_exits_three() {
    let out = lyapsyn(&[
        "check",
        &example("va.json"),
        "--candidate",
        "p1=1,p2=1",
        "--solver-cmd",
        "sleep 5",
        "--timeout-ms",
        "100",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(exit::UNKNOWN));
    let r = report(&out);
    assert_eq!(r.outcome, "unknown");
    assert!(r.message.unwrap().contains("timeout"));
}

#[test]
fn solver_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_lyapsyn"))
        .args(["check", &example("va.json"), "--candidate", "p1=1,p2=1"])
        .env("LYAPSYN_SOLVER", "no-such-solver-binary -in")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(exit::USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-solver-binary"));
}

#[test]
fn explain_scalar_exp() {
    let out = lyapsyn(&["explain", &example("vb_n3.json")]);
    assert_eq!(out.status.code(), Some(exit::SUCCESS));
    let text = stdout(&out);
    // 2px(x^2 - (1 + x + x^2/2 + x^3/6 + eps) + 1), expanded by hand.
    assert!(text.contains("relaxed deficit: -1/3*p*x^4 + p*x^3 - 2*p*x^2 - 2*p*x*eps_0"), "{text}");
    assert!(text.contains("|eps_0| <= |x|^4/12"), "{text}");
    assert!(text.contains("domain: -2 < x < 2"));
    assert!(text.contains("(p*x^2 <= 0 or "));
}

#[test]
fn explain_bounds_per_function() {
    let vc = stdout(&lyapsyn(&["explain", &example("vc.json")]));
    assert!(vc.contains("|eps_0| <= |x1|^4/24"), "{vc}");
    let ve = stdout(&lyapsyn(&["explain", &example("ve.json")]));
    assert!(ve.contains("|eps_0| <= |x2|^13/13"), "{ve}");
    assert!(ve.contains("x1+ = 1/2*x1 - 1/4*arctan(x2)"), "{ve}");
    let vd = stdout(&lyapsyn(&["explain", &example("vd.json")]));
    assert!(vd.contains("region 0 where x1*x2 <= 0"), "{vd}");
    assert!(vd.contains("region 1 where x1*x2 > 0"), "{vd}");
}

#[test]
fn asymptotic_flag_changes_the_decrease_condition() {
    let out = lyapsyn(&["synth", &example("va.json"), "--asymptotic", "--out", tempfile::tempdir().unwrap().path().to_str().unwrap(), "--json"]);
    let r = report(&out);
    assert_ne!(r.outcome, "solver_unknown");
    assert!(out.status.code() == Some(exit::SUCCESS) || out.status.code() == Some(exit::REFUTED));
}

#[test]
fn text_report_is_readable() {
    let out = lyapsyn(&["check", &example("va.json"), "--candidate", "p1=1/4,p2=1/4"]);
    let text = stdout(&out);
    assert!(text.starts_with("check: valid"));
    assert!(text.contains("V = 1/4*x1^2 + 1/4*x2^2"), "{text}");
    assert!(text.contains("region 0: unsat"));
}

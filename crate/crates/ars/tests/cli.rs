use std::path::PathBuf;
use std::process::Command;

use ars::cli::{run, EXIT_AFFIRMATIVE, EXIT_ERROR, EXIT_NEGATIVE, EXIT_NON_STABILIZING};
use ars::trace;
use ars::Workspace;

fn corpus(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/corpus");
    p.push(name);
    p.display().to_string()
}

fn ars(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ars").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn follower_trace() {
    let ws = corpus("follower.ars");
    let (code, out, _) = ars(&["solve", &ws, "--genfn", "follow", "--mu", "0", "--input", "high", "--schedule", "every"]);
    assert_eq!(code, EXIT_AFFIRMATIVE);
    assert_eq!(out, "time,x1\n-inf,0\n1,1\n");
}

#[test]
fn identity_trace_has_only_the_initial_row() {
    let ws = corpus("follower.ars");
    let (code, out, _) = ars(&["solve", &ws, "--genfn", "hold", "--mu", "0", "--input", "pulse", "--schedule", "late"]);
    assert_eq!(code, EXIT_AFFIRMATIVE);
    assert_eq!(out, "time,x1\n-inf,0\n");
}

#[test]
fn oscillator_exits_three_with_cycle() {
    let ws = corpus("follower.ars");
    let (code, out, err) = ars(&["solve", &ws, "--genfn", "invert", "--mu", "0", "--input", "high", "--schedule", "every"]);
    assert_eq!(code, EXIT_NON_STABILIZING);
    assert!(out.is_empty());
    assert!(err.contains("cycle from t=1 through 0 1"), "{err}");
}

#[test]
fn literal_arguments_and_trace_formats_agree() {
    let ws = corpus("gates.ars");
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let vcd = dir.path().join("x.vcd");
    let common = [
        "solve", &ws, "--genfn", "latch", "--mu", "10", "--input", "set", "--schedule", "stagger",
    ];
    let mut args = common.to_vec();
    args.extend(["--out", csv.to_str().unwrap()]);
    assert_eq!(ars(&args).0, EXIT_AFFIRMATIVE);
    let mut args = common.to_vec();
    args.extend(["--format", "vcd", "--out", vcd.to_str().unwrap()]);
    assert_eq!(ars(&args).0, EXIT_AFFIRMATIVE);
    let from_csv = trace::read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    let from_vcd = trace::read_vcd(std::io::BufReader::new(std::fs::File::open(&vcd).unwrap())).unwrap();
    assert_eq!(from_csv, from_vcd);
    assert_eq!(from_csv.to_string(), "init 10 ; 3/2:00 ; 5/2:01");

    let (code, out, _) = ars(&[
        "solve", &ws, "--genfn", "and", "--mu", "0", "--input", "init 11",
        "--schedule", "sched n=1 prefix[] tail anchor=0 period=1 [1/2:{1}]",
    ]);
    assert_eq!(code, EXIT_AFFIRMATIVE);
    assert_eq!(out, "time,x1\n-inf,0\n1/2,1\n");
}

#[test]
fn membership_exit_codes() {
    let ws = corpus("follower.ars");
    let (code, out, _) = ars(&["member", &ws, "--genfn", "follow", "--input", "step", "--state", "init 0 ; 2:1"]);
    assert_eq!(code, EXIT_AFFIRMATIVE);
    assert!(out.contains("witness: sched n=1 prefix[2:{1}]"), "{out}");
    let (code, out, _) = ars(&["member", &ws, "--genfn", "follow", "--input", "step", "--state", "init 0"]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.contains("not a fixed point"), "{out}");
}

#[test]
fn check_emits_a_usable_computation_function() {
    let ws = corpus("follower.ars");
    let (code, out, _) = ars(&["check", &ws, "--genfn", "follow", "--system", "f", "--emit-pi", "pf"]);
    assert_eq!(code, EXIT_AFFIRMATIVE);
    let pi_text = out.trim_start_matches("generated: yes\n");
    let extended = format!("{}\n{pi_text}", std::fs::read_to_string(&ws).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ws.ars");
    std::fs::write(&path, &extended).unwrap();
    let path = path.to_str().unwrap();
    let (code, out, _) = ars(&["verify", path, "--theorem", "dual", "--left", "f", "--genfn", "follow", "--pi-left", "pf"]);
    assert_eq!(code, EXIT_AFFIRMATIVE, "{out}");

    let (code, out, _) = ars(&["check", &ws, "--genfn", "follow", "--system", "wrong", "--json"]);
    assert_eq!(code, EXIT_NEGATIVE);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["generated"], false);
    assert!(json["counterexample"]["conflict"].as_str().unwrap().contains("t=1/2"));
}

#[test]
fn synthesis_output_is_a_generator() {
    let ws = corpus("gates.ars");
    let (code, out, _) = ars(&["synth", &ws, "--system", "gate", "--name", "found"]);
    assert_eq!(code, EXIT_AFFIRMATIVE);
    let text = format!("{}\n{out}", std::fs::read_to_string(&ws).unwrap());
    let parsed = Workspace::parse(&text).unwrap();
    let report =
        ars_core::regularity::check_generated(&parsed.systems["gate"], &parsed.genfns["found"], 1000).unwrap();
    assert!(report.generated());

    let (code, _, _) = ars(&["synth", &corpus("follower.ars"), "--system", "f"]);
    assert_eq!(code, EXIT_AFFIRMATIVE);
}

#[test]
fn union_of_a_system_with_itself_holds() {
    let ws = corpus("combine.ars");
    let (code, out, _) = ars(&["verify", &ws, "--theorem", "union", "--left", "a", "--right", "a", "--genfn", "follow"]);
    assert_eq!(code, EXIT_AFFIRMATIVE, "{out}");
    assert!(out.starts_with("theorem union: holds"));
}

#[test]
fn definedness_errors_exit_two() {
    let ws = corpus("combine.ars");
    let (code, _, err) = ars(&["combine", &ws, "--op", "intersect", "--left", "a", "--right", "c"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("empty"), "{err}");
    let (code, _, _) = ars(&["verify", &ws, "--theorem", "parallel", "--left", "a", "--right", "c", "--genfn", "follow"]);
    assert_eq!(code, EXIT_ERROR);
    let (code, _, err) = ars(&["combine", &ws, "--op", "serial-star", "--left", "b", "--right", "h"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("error"), "{err}");
}

#[test]
fn resolution_and_usage_errors_exit_two() {
    let ws = corpus("follower.ars");
    assert_eq!(ars(&["check", &ws, "--genfn", "nope", "--system", "f"]).0, EXIT_ERROR);
    assert_eq!(ars(&["verify", &ws, "--theorem", "nonsense", "--left", "f", "--genfn", "follow"]).0, EXIT_ERROR);
    assert_eq!(ars(&["solve", &ws]).0, EXIT_ERROR);
    assert_eq!(ars(&["check", "/nonexistent.ars", "--genfn", "f", "--system", "f"]).0, EXIT_ERROR);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ars");
    std::fs::write(&bad, "signal u = init 0\nsignal v = init 2\n").unwrap();
    let (code, _, err) = ars(&["check", bad.to_str().unwrap(), "--genfn", "f", "--system", "f"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains(":2:"), "{err}");
}

#[test]
fn premise_failure_is_an_error_not_a_verdict() {
    let ws = corpus("follower.ars");
    let (code, _, err) = ars(&["verify", &ws, "--theorem", "dual", "--left", "wrong", "--genfn", "follow"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("premise"), "{err}");
}

#[test]
fn serial_findings_carry_witnesses() {
    let ws = corpus("combine.ars");
    let (code, out, _) = ars(&[
        "verify", &ws, "--theorem", "serial", "--left", "a", "--right", "h", "--genfn", "follow", "--json",
    ]);
    assert_eq!(code, EXIT_NEGATIVE);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["holds"], false);
    for check in json["checks"].as_array().unwrap() {
        if check["status"] == "fail" {
            assert!(check["witness"].as_str().unwrap().contains("schedule"));
        }
    }
}

#[test]
fn combine_writes_a_workspace() {
    let ws = corpus("combine.ars");
    for op in ["product", "parallel", "union", "serial", "serial-star", "dual"] {
        let right = if op.starts_with("serial") { "h" } else { "b" };
        let (code, out, err) = ars(&["combine", &ws, "--op", op, "--left", "a", "--right", right, "--derived"]);
        assert_eq!(code, EXIT_AFFIRMATIVE, "{op}: {err}");
        let parsed = Workspace::parse(&out).unwrap();
        assert_eq!(parsed.systems.len(), 1, "{op}");
    }
    let (code, out, _) = ars(&["combine", &ws, "--op", "intersect", "--left", "a", "--right", "b", "--derived"]);
    assert_eq!(code, EXIT_AFFIRMATIVE);
    assert!(out.contains("#   (init 0 ; 1:1) -> { 0 }"), "{out}");
}

#[test]
fn derived_computation_function_is_printed() {
    let ws = corpus("follower.ars");
    let (_, pf, _) = ars(&["check", &ws, "--genfn", "follow", "--system", "g", "--emit-pi", "pg"]);
    let text = format!("{}\n{}", std::fs::read_to_string(&ws).unwrap(), pf.trim_start_matches("generated: yes\n"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ws.ars");
    std::fs::write(&path, &text).unwrap();
    let (code, out, err) = ars(&[
        "combine", path.to_str().unwrap(), "--op", "dual", "--left", "g", "--derived", "--pi-left", "pg", "--name", "gd",
    ]);
    assert_eq!(code, EXIT_AFFIRMATIVE, "{err}");
    let parsed = Workspace::parse(&out).unwrap();
    assert_eq!(parsed.computations["gd_pi"].len(), 2);
}

#[test]
fn worker_count_does_not_change_output() {
    let ws = corpus("combine.ars");
    let args = ["verify", &ws, "--theorem", "intersection", "--left", "a", "--right", "b", "--genfn", "follow"];
    let base = ars(&args);
    for jobs in ["1", "3"] {
        let mut with_jobs = args.to_vec();
        with_jobs.extend(["--jobs", jobs]);
        assert_eq!(ars(&with_jobs), base);
    }
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ars");
    let ws = corpus("follower.ars");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["member", &ws, "--genfn", "follow", "--input", "step", "--state", "init 0 ; 2:1"]), Some(0));
    assert_eq!(status(&["member", &ws, "--genfn", "follow", "--input", "step", "--state", "init 0"]), Some(1));
    assert_eq!(status(&["member", &ws, "--genfn", "missing", "--input", "step", "--state", "init 0"]), Some(2));
    assert_eq!(
        status(&["solve", &ws, "--genfn", "invert", "--mu", "0", "--input", "high", "--schedule", "every"]),
        Some(3)
    );
}

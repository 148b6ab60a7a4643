use std::fs;
use std::path::Path;
use std::process::Command;

use tacheck::buchi_check::CSV_HEADER;
use tacheck::cli::run;

const UNIT_LOOP: &str = "clocks: x, y
automaton A:
  state q accepting
  trans q -> q guard x == 1 reset {x} label b
";

const FORCED_DELAY: &str = "clocks: x, y
automaton A:
  state q accepting invariant y <= 2
  trans q -> q guard x >= 1 reset {x}
";

fn run_args(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tacheck").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unit = write(dir.path(), "unit.ta", UNIT_LOOP);
    let (code, out, _) = run_args(&["check", &unit]);
    assert_eq!(code, 1);
    assert!(out.starts_with("result: CycleFound\n"), "{out}");
    assert!(out.contains("iterability checks: 1\n"));
    assert!(out.contains("witness: iterable cycle t0 at (q)\n"));

    let empty = write(dir.path(), "empty.ta", "clocks: x\nautomaton A:\n  state q\n  trans q -> q guard x <= 1\n");
    let (code, out, _) = run_args(&["check", &empty, "--mode", "dfss"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("result: Empty\n"));

    let (code, _, err) = run_args(&["check", &dir.path().join("missing.ta").to_string_lossy()]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: "));
}

#[test]
fn csv_output_has_the_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let unit = write(dir.path(), "unit.ta", UNIT_LOOP);
    let (code, out, _) = run_args(&["check", &unit, "--csv", "--seed", "4"]);
    assert_eq!(code, 1);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines[0], "model,N,mode,seed,visited,subsumptions,iter_checks,result");
    assert_eq!(lines[1], "unit,0,idfss,4,1,0,1,CycleFound");
}

#[test]
fn iterability_reports() {
    let dir = tempfile::tempdir().unwrap();
    let unit = write(dir.path(), "unit.ta", UNIT_LOOP);
    let (code, out, _) = run_args(&["iterability", &unit, "--path", "t0"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().nth(1), Some("Iterable"));
    assert!(out.contains("W: "));
    assert!(out.contains("compositions: "));

    let forced = write(dir.path(), "forced.ta", FORCED_DELAY);
    let (code, out, _) = run_args(&["iterability", &forced, "--path", "0"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.trim_end(),
        "NotIterable (condition 2: reset clock x forces a positive delay while unreset clock y is bounded above)"
    );

    let (code, out, _) = run_args(&["iterability", &unit, "--list"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("t0"));

    let (code, _, err) = run_args(&["iterability", &unit, "--path", "t5"]);
    assert_eq!(code, 2);
    assert!(err.contains("invalid transition path"));
}

#[test]
fn generated_models_can_be_checked() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("csma.ta");
    let prop = dir.path().join("csma_prop.ta");
    let (code, _, err) = run_args(&[
        "gen-model",
        "--family",
        "csma",
        "--n",
        "2",
        "--fixed",
        "--nonzeno",
        "--scale",
        "26",
        "-o",
        model.to_str().unwrap(),
        "--property-out",
        prop.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) =
        run_args(&["check", model.to_str().unwrap(), "--property", prop.to_str().unwrap(), "--mode", "dfss"]);
    assert!(code == 0 || code == 1);
    let (code2, _, _) = run_args(&["check", model.to_str().unwrap(), "--builtin", "csma", "--scale", "26"]);
    assert_eq!(code, code2, "{out}");
}

#[test]
fn bench_prints_csv_or_a_table() {
    let (code, out, _) = run_args(&["bench", "--family", "fischer", "--n", "2", "--seeds", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines[1].starts_with("fischer,2,dfss,0,"));
    assert!(lines[2].starts_with("fischer,2,idfss,0,"));

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let (code, out, _) =
        run_args(&["bench", "--family", "fischer", "--n", "2", "--seeds", "3", "--out", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().starts_with("dfss"));
    assert_eq!(fs::read_to_string(csv).unwrap().lines().count(), 7);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run_args(&["check"]).0, 2);
    assert_eq!(run_args(&["gen-model", "--family", "nope", "--n", "2"]).0, 2);
    let (code, out, _) = run_args(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("iterability"));
}

#[test]
fn binary_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let unit = write(dir.path(), "unit.ta", UNIT_LOOP);
    let st = Command::new(env!("CARGO_BIN_EXE_tacheck")).args(["check", &unit]).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&st.stdout).contains("CycleFound"));
}

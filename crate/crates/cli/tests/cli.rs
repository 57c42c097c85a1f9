use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_hypermc");

const FORK: &str = "aps: a\ninit: 0\nstate 0 {a}\n-> 1 2\nstate 1 {a}\n-> 1\nstate 2 {}\n-> 2\n";

const GNI: &str = "forall p1. forall p2. exists p3. G (h_p1 <-> h_p3) & G ((l_p2 <-> l_p3) & (o_p2 <-> o_p3))";

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let Output { status, stdout, stderr } = Command::new(BIN).args(args).output().expect("binary runs");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn check_inline(system: &Path, formula: &str, extra: &[&str]) -> Run {
    let mut args = vec!["check", "--system", s(system), "--formula-inline", formula];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn verdicts_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let sys = file(&dir, "fork.txt", FORK);
    let holds = check_inline(&sys, "forall p. a_p", &[]);
    assert_eq!((holds.code, holds.stdout.as_str()), (0, "HOLDS\n"));
    let fails = check_inline(&sys, "forall p. G a_p", &[]);
    assert_eq!(fails.code, 1);
    assert!(fails.stdout.starts_with("FAILS"));
}

#[test]
fn witness_names_the_trace_variable() {
    let dir = TempDir::new().unwrap();
    let sys = file(&dir, "fork.txt", FORK);
    let out = check_inline(&sys, "forall p. G a_p", &["--witness"]);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "FAILS");
    assert!(lines[1].ends_with("for p"), "{}", out.stdout);
    assert!(lines[2].contains("LOOP:"), "{}", out.stdout);
}

#[test]
fn malformed_formula_reports_position() {
    let dir = TempDir::new().unwrap();
    let sys = file(&dir, "fork.txt", FORK);
    let out = check_inline(&sys, "forall p. (a_p", &[]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.starts_with("ERROR"));
    assert!(out.stdout.contains("1:13"), "{}", out.stdout);
}

#[test]
fn missing_system_is_an_input_error() {
    let out = run(&["check", "--system", "/nonexistent/system.txt", "--formula-inline", "forall p. a_p"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.starts_with("ERROR"));
}

#[test]
fn tiny_timeout_is_a_resource_failure() {
    let dir = TempDir::new().unwrap();
    let system = run(&["gen", "system", "--states", "30", "--outdegree", "5", "--seed", "3"]);
    assert_eq!(system.code, 0);
    let sys = file(&dir, "big.txt", &system.stdout);
    let formula = run(&["gen", "formula", "--pattern", "eaeae", "--size", "10", "--seed", "3"]);
    let out = check_inline(&sys, formula.stdout.trim(), &["--timeout", "0.001"]);
    assert_eq!((out.code, out.stdout.as_str()), (3, "TIMEOUT\n"));
}

#[test]
fn self_hosted_external_engine_agrees() {
    let dir = TempDir::new().unwrap();
    let sys = file(&dir, "fork.txt", FORK);
    let engine = format!("external:{BIN} include --a {{A}} --b {{B}}");
    for formula in [
        "forall p. exists q. G (a_p <-> X a_q)",
        "forall p. exists q. G (a_p <-> a_q)",
        "forall p. forall q. F (a_p <-> a_q)",
        "exists p. forall q. (a_p U !a_q)",
    ] {
        let native = check_inline(&sys, formula, &[]);
        let external = check_inline(&sys, formula, &["--engine", &engine]);
        assert_eq!(native.stdout, external.stdout, "{formula}: {}", external.stderr);
        assert_eq!(native.code, external.code);
    }
}

#[test]
fn failing_external_tool_is_a_resource_failure() {
    let dir = TempDir::new().unwrap();
    let sys = file(&dir, "fork.txt", FORK);
    for engine in ["external:false", "external:/nonexistent/tool {A} {B}"] {
        let out = check_inline(&sys, "forall p. exists q. G a_q", &["--engine", engine]);
        assert_eq!(out.code, 3, "{engine}");
        assert!(out.stdout.starts_with("ERROR"), "{engine}: {}", out.stdout);
    }
}

#[test]
fn exploded_programs_meet_noninterference() {
    let dir = TempDir::new().unwrap();
    let header = "var h, l, o;\nobserve h as h; observe l as l; observe o as o;\n";
    for (name, body, code) in [("safe", "o := l;", 0), ("leak", "o := h;", 1)] {
        let prog = file(
            &dir,
            &format!("{name}.bp"),
            &format!("{header}while true {{ h := input(); l := input(); {body} }}"),
        );
        let sys = dir.path().join(format!("{name}.txt"));
        let exploded = run(&["explode", "--program", s(&prog), "--bitwidth", "1", "--out", s(&sys)]);
        assert_eq!(exploded.code, 0, "{}", exploded.stdout);
        let out = check_inline(&sys, GNI, &["--oracle"]);
        assert_eq!(out.code, code, "{name}: {}", out.stdout);
        assert!(out.stderr.contains("oracle agrees"), "{name}: {}", out.stderr);
    }
}

#[test]
fn explode_rejects_undeclared_variables() {
    let dir = TempDir::new().unwrap();
    let prog = file(&dir, "bad.bp", "var h;\nwhile true { h := x; }\n");
    let out = run(&["explode", "--program", s(&prog), "--bitwidth", "1", "--out", s(&dir.path().join("o.txt"))]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.contains("`x`"), "{}", out.stdout);
}

#[test]
fn generators_are_seeded() {
    let sys_args = ["gen", "system", "--states", "8", "--p", "0.3", "--aps", "2", "--seed", "5"];
    let first = run(&sys_args);
    assert_eq!(first.code, 0);
    assert_eq!(first.stdout, run(&sys_args).stdout);
    let formula = run(&["gen", "formula", "--pattern", "aea", "--size", "6", "--seed", "5"]);
    assert_eq!(formula.code, 0);

    let dir = TempDir::new().unwrap();
    let sys = file(&dir, "sys.txt", &first.stdout);
    let out = check_inline(&sys, formula.stdout.trim(), &["--oracle"]);
    assert!(out.code <= 1, "{}", out.stdout);
}

#[test]
fn bad_generator_pattern_is_an_input_error() {
    let out = run(&["gen", "formula", "--pattern", "axe", "--size", "3"]);
    assert_eq!(out.code, 2);
}

#[test]
fn exported_inclusion_instances_round_trip_through_include() {
    let dir = TempDir::new().unwrap();
    let sys = file(&dir, "fork.txt", FORK);
    let formula = file(&dir, "f.txt", "forall p. exists q. G (a_p <-> X a_q)\n");
    let prefix = dir.path().join("inst");
    let out = run(&["export-inclusion", "--system", s(&sys), "--formula", s(&formula), "--out-prefix", s(&prefix)]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let files: Vec<&str> = out.stdout.lines().collect();
    assert!(files.iter().all(|f| Path::new(f).exists()));
    let system = files.iter().find(|f| f.ends_with("system.ba")).unwrap();
    let property = files.iter().find(|f| f.ends_with("property.ba")).unwrap();

    let verdict = check_inline(&sys, "forall p. exists q. G (a_p <-> X a_q)", &[]);
    let included = run(&["include", "--a", system, "--b", property]);
    assert_eq!(included.stdout.starts_with("INCLUDED"), verdict.code == 0);
    for engine in ["complement", "antichain"] {
        let same = run(&["include", "--a", system, "--b", system, "--engine", engine]);
        assert_eq!(same.stdout, "INCLUDED\n");
    }
}

#[test]
fn sweep_writes_csv_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = file(
        &dir,
        "sweep.cfg",
        "sizes = 4\noutdegrees = 2\npatterns = ae, ea\nbody_sizes = 3\nsamples = 2\nseed = 9\n",
    );
    let out = run(&["sweep", "--config", s(&cfg), "--jobs", "1"]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert!(lines[0].starts_with("pattern,n,p"));
    assert_eq!(lines.len(), 1 + 4);
}

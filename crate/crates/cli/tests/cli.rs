use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn hyprover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyprover")).args(args).output().unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hyprover"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn gen(kind: &str, dir: &Path) -> (String, String) {
    let o = hyprover(&["gen-bench", kind, dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    (
        dir.join("system.ts").to_str().unwrap().to_string(),
        dir.join("formula.hltl").to_str().unwrap().to_string(),
    )
}

fn without_timings(report: &str) -> String {
    report.lines().filter(|l| !l.starts_with("time ")).collect::<Vec<_>>().join("\n")
}

#[test]
fn running_example_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (sys, f) = gen("running", dir.path());
    let none = hyprover(&["check", &sys, &f, "--prophecies", "none"]);
    assert_eq!(none.status.code(), Some(2));
    assert!(stdout(&none).contains("verdict: unknown"));
    let auto = hyprover(&["check", &sys, &f, "--prophecies", "auto"]);
    assert_eq!(auto.status.code(), Some(0));
    let out = stdout(&auto);
    assert!(out.contains("verdict: verified") && out.contains("MinP: 1\n"), "{out}");
    assert!(out.contains("#P: ") && out.contains("SizeP: ") && out.contains("time "));
    assert_eq!(hyprover(&["oracle", &sys, &f]).status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (sys, f) = gen("gni", dir.path());
    let a = hyprover(&["check", &sys, &f, "--jobs", "3"]);
    let b = hyprover(&["check", &sys, &f, "--jobs", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_timings(&stdout(&a)), without_timings(&stdout(&b)));
}

#[test]
fn input_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let (_, f) = gen("running", dir.path());
    let bad = dir.path().join("bad.ts");
    fs::write(&bad, "aps: a\ninit: s1\nstate s1 {a}\n  -> s7\n").unwrap();
    let o = hyprover(&["check", bad.to_str().unwrap(), &f]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    assert_eq!(hyprover(&["check", "/nonexistent.ts", &f]).status.code(), Some(3));
    assert_eq!(hyprover(&["check", "--bogus"]).status.code(), Some(3));
    assert_eq!(hyprover(&["gen-bench", "lowerbound:3", dir.path().to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn resource_cap_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let (sys, f) = gen("gni", dir.path());
    assert_eq!(hyprover(&["check", &sys, &f, "--state-cap", "10"]).status.code(), Some(4));
}

#[test]
fn lower_bound_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let (sys, f) = gen("lowerbound:4", dir.path());
    let text = fs::read_to_string(&sys).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("state ")).count(), 11);
    let o = hyprover(&["check", &sys, &f]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("MinP: 2\n"));
}

#[test]
fn manual_prophecies_from_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let (sys, f) = gen("ltlex", dir.path());
    let mode = format!("file:{}", dir.path().join("prophecies").display());
    let o = hyprover(&["check", &sys, &f, "--prophecies", &mode]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = hyprover(&["check", &sys, &f, "--prophecies", "file:/nonexistent"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn violated_certificate_replays_but_cannot_be_explained() {
    let dir = tempfile::tempdir().unwrap();
    let (sys, _) = gen("running", dir.path());
    let f = dir.path().join("false.hltl");
    fs::write(&f, "forall p. exists q. G (a_q & !a_p)\n").unwrap();
    let f = f.to_str().unwrap();
    let cert = dir.path().join("cert");
    let o = hyprover(&["check", &sys, f, "--cert", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(fs::read_to_string(cert.join("meta")).unwrap().contains("verdict: violated"));
    assert_eq!(hyprover(&["oracle", &sys, f]).status.code(), Some(1));
    let o = with_stdin(&["explain", cert.to_str().unwrap(), &sys, f], "quit\n");
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn explain_rejects_a_foreign_system() {
    let dir = tempfile::tempdir().unwrap();
    let (sys, f) = gen("running", dir.path());
    let cert = dir.path().join("cert");
    hyprover(&["check", &sys, &f, "--cert", cert.to_str().unwrap()]);
    let other = dir.path().join("other.ts");
    fs::write(&other, "aps: a\ninit: s1\nstate s1 {a}\n  -> s1\n").unwrap();
    let o = with_stdin(&["explain", cert.to_str().unwrap(), other.to_str().unwrap(), &f], "quit\n");
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("digest mismatch"));
}

#[test]
fn explain_transcript_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (sys, f) = gen("running", dir.path());
    let cert = dir.path().join("cert");
    assert_eq!(hyprover(&["check", &sys, &f, "--cert", cert.to_str().unwrap()]).status.code(), Some(0));
    let script = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/running.in")).unwrap();
    let want = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/running.out")).unwrap();
    let o = with_stdin(&["explain", cert.to_str().unwrap(), &sys, &f], &script);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), want);
}

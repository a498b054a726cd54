use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lnd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lnd"))
        .args(args)
        .output()
        .unwrap()
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn shipped_family_corpus_passes() {
    let o = lnd(&[
        "check",
        corpus("freudenburg_family.corpus").to_str().unwrap(),
        "--budget",
        "8",
    ]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert!(
        out.lines()
            .all(|l| l.starts_with("PASS ") || l.starts_with("summary: ")),
        "{out}"
    );
    assert!(out.ends_with("summary: 26/0/0\n"), "{out}");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let path = corpus("group_model.corpus");
    let args = ["report", path.to_str().unwrap(), "--budget", "6", "--seed", "41"];
    let (a, b) = (lnd(&args), lnd(&args));
    assert_eq!(a.stdout, b.stdout);
    assert!(a.status.success());
}

#[test]
fn wrong_plinth_expectation_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        &dir,
        "bad.corpus",
        "poly P = x*z + y^2\nderivation D = delta(P)\ncheck plinth_expect(D, a = 1)\n",
    );
    let o = lnd(&["check", &f]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("FAIL plinth_expect@3 — "), "{out}");
    assert!(out.contains("a = z"), "{out}");
    assert!(out.ends_with("summary: 0/1/0\n"));
}

#[test]
fn counterexample_corpus_fails_every_directive() {
    let o = lnd(&["check", corpus("counterexamples.corpus").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("summary: 0/5/0\n"));
}

#[test]
fn empty_corpus_gives_empty_summary() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "empty.corpus", "# nothing here\n");
    let o = lnd(&["check", &f]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "summary: 0/0/0\n");
}

#[test]
fn errors_make_the_exit_code_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "err.corpus", "poly p = x\ncheck exp_log_roundtrip(p)\n");
    let o = lnd(&["check", &f]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("ERROR exp_log_roundtrip@2 — 2:25:"), "{out}");
}

#[test]
fn syntax_errors_are_positioned_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "syntax.corpus", "poly P = x*z +\n");
    for cmd in ["check", "parse", "report"] {
        let o = lnd(&[cmd, &f]);
        assert_eq!(o.status.code(), Some(2));
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains("syntax.corpus:2:1: expected expression"), "{err}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn parse_prints_the_canonical_form() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        &dir,
        "c.corpus",
        "poly   P = x*z+y^2 # comment\nderivation D {x->-2*y;y->z;z->0}\ncheck exp_log_roundtrip( D )\n",
    );
    let o = lnd(&["parse", &f]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        text,
        "poly P = x*z + y^2\nderivation D { x -> -2*y; y -> z; z -> 0 }\ncheck exp_log_roundtrip(D)\n"
    );
    let again = write(&dir, "d.corpus", &text);
    assert_eq!(stdout(&lnd(&["parse", &again])), text);
}

#[test]
fn missing_files_and_bad_flags_are_reported() {
    let o = lnd(&["check", "/nonexistent/x.corpus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr)
        .unwrap()
        .contains("/nonexistent/x.corpus"));
    let o = lnd(&["check", "x.corpus", "--deg-max", "99"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_shows_witnesses() {
    let o = lnd(&[
        "report",
        corpus("translations.corpus").to_str().unwrap(),
        "--budget",
        "4",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\n    lhs: "));
}

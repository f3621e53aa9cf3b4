use std::path::PathBuf;
use std::process::{Command, Output};

fn sample(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "samples", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metafinite")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn parse_prints_canonical_form() {
    let o = run(&["parse", "--formula", &sample("has_five.fo"), "--sig", &sample("unary.sig")]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("exists x."), "{text}");
}

#[test]
fn model_check_and_compile_agree() {
    let f = sample("has_five.fo");
    let s = sample("unary.sig");
    let st = sample("pair.str");
    let o = run(&["model-check", "--formula", &f, "--sig", &s, "--structure", &st]);
    assert_eq!(stdout(&o), "true");
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("c.circ");
    let o = run(&["compile", "--formula", &f, "--sig", &s, "--u", "2", "--numbered"]);
    assert!(o.status.success());
    std::fs::write(&circ, &o.stdout).unwrap();
    let o = run(&["eval-circuit", "--circuit", circ.to_str().unwrap(), "--structure", &st, "--sig", &s]);
    assert_eq!(stdout(&o), "1");
    let o = run(&["eval-circuit", "--circuit", circ.to_str().unwrap(), "--values", "3,4"]);
    assert_eq!(stdout(&o), "0");
}

#[test]
fn eval_three_input() {
    let o = run(&["eval-circuit", "--circuit", &sample("three_input.circ"), "--values", "2,3,4"]);
    assert_eq!(stdout(&o), "13");
}

#[test]
fn oracle_output_gate() {
    let args = ["--formula", &sample("has_five.fo"), "--sig", &sample("unary.sig")];
    let compiled = run(&[&["compile", "--u", "2"][..], &args[..]].concat());
    let text = stdout(&compiled);
    let output_id: u64 = text
        .lines()
        .find(|l| l.contains(" output "))
        .and_then(|l| l.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    let gate = output_id.to_string();
    let o = run(&[&["oracle", "--n", "2", "--gate", &gate, "--pred", "1"][..], &args[..]].concat());
    assert_eq!(stdout(&o), format!("6 {} 0", output_id - 1));
    let beyond = (output_id + 3).to_string();
    let o = run(&[&["oracle", "--n", "2", "--gate", &beyond][..], &args[..]].concat());
    assert_eq!(stdout(&o), "0 0 0");
}

#[test]
fn check_equiv_reports_agreement() {
    let args = ["--formula", &sample("tautology.fo"), "--sig", &sample("graph.sig")];
    let o = run(&[&["check-equiv", "--u", "2", "--count", "50"][..], &args[..]].concat());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "50/50 agree");
    let o = run(&[&["check-equiv", "--u", "2", "--exhaustive", "--formula", &sample("symmetric.fo"), "--sig", &sample("graph.sig")][..]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "64/64 agree");
}

#[test]
fn check_equiv_is_deterministic() {
    let args = ["check-equiv", "--u", "3", "--count", "20", "--seed", "9", "--formula", &sample("symmetric.fo"), "--sig", &sample("graph.sig")];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn normalize_then_reverse() {
    let dir = tempfile::tempdir().unwrap();
    let norm = dir.path().join("n.circ");
    let o = run(&["normalize", "--circuit", &sample("three_input.circ")]);
    assert!(o.status.success());
    std::fs::write(&norm, &o.stdout).unwrap();
    let arb = dir.path().join("tables.txt");
    let o = run(&["reverse", "--circuit", norm.to_str().unwrap(), "--u", "3", "--arb-out", arb.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("forall v"));
    let tables = std::fs::read_to_string(arb).unwrap();
    assert!(tables.starts_with("[arb]\n") && tables.contains("pred/"));
}

#[test]
fn encode_prints_tables_in_order() {
    let o = run(&["encode", "--sig", &sample("unary.sig"), "--structure", &sample("pair.str")]);
    assert_eq!(stdout(&o), "3 5");
}

#[test]
fn exit_codes() {
    let o = run(&["parse", "--formula", "/nonexistent.fo", "--sig", &sample("unary.sig")]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.trim().lines().count(), 1);
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["compile", "--u"]).status.code(), Some(2));
}

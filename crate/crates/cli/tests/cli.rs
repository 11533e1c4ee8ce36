use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn decor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decor")).args(args).output().unwrap()
}

fn bank() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/bank_account.decor")
}

fn script(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("decor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn bank_account_runs_clean() {
    let out = decor(&["run", bank().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("result: 2 @ (2)"), "{text}");
    assert!(text.ends_with("5 ok, 0 failed, 0 errors\n"));
}

#[test]
fn json_output_is_stable() {
    let b = bank();
    let args = ["check", b.to_str().unwrap(), "--format", "json"];
    let (a, c) = (decor(&args), decor(&args));
    assert_eq!(a.stdout, c.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    // `check` skips the two evaluations.
    assert_eq!(v["entries"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    let failing = script("fail.decor", "theory S = states(x: 2)\ncheck l_x . u_x == id[V_x] in S\n");
    assert_eq!(decor(&["check", failing.to_str().unwrap()]).status.code(), Some(1));
    let syntax = script("syntax.decor", "theory S = states(x 2)\n");
    let out = decor(&["check", syntax.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains(":1:21: expected `:`"));
    let ill_typed = script("types.decor", "theory S = states(x: 2)\ncheck l_x . l_x ~~ l_x in S\n");
    assert_eq!(decor(&["check", ill_typed.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(decor(&["check", "/nonexistent.decor"]).status.code(), Some(2));
}

#[test]
fn model_overrides_and_translations() {
    let s = script("two.decor", "theory S = states(x: 2, y: 2)\ncheck l_x . u_y ~~ l_x . <>[V_y] in S\n");
    let out = decor(&["verify", s.to_str().unwrap(), "--model", "x=3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["entries"][0]["points"], 12);
    let out = decor(&["dualize", s.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("theory S_dual = exceptions(x: 2, y: 2)"));
    assert_eq!(decor(&["check", s.to_str().unwrap(), "--model", "x"]).status.code(), Some(2));
}

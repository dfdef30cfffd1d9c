//! End-to-end checks of the binary: output formats, exit codes, and the
//! context/count pipeline identity.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn trfca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trfca"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn trfca_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_trfca"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json_field(out: &Output, field: &str) -> serde_json::Value {
    let parsed: serde_json::Value = serde_json::from_str(stdout(out).trim()).expect("valid json");
    parsed[field].clone()
}

#[test]
fn count_group_s3_json_schema() {
    let out = trfca(&["count", "--group", "S:3", "--json"]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    for field in [
        "rows",
        "cols",
        "ones",
        "density",
        "codensity",
        "count",
        "t_context_ms",
        "t_count_ms",
    ] {
        assert!(!parsed[field].is_null(), "missing {field}");
    }
    assert_eq!(parsed["rows"], parsed["cols"]);
}

#[test]
fn pipeline_identity_for_s3_and_chain() {
    for source in [["--group", "S:3"], ["--lattice", "chain:5"]] {
        let direct = trfca(&["count", source[0], source[1], "--json"]);
        assert!(direct.status.success());
        let expected = json_field(&direct, "count");

        let ctx = trfca(&["context", source[0], source[1]]);
        assert!(ctx.status.success());
        let piped = trfca_with_stdin(&["count", "--input", "-", "--json"], &stdout(&ctx));
        assert!(piped.status.success());
        assert_eq!(json_field(&piped, "count"), expected);
    }
}

#[test]
fn context_fimi_golden_chain2() {
    let out = trfca(&["context", "--lattice", "chain:2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1 2\n2\n0\n");
}

#[test]
fn context_pbm_golden_chain2() {
    let out = trfca(&["context", "--lattice", "chain:2", "--format", "pbm"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "P1\n3 3\n1 0 0\n1 1 0\n0 1 1\n");
}

#[test]
fn export_writes_files() {
    let dir = std::env::temp_dir().join(format!("trfca-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let dat = dir.join("c.dat");
    let out = trfca(&[
        "export",
        "--lattice",
        "chain:3",
        "--format",
        "fimi",
        "--out",
        dat.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&dat).unwrap();
    assert_eq!(body.lines().count(), 6);

    let counted = trfca(&["count", "--input", dat.to_str().unwrap(), "--json"]);
    assert_eq!(json_field(&counted, "count"), 14);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_code_parse_error() {
    let out = trfca(&["count", "--group", "nosuch:4"]);
    assert_eq!(out.status.code(), Some(1));
    let out = trfca(&["count", "--group", "S:4", "--lattice", "chain:2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = trfca(&["nonsense-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_code_cap_exceeded() {
    let out = trfca(&["count", "--group", "S:5", "--cap", "100"]);
    assert_eq!(out.status.code(), Some(2));
    let out = trfca(&["count", "--lattice", "subspaces:2,3", "--cap", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_io_error() {
    let out = trfca(&["count", "--input", "/nonexistent/path/x.dat"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn count_empty_context_is_one() {
    // the one-element lattice has no irreducibles and exactly one transfer
    // system
    let out = trfca(&["count", "--group", "cyclic:1", "--json"]);
    assert!(out.status.success());
    assert_eq!(json_field(&out, "count"), 1);
    assert_eq!(json_field(&out, "rows"), 0);
}

#[test]
fn enumerate_lists_concepts() {
    let out = trfca(&[
        "count",
        "--lattice",
        "chain:2",
        "--enumerate",
        "--limit",
        "10",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 5);

    let too_small = trfca(&[
        "count",
        "--lattice",
        "chain:2",
        "--enumerate",
        "--limit",
        "3",
    ]);
    assert_eq!(too_small.status.code(), Some(2));
}

#[test]
fn oracle_count_and_verify() {
    let out = trfca(&["oracle", "count", "--lattice", "subspaces:2,2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "19");

    let out = trfca(&["oracle", "count", "--lattice", "boolean:2", "--saturated"]);
    assert!(out.status.success());
    let saturated: usize = stdout(&out).trim().parse().unwrap();
    assert!(saturated > 0 && saturated < 10);

    let out = trfca(&["oracle", "verify", "--group", "S:3"]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn formula_outputs() {
    let out = trfca(&["formula", "rho-chain", "2"]);
    assert_eq!(stdout(&out).trim(), "rho: 5/9 = 0.555555555555");

    let out = trfca(&["formula", "rho-cyclic", "1,1,1"]);
    assert!(stdout(&out).contains("91/361"));

    let out = trfca(&["formula", "j-count", "grid", "7,7"]);
    assert_eq!(stdout(&out).trim(), "1232");

    let out = trfca(&["formula", "conjecture", "4"]);
    assert!(stdout(&out).contains("5/432"));
}

#[test]
fn formula_bounds_and_complexity_on_context_file() {
    let dir = std::env::temp_dir().join(format!("trfca-bounds-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let dat = dir.join("chain2.dat");
    let out = trfca(&[
        "export",
        "--lattice",
        "chain:2",
        "--format",
        "fimi",
        "--out",
        dat.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let bounds = trfca(&["formula", "bounds", "--input", dat.to_str().unwrap()]);
    let text = stdout(&bounds);
    assert!(text.contains("ones: 4"));
    assert!(text.contains("trivial_bound: 8"));

    let cx = trfca(&["complexity", "--input", dat.to_str().unwrap()]);
    let text = stdout(&cx);
    assert!(text.contains("complexity: 2"));
    assert!(text.contains("exact: true"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn density_subcommand() {
    let out = trfca(&["density", "--lattice", "boolean:2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("codensity: 11/25"));
}

#[test]
fn sorted_context_counts_the_same() {
    let plain = trfca(&["context", "--lattice", "chain:4"]);
    let sorted = trfca(&["context", "--lattice", "chain:4", "--sorted"]);
    let c1 = trfca_with_stdin(&["count", "--input", "-", "--json"], &stdout(&plain));
    let c2 = trfca_with_stdin(&["count", "--input", "-", "--json"], &stdout(&sorted));
    assert_eq!(json_field(&c1, "count"), json_field(&c2, "count"));
    assert_eq!(json_field(&c1, "count"), 42);

    // a context where the heuristic genuinely reorders: row values 1, 8, 7
    // sort to 8, 7, 1
    let sorted = trfca_with_stdin(
        &["context", "--input", "-", "--sorted"],
        "0\n3\n0 1 2\n",
    );
    assert_eq!(stdout(&sorted), "3\n0 1 2\n0\n");
}

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn halfclose(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfclose"))
        .args(args)
        .env_remove("HALF_CLOSE_MAX_DEGREE")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn order_27_example_is_not_closed() {
    let group = data("p27.json");
    let out = halfclose(&["check52", "--group", group.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["closed"], false);
    assert_eq!(v["witness"]["restriction"], "(0 3 6)");
    assert_eq!(v["config"]["command"], "check52");

    let out = halfclose(&["closure52", "--group", group.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["closure_order"], 81);
    assert_eq!(v["adjoined"], 1);
}

#[test]
fn pi_first_example() {
    let out = halfclose(&["pi", "--p", "3", "--key", "0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["order"], 9);
    assert_eq!(v["key"], "(0,0)");
}

#[test]
fn malformed_cycle_is_a_usage_error() {
    let out = halfclose(&["order", "--group", data("bad.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2, column 48"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(halfclose(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        halfclose(&["pi", "--p", "2", "--key", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        halfclose(&["pi", "--p", "3", "--key", "1,0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        halfclose(&["verify", "--suite", "no-such-suite"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        halfclose(&["circulant", "--n", "9", "--conn", "9:0"])
            .status
            .code(),
        Some(2)
    );
    let group = data("p27.json");
    assert_eq!(
        halfclose(&["kclosure", "--group", group.to_str().unwrap(), "--k", "4"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn degree_limit_from_environment() {
    let group = data("p27.json");
    let out = Command::new(env!("CARGO_BIN_EXE_halfclose"))
        .args(["order", "--group", group.to_str().unwrap()])
        .env("HALF_CLOSE_MAX_DEGREE", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_halfclose"))
        .args(["order", "--group", group.to_str().unwrap()])
        .env("HALF_CLOSE_MAX_DEGREE", "9")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["config"]["max_degree"], 9);
}

#[test]
fn block_commands() {
    let group = data("p27.json");
    let blocks = data("b1.json");
    let (g, b) = (group.to_str().unwrap(), blocks.to_str().unwrap());
    let v = stdout_json(&halfclose(&["blocks", "--group", g]));
    assert_eq!(v["count"], 3);
    let v = stdout_json(&halfclose(&["fixer", "--group", g, "--blocks", b]));
    assert_eq!(v["wstab_orders"], serde_json::json!(["3", "3", "3"]));
    let v = stdout_json(&halfclose(&[
        "wstab", "--group", g, "--blocks", b, "--block", "1",
    ]));
    assert_eq!(v["wstab"]["order"], 3);
    let v = stdout_json(&halfclose(&["quotient", "--group", g, "--blocks", b]));
    assert_eq!(v["quotient"]["order"], 3);
    assert_eq!(
        halfclose(&["wstab", "--group", g, "--blocks", b, "--block", "3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn constructions() {
    let z3 = data("z3.json");
    let z = z3.to_str().unwrap();
    let v = stdout_json(&halfclose(&["wreath", "--top", z, "--bottom", z]));
    assert_eq!(
        (v["degree"].clone(), v["order"].clone()),
        (9.into(), 81.into())
    );
    let v = stdout_json(&halfclose(&["keys", "--n", "4"]));
    assert_eq!(v["count"], 14);
    let v = stdout_json(&halfclose(&["circulant", "--n", "9", "--conn", "1:0,3:1"]));
    assert_eq!(v["transitive"], true);
    let v = stdout_json(&halfclose(&[
        "aut",
        "--tuples",
        data("fano.json").to_str().unwrap(),
    ]));
    assert_eq!(v["automorphisms"]["order"], 7);
    let v = stdout_json(&halfclose(&["suites", "closure"]));
    assert_eq!(v["count"], 4);
}

#[test]
fn verify_and_sylow_reports() {
    let out = halfclose(&["verify", "--suite", "example-agl"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert!(v.get("elapsed_ms").is_none());
    let out = halfclose(&["sylow-check", "--p", "3", "--n", "2", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["exceptions"], serde_json::json!([]));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let group = data("p27.json");
    let args = [
        "check52",
        "--group",
        group.to_str().unwrap(),
        "--order-cap",
        "10",
        "--seed",
        "7",
    ];
    assert_eq!(halfclose(&args).stdout, halfclose(&args).stdout);
    let args = ["verify", "--suite", "example-p3-closure", "--seed", "3"];
    assert_eq!(halfclose(&args).stdout, halfclose(&args).stdout);
}

#[test]
fn help_covers_every_command() {
    let out = halfclose(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for cmd in [
        "order",
        "blocks",
        "fixer",
        "wstab",
        "check52",
        "closure52",
        "kclosure",
        "quotient",
        "wreath",
        "pi",
        "keys",
        "sylow-check",
        "aut",
        "circulant",
        "verify",
        "suites",
    ] {
        assert!(text.contains(cmd), "missing {cmd}");
        assert_eq!(halfclose(&[cmd, "--help"]).status.code(), Some(0));
    }
}

use std::process::{Command, Output};

use serde_json::Value;

const OMEGA: &str = "(\\w. w w)(\\w. w w)";
const REMARK_M: &str = "(\\z. (\\w. w w)(\\w. w w)) (x0 (\\y. (\\w. w w)(\\w. w w)))";

fn ogspi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ogspi"))
        .args(args)
        .env_remove("OGSPI_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn traces_of_the_identity() {
    let o = ogspi(&["traces", "--lts", "aogs", "--depth", "2", "--term", "\\x. x"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let ts = v.as_array().unwrap();
    assert_eq!(ts.len(), 3);
    assert_eq!(ts[0], serde_json::json!([]));
    assert_eq!(ts[2][0]["kind"], "IOQ");
    assert_eq!(ts[2][1]["kind"], "PA");
    assert_eq!(ts[2][1]["subject"], "_p0");
    assert_eq!(ts[2][1]["objects"], serde_json::json!(["_x0"]));
    assert_eq!(ts[2][1]["polarity"], "P");

    let t = ogspi(&["traces", "--lts", "aogs", "--depth", "2", "--term", "\\x. x", "--format", "text"]);
    assert_eq!(stdout(&t), "ε\n(_p0)\n(_p0) · _p0^(_x0)\n");
}

#[test]
fn remark_pair_is_trace_equivalent() {
    let left = format!("<p1 |-> {REMARK_M} ; p2 |-> {OMEGA} | names: x0>");
    let right = format!("<p1 |-> {OMEGA} ; p2 |-> {REMARK_M} | names: x0>");
    for mode in ["trace", "upto"] {
        let o = ogspi(&["equiv", "--mode", mode, "--lts", "cogs", "--depth", "5", "--left", &left, "--right", &right]);
        assert_eq!(code(&o), 0, "{mode}: {}", stdout(&o));
        assert_eq!(json(&o)["verdict"], "equivalent");
    }
}

#[test]
fn beta_v_suite_passes() {
    let o = ogspi(&["check", "--suite", "beta-v"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("pass=25 fail=0"));
}

#[test]
fn distinguished_exits_one_with_witness() {
    let o = ogspi(&["equiv", "--mode", "trace", "--lts", "aogs", "--depth", "4", "--left", "\\x. x", "--right", "\\x. x x"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["verdict"], "distinguished");
    assert_eq!(v["depth"], 4);
    assert!(!v["witness"].as_array().unwrap().is_empty());
    assert_eq!(v["divergence_suspected"], false);
}

#[test]
fn inconclusive_exits_three() {
    let o = ogspi(&["equiv", "--mode", "enf", "--left", OMEGA, "--right", "(\\w. w w w)(\\w. w w w)"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["verdict"], "inconclusive");
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(code(&ogspi(&["frobnicate"])), 2);
    assert_eq!(code(&ogspi(&["traces", "--lts", "nope", "--term", "x"])), 2);
    let o = ogspi(&["parse", "--term", "\\x. ("]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:6"));
    assert_eq!(code(&ogspi(&["equiv", "--mode", "upto", "--lts", "aogs", "--left", "x", "--right", "x"])), 2);
}

#[test]
fn encode_prints_pi_syntax() {
    let o = ogspi(&["encode", "--term", "\\x. x"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "(p0). p0^(x0). !x0(x1,p1). p1^(x2). Fx(x2,x1)\n");
    let back = ogspi(&["parse", "--input", "process", "--term", stdout(&o).trim()]);
    assert_eq!(json(&back)["value"], stdout(&o).trim());
}

#[test]
fn step_lists_transitions() {
    let o = ogspi(&["step", "--lts", "pi", "--term", "\\x. x"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["action"]["kind"], "IOQ");
}

#[test]
fn settings_file_and_seed_variable() {
    let dir = std::env::temp_dir().join(format!("ogspi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("settings.conf");
    std::fs::write(&file, "# defaults\ndepth = 2\ncount = 3\nseed = 9\n").unwrap();
    let f = file.to_str().unwrap();

    let o = ogspi(&["--config-file", f, "check", "--suite", "wb-filter", "--count", "2"]);
    assert_eq!(code(&o), 0);
    let head = stdout(&o).lines().next().unwrap().to_string();
    assert_eq!(head, "suite wb-filter seed=9 count=2 size=6 depth=2 fuel=64");

    let o = Command::new(env!("CARGO_BIN_EXE_ogspi"))
        .args(["check", "--suite", "wb-filter", "--count", "2"])
        .env("OGSPI_SEED", "5")
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("suite wb-filter seed=5 "));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_stable() {
    let args = ["check", "--suite", "tensor-interleave", "--count", "6", "--format", "json", "--jobs", "3"];
    let a = ogspi(&args);
    let b = ogspi(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

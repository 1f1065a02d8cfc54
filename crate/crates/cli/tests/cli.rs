use std::process::{Command, Output};

use serde_json::Value;

fn quadvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadvar")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(quadvar(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(quadvar(&["search", "--k", "5"]).status.code(), Some(2));
}

#[test]
fn verify_small_table() {
    let out = quadvar(&["verify-tables", "--q", "9", "--k", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"][0]["matched"], 2);
    assert_eq!(r["field"]["modulus"], serde_json::json!([2, 2, 1]));
}

#[test]
fn classify_nrc_file() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("nrc_5_11.pts");
    let out = quadvar(&["construct", "nrc", "--q", "11", "--k", "5", "--points-out", pts.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&quadvar(&["classify", "--points", pts.to_str().unwrap()]));
    assert_eq!(r["result"]["classification"]["verdict"], "arc");
    let code = &r["result"]["code"];
    assert_eq!((code["n"].as_u64(), code["k"].as_u64(), code["d"].as_u64()), (Some(12), Some(5), Some(8)));
    assert_eq!(code["mds_class"], "MDS");
}

#[test]
fn forms_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let forms = dir.path().join("g.forms");
    let pts = dir.path().join("g.pts");
    let out = quadvar(&[
        "construct", "glynn", "--q", "9", "--d", "z^1",
        "--forms-out", forms.to_str().unwrap(), "--points-out", pts.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&quadvar(&["variety", "--forms", forms.to_str().unwrap(), "--method", "naive"]));
    assert_eq!(v["result"]["size"], 11);
    let c = report(&quadvar(&[
        "project-check", "--points", pts.to_str().unwrap(), "--forms", forms.to_str().unwrap(), "--mode", "conjecture",
    ]));
    assert_eq!(c["result"]["all_pass"], false);
    assert_eq!(c["result"]["cubic_all_pass"], true);
}

#[test]
fn budget_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let forms = dir.path().join("n.forms");
    quadvar(&["construct", "nrc", "--q", "11", "--k", "5", "--forms-out", forms.to_str().unwrap()]);
    let out = Command::new(env!("CARGO_BIN_EXE_quadvar"))
        .args(["variety", "--forms", forms.to_str().unwrap(), "--method", "naive"])
        .env("QUADVAR_ENUM_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str| {
        let csv = dir.path().join("rows.csv");
        let out = quadvar(&["--jobs", jobs, "search", "--k", "5", "--q", "11", "--out", csv.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        (out.stdout, std::fs::read(csv).unwrap())
    };
    let (j1, c1) = run("1");
    let (j4, c4) = run("4");
    assert_eq!(c1, c4);
    let strip = |b: Vec<u8>| String::from_utf8(b).unwrap().replace("\"1\"", "\"N\"").replace("\"4\"", "\"N\"");
    assert_eq!(strip(j1), strip(j4));
    let text = String::from_utf8(c1).unwrap();
    assert_eq!(text, "q,a_exp,b_exp,a'_exp,b'_exp,dimU,sizeV,verdict,conjecture\n11,3,4,3,4,6,12,arc,pass\n");
}

use std::process::{Command, Output};

use serde_json::Value;

fn kzdk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kzdk")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn pentagon_example_passes() {
    let out = kzdk(&[
        "verify", "--axiom", "pentagon", "--modules", "T:0.37,0", "T:0.21,0.5", "T:-0.13,1", "A:0", "--kappa", "1", "--order", "40",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schemaVersion"], 1);
    assert!(r["checks"][0]["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn projective_square() {
    let out = kzdk(&["decompose", "--modules", "P:0", "P:0", "--emit-matrices"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let total: u64 = r["data"]["summands"].as_array().unwrap().iter().map(|s| s["multiplicity"].as_u64().unwrap()).sum();
    assert_eq!(total, 4);
    assert_eq!(r["matrices"]["changeOfBasis"]["rows"], 16);
}

#[test]
fn dk_compare_typical_pair() {
    let out = kzdk(&["dk-compare", "--modules", "T:0.3,0.1", "T:0.25,-0.4", "--kappa", "1.7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["passed"], true);
}

#[test]
fn reports_are_reproducible() {
    let args = ["verify", "--modules", "T:0.3,0", "P:0", "A:0", "--samples", "2", "--seed", "5"];
    assert_eq!(kzdk(&args).stdout, kzdk(&args).stdout);
}

#[test]
fn parse_error_exits_2() {
    assert_eq!(kzdk(&["decompose", "--modules", "T:0.3", "P:0"]).status.code(), Some(2));
    assert_eq!(kzdk(&["braiding", "--modules", "T:0.3,0", "P:0", "--kappa", "1+"]).status.code(), Some(2));
}

#[test]
fn excluded_parameters_exit_3() {
    let out = kzdk(&["decompose", "--modules", "T:0.5,0", "T:0.5,0", "--kappa", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(report(&out)["error"].as_str().unwrap().contains("excluded"));
}

#[test]
fn quoted_antipode_fails_on_typical() {
    let out = kzdk(&["qverify", "--modules", "T:0.3,0.2", "--kappa", "1.3"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let failing: Vec<&str> =
        r["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).map(|c| c["label"].as_str().unwrap()).collect();
    assert_eq!(failing, ["antipode (quoted)"]);
}

#[test]
fn correlator_consistent_form() {
    let out = kzdk(&[
        "correlator", "--modules", "P:0", "P:0", "P:1", "--form", "ppp1", "--transcription", "consistent", "--constants", "1", "2-0.5i",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["data"]["invariantBasis"]["dimension"], 16);
}

#[test]
fn monodromy_matches_double_braiding() {
    let out = kzdk(&["monodromy", "--modules", "T:0.3,0", "T:0.2,0", "P:0", "--kappa", "1.1"]);
    assert_eq!(out.status.code(), Some(0));
}

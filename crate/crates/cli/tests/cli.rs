use std::process::{Command, Output};

use serde_json::Value;
use zc_core::perm::Permutation;

fn zc(args: &[&str]) -> Output {
    zc_env(args, None)
}

fn zc_env(args: &[&str], budget: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zc"));
    cmd.args(args).env_remove("ZC_NODE_BUDGET");
    if let Some(b) = budget {
        cmd.env("ZC_NODE_BUDGET", b);
    }
    cmd.output().expect("zc runs")
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn affine_cover_classifies_solvable() {
    let r = json(&zc(&["cover", "classify", "--degree", "5", "--tuple", "(0 1 2 3 4);(1 2 4 3);(0 4 1 2)"]));
    assert_eq!(r["solvable"], true);
    assert_eq!(r["ps"], true);
    assert_eq!(r["branch_multiplicities"], serde_json::json!([4, 3, 3]));
    assert_eq!(r["zariski_bound"], "2/1");
    assert_eq!(r["prime_power"], serde_json::json!([5, 1]));
}

#[test]
fn tuple_without_trivial_product_is_rejected() {
    // (0 4 2 1 3) is not the inverse of the first two entries' product
    let o = zc(&["cover", "classify", "--degree", "5", "--tuple", "(0 1 2 3 4);(1 2 4 3);(0 4 2 1 3)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(!stderr(&o).is_empty());
}

#[test]
fn s3_census() {
    let c = json(&zc(&[
        "hurwitz",
        "enumerate",
        "--degree",
        "3",
        "--points",
        "4",
        "--cycle-types",
        "2,1|2,1|2,1|2,1",
        "--require-transitive",
        "--up-to-conj",
    ]));
    assert_eq!(c["class_count"], 4);
    assert_eq!(c["tuple_count"], 24);
    assert_eq!(c["hurwitz_dim"], 4);
    assert_eq!(c["image_dim"], 1);
}

#[test]
fn quadric_report() {
    let r = json(&zc(&["surface", "report", "--a", "2", "--b", "5"]));
    assert_eq!(r["gonality"], 5);
    assert_eq!(r["classification"], "PositiveCodim");
    assert_eq!(r["genus"], 16);
}

#[test]
fn group_report_round_trips_permutations() {
    let r = json(&zc(&["group", "classify", "--degree", "4", "--gens", "(0 1);(0 1 2 3)"]));
    assert_eq!(r["order"], 24);
    assert_eq!(r["primitive"], true);
    assert_eq!(r["solvable"], true);
    assert_eq!(r["max_fixed_points"], 2);
    let mut printed: Vec<String> = r["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    for m in r["minimal_normal"].as_array().unwrap() {
        printed.extend(m["generators"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()));
    }
    assert!(!printed.is_empty());
    for s in printed {
        let p = Permutation::parse(&s, 4).unwrap();
        assert_eq!(p.to_string(), s);
    }
}

#[test]
fn streamed_tuples_round_trip() {
    let o = zc(&["hurwitz", "enumerate", "--degree", "4", "--points", "3", "--up-to-conj", "--stream"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().take_while(|l| !l.starts_with('{')).collect();
    assert!(!lines.is_empty());
    for line in lines {
        let again: Vec<String> = line
            .split(';')
            .map(|s| Permutation::parse(s, 4).unwrap().to_string())
            .collect();
        assert_eq!(again.join(";"), line);
    }
}

#[test]
fn canonical_form_subcommand() {
    let a = zc(&["hurwitz", "canonical", "--degree", "3", "--tuple", "(0 1);(0 2);(1 2);(0 2)"]);
    let b = zc(&["hurwitz", "canonical", "--degree", "3", "--tuple", "(1 2);(0 1);(0 2);(0 1)"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tsv_headers() {
    let k3 = zc(&["moduli", "k3", "--table", "--gmin", "7", "--gmax", "12"]);
    let text = String::from_utf8(k3.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(zc_cli::K3_TABLE_HEADER));
    assert_eq!(lines.clone().count(), 6);
    assert!(lines.any(|l| l == "10\t29\t26\t12\t12"));

    let s = zc(&["surface", "report", "--a", "3", "--table", "--bmax", "5"]);
    let text = String::from_utf8(s.stdout).unwrap();
    assert_eq!(text.lines().next(), Some(zc_cli::SURFACE_TABLE_HEADER));
    assert_eq!(text.lines().count(), 4);
    assert_eq!(zc(&["surface", "table", "--a", "3", "--bmax", "5"]).stdout, text.as_bytes());
}

#[test]
fn moduli_subcommands() {
    let bn = json(&zc(&["moduli", "bn", "--g", "7", "--r", "1", "--d", "4"]));
    assert_eq!(bn["brill_noether"], -1);
    let gonal = json(&zc(&["moduli", "gonal", "--g", "10", "--k", "3"]));
    assert_eq!(gonal["dim"], 2 * 10 + 2 * 3 - 5);
    let ps = json(&zc(&["moduli", "ps-bound", "--g", "20"]));
    assert_eq!(ps["bound"], 24);
    let k3 = json(&zc(&["moduli", "k3", "--g", "11"]));
    assert_eq!(k3["codim_bound"], 15);
    assert_eq!(k3["stated_bound"], serde_json::json!([7, 15]));
}

#[test]
fn invalid_input_exits_one_and_names_the_flag() {
    let cases: [&[&str]; 6] = [
        &["group", "classify", "--degree", "17", "--gens", "(0 1)"],
        &["group", "classify", "--degree", "4", "--gens", "(0 4)"],
        &["hurwitz", "enumerate", "--degree", "4", "--points", "3", "--frobnicate"],
        &["hurwitz", "enumerate", "--degree", "4", "--points", "3", "--cycle-types", "2,1|3"],
        &["surface", "report", "--a", "4", "--b", "5"],
        &["moduli", "k3", "--table", "--gmin", "9", "--gmax", "3"],
    ];
    for args in cases {
        let o = zc(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!stderr(&o).is_empty(), "{args:?}");
    }
    assert!(stderr(&zc(cases[0])).contains("--degree"));
    assert!(stderr(&zc(cases[2])).contains("--frobnicate"));
}

#[test]
fn node_budget_from_environment() {
    let args = ["hurwitz", "enumerate", "--degree", "5", "--points", "3"];
    let o = zc_env(&args, Some("1000"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1000"), "{}", stderr(&o));
    assert_eq!(zc_env(&args, Some("lots")).status.code(), Some(1));
    assert_eq!(zc_env(&args, None).status.code(), Some(0));
}

#[test]
fn element_cap_exceeded_exits_two() {
    let o = zc(&["group", "classify", "--degree", "6", "--gens", "(0 1);(0 1 2 3 4 5)", "--cap", "100"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(zc(&["--help"]).status.code(), Some(0));
    assert_eq!(zc(&["--version"]).status.code(), Some(0));
    assert_eq!(zc(&[]).status.code(), Some(1));
}

#[test]
fn output_is_stable_across_runs() {
    let args = ["hurwitz", "enumerate", "--degree", "4", "--points", "4", "--up-to-conj", "--stream", "--jobs", "3"];
    assert_eq!(zc(&args).stdout, zc(&args).stdout);
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spnorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn pipeline_certificate_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let out = spnorm(&["pipeline", "--n", "3", "--mod", "210", "--k", "2", "--seed", "7", "--out", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let doc = read_json(&cert);
    assert_eq!(doc["schema_version"], 1);
    let report = &doc["budget_report"];
    assert!(report["actual_length"].as_u64().unwrap() <= report["bound"].as_u64().unwrap());
    assert_eq!(doc["generators"].as_array().unwrap().len(), 2);

    let v = spnorm(&["verify", cert.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout_json(&v)["status"], "ok");
}

#[test]
fn tampered_certificate_fails_with_record() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let out = spnorm(&["certify", "--n", "3", "--mod", "30", "--seed", "3", "--out", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let mut doc = read_json(&cert);
    let budget = doc["letters"].as_array().unwrap().len() - 1;
    doc["budget"] = budget.into();
    let short = dir.path().join("short.json");
    std::fs::write(&short, doc.to_string()).unwrap();
    let v = spnorm(&["verify", short.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
    assert_eq!(stdout_json(&v)["status"], "failure");

    let mut doc = read_json(&cert);
    doc["letters"].as_array_mut().unwrap().pop();
    let cut = dir.path().join("cut.json");
    std::fs::write(&cut, doc.to_string()).unwrap();
    assert_eq!(spnorm(&["verify", cut.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn usage_errors_are_reported_together() {
    let out = spnorm(&["pipeline", "--n", "2", "--mod", "zz", "--k", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--n"), "{err}");
    assert!(err.contains("--mod"), "{err}");
    assert!(err.contains("--k"), "{err}");

    assert_eq!(spnorm(&["diameter", "--group", "gl2f2"]).status.code(), Some(2));
    assert_eq!(spnorm(&["lower-bound", "--root", "e1-e2"]).status.code(), Some(2));
}

#[test]
fn non_generating_set_is_a_verification_failure() {
    let dir = tempfile::tempdir().unwrap();
    // a lone root element with parameter 4 is trivial modulo 2
    let set = dir.path().join("set.json");
    let lb = spnorm(&["lower-bound", "--n", "3", "--mod", "6", "--k", "1"]);
    assert_eq!(lb.status.code(), Some(0));
    let mut gens = stdout_json(&lb)["certificate"]["set"].clone();
    let doubled = spnorm(&["lower-bound", "--n", "3", "--mod", "6", "--k", "2"]);
    let other = stdout_json(&doubled)["certificate"]["set"][1].clone();
    gens.as_array_mut().unwrap()[0] = other;
    std::fs::write(&set, gens.to_string()).unwrap();
    let out = spnorm(&["pipeline", "--n", "3", "--mod", "6", "--set", set.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["check"], "normal_generation");
}

#[test]
fn diameter_of_sp4_f2_with_long_root_class() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("radii.csv");
    let out = spnorm(&["diameter", "--group", "sp4f2", "--set", "long-root", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = &stdout_json(&out)["report"];
    assert_eq!(report["group_order"], 720);
    // the long root class of Sp4(F2) ~ S6 is the 15 transpositions, and S6 has transposition diameter 5
    assert_eq!(report["generator_count"], 15);
    assert_eq!(report["diameter"], 5);
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 7);
    assert!(rows.lines().last().unwrap().ends_with(",5,720"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = spnorm(&["pipeline", "--n", "3", "--mod", "30", "--k", "1", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let first = spnorm(&["decompose", "--n", "4", "--mod", "210", "--seed", "5"]);
    let second = spnorm(&["decompose", "--n", "4", "--mod", "210", "--seed", "5"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn level_ideal_and_hessenberg_subcommands() {
    let out = spnorm(&["level-ideal", "--n", "3", "--mod", "210", "--seed", "2", "--split"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["budget"], 960);
    assert_eq!(doc["split"].as_array().unwrap().len(), 21);
    assert_eq!(doc["vanishing_within_pi"], true);

    let out = spnorm(&["hessenberg", "--n", "4", "--mod", "Z", "--len", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["results"].as_array().unwrap().len(), 2);
}

#[test]
fn relations_and_report() {
    let out = spnorm(&["relations-check", "--n", "3", "--samples", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["stored_table_matches"], true);

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let out = spnorm(&["report", "--n", "3", "--mod", "30", "--targets", "2", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 3);
}

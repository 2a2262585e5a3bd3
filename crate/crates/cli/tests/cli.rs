use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_drinfeld")).args(args).output().expect("spawn");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let (code, out, err) = run(&all);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    serde_json::from_str(&out).expect("json output")
}

#[test]
fn gamma_t_is_congruence() {
    let v = json(&["subgroup", "congruence", "--spec", &fixture("gamma_t.json")]);
    assert_eq!(v, serde_json::json!({"congruence": true}));
}

#[test]
fn gamma_t_invariants() {
    let spec = fixture("gamma_t.json");
    let v = json(&["subgroup", "ql", "--spec", &spec]);
    assert_eq!(v["level"], "01");
    let v = json(&["subgroup", "index", "--spec", &spec]);
    assert_eq!(v["index"], 6);
    assert_eq!(v["normal"], true);
}

#[test]
fn index_two_verdict_cites_the_q_squared_filter() {
    let v = json(&["genuine", "verdict", "--spec", &fixture("index2_q2.json")]);
    assert_eq!(v["outcome"], "NotGenuine");
    assert_eq!(v["citation"], "sl-normal-index-divisible-by-q-squared");
    assert!(v["provenance"].as_array().unwrap().iter().any(|r| r["fired"] == true));
}

#[test]
fn derived_oracle_over_t_squared() {
    let v = json(&["oracle", "derived", "--group", "sl2", "--modulus", "t^2", "--q", "2"]);
    assert_eq!(v["derived_order"], 12);
    let v = json(&["oracle", "enumerate", "--group", "sl2", "--modulus", "t^2", "--q", "2"]);
    assert_eq!(v["order"], 48);
}

#[test]
fn closure_of_elementary_generators_is_sl2_f3() {
    let gens = r#"[["1","1","0","1"],["1","0","1","1"]]"#;
    let v = json(&["oracle", "closure", "--modulus", "t", "--q", "3", "--gens", gens]);
    assert_eq!(v["order"], 24);
}

#[test]
fn witness_moves_onto_a_congruence_subgroup() {
    let v = json(&[
        "auto",
        "apply",
        "--auto",
        &fixture("witness.json"),
        "--spec",
        &fixture("noncongruence_t3.json"),
    ]);
    assert_eq!(v["index"], 4);
    let dir = std::env::temp_dir().join(format!("drinfeld-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let moved = dir.join("moved.json");
    std::fs::write(&moved, v["subgroup"].to_string()).unwrap();
    let c = json(&["subgroup", "congruence", "--spec", moved.to_str().unwrap()]);
    assert_eq!(c["congruence"], true);
    let c = json(&["subgroup", "congruence", "--spec", &fixture("noncongruence_t3.json")]);
    assert_eq!(c["congruence"], false);
}

#[test]
fn ring_shift_moves_the_conductor() {
    let v = json(&[
        "auto",
        "apply",
        "--auto",
        &fixture("ring_shift.json"),
        "--spec",
        &fixture("noncongruence_t3.json"),
    ]);
    assert_eq!(v["quasi_level"]["conductor"], "1111");
}

#[test]
fn new_round_trips_through_ql() {
    let (code, out, _) =
        run(&["subgroup", "new", "--kind", "abelian-quasi-level", "--q", "3", "--modulus", "t^2", "--basis", "1"]);
    assert_eq!(code, 0);
    let dir = std::env::temp_dir().join(format!("drinfeld-cli-new-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("w.json");
    std::fs::write(&p, out).unwrap();
    let v = json(&["subgroup", "ql", "--spec", p.to_str().unwrap()]);
    assert_eq!(v["quasi_level"]["basis"], serde_json::json!(["1"]));
    assert_eq!(v["quasi_level"]["conductor"], "001");
}

#[test]
fn facts_lookup() {
    assert_eq!(json(&["facts", "get", "m_sl2", "--q", "9"])["value"], 6);
    let v = json(&["facts", "get", "rank_zero", "--g", "0", "--delta", "1", "--ambient", "g"]);
    assert_eq!(v["value"], true);
}

#[test]
fn scan_reports_index_two_and_nothing_genuine() {
    let v = json(&["genuine", "scan", "--q", "2", "--max-index", "2", "--conductor", "t^4"]);
    assert_eq!(v["min_normal_noncongruence"], 2);
    assert_eq!(v["min_normal_genuine_in_class"], Value::Null);
}

#[test]
fn tampered_spec_names_the_rule_and_exits_one() {
    let (code, _, err) = run(&["subgroup", "index", "--spec", &fixture("tampered.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("validation rule `overlap`"), "{err}");
}

#[test]
fn missing_file_and_unknown_fact_are_domain_errors() {
    assert_eq!(run(&["subgroup", "ql", "--spec", "/nonexistent/spec.json"]).0, 1);
    assert_eq!(run(&["facts", "get", "no_such_key"]).0, 1);
}

#[test]
fn cap_exhaustion_exits_two() {
    let (code, out, _) = run(&["--json", "oracle", "enumerate", "--modulus", "t^5", "--q", "3"]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["cap"], true);
}

#[test]
fn text_mode_prints_key_value_lines() {
    let (code, out, _) = run(&["subgroup", "congruence", "--spec", &fixture("gamma_t.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "congruence: true\n");
}

//! CLI outputs and shipped fixtures validate against the schemas in `schemas/`.

use std::path::PathBuf;
use std::process::Command;

use drinfeld_core::suite::{CriterionResult, RunConfig, Status, SuiteReport};
use jsonschema::{Resource, Validator};
use serde_json::{json, Value};

const BASE: &str = "https://drinfeld.example/schemas/";
const NAMES: [&str; 5] = ["homspec", "subgroup", "autospec", "verdict", "suite-report"];

fn repo_path(parts: &[&str]) -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.pop();
    p.pop();
    p.extend(parts);
    p
}

fn load(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn validator(name: &str) -> Validator {
    let mut opts = jsonschema::options();
    for n in NAMES {
        let file = format!("{n}.schema.json");
        opts = opts.with_resource(format!("{BASE}{file}"), Resource::from_contents(load(repo_path(&["schemas", &file]))).unwrap());
    }
    opts.build(&json!({"$ref": format!("{BASE}{name}.schema.json")})).unwrap()
}

fn fixture(name: &str) -> Value {
    load(repo_path(&["crates", "cli", "tests", "fixtures", name]))
}

fn fixture_path(name: &str) -> String {
    repo_path(&["crates", "cli", "tests", "fixtures", name]).to_string_lossy().into_owned()
}

fn cli_json(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_drinfeld")).arg("--json").args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}");
    serde_json::from_slice(&out.stdout).unwrap()
}

fn assert_valid(v: &Validator, x: &Value) {
    let errs: Vec<String> = v.iter_errors(x).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errs.is_empty(), "{errs:#?}");
}

#[test]
fn subgroup_fixtures_and_constructions() {
    let v = validator("subgroup");
    for f in ["gamma_t.json", "index2_q2.json", "noncongruence_t3.json"] {
        assert_valid(&v, &fixture(f));
    }
    assert_valid(&v, &json!({"construction": {"kind": "principal-congruence", "field": "3^1", "modulus": "001", "mode": "GL"}}));
    assert!(!v.is_valid(&json!({"construction": {"kind": "principal-congruence", "field": "3^1"}})));
    let core = cli_json(&["subgroup", "core", "--spec", &fixture_path("noncongruence_t3.json")]);
    assert_valid(&v, &core);
}

#[test]
fn homspec_part() {
    let v = validator("homspec");
    assert_valid(&v, &fixture("gamma_t.json")["homspec"]);
    let mut bad = fixture("gamma_t.json")["homspec"].clone();
    bad["mode"] = json!("PSL");
    assert!(!v.is_valid(&bad));
}

#[test]
fn autospec_fixtures() {
    let v = validator("autospec");
    assert_valid(&v, &fixture("witness.json"));
    assert_valid(&v, &fixture("ring_shift.json"));
    assert!(!v.is_valid(&json!({"field": "2^1", "prims": [{"kind": "ring", "a": "1"}]})));
}

#[test]
fn verdict_outputs() {
    let v = validator("verdict");
    for f in ["gamma_t.json", "index2_q2.json", "noncongruence_t3.json"] {
        assert_valid(&v, &cli_json(&["genuine", "verdict", "--spec", &fixture_path(f)]));
    }
    assert!(!v.is_valid(&json!({"outcome": "NotGenuine", "provenance": []})));
}

#[test]
fn suite_report_shape() {
    let report = SuiteReport {
        seed: RunConfig::default().seed,
        caps: RunConfig::default().caps,
        results: vec![CriterionResult {
            id: 1,
            name: "order facts".into(),
            status: Status::Skipped,
            computed: "cap".into(),
            expected: "6".into(),
        }],
    };
    assert_valid(&validator("suite-report"), &serde_json::to_value(&report).unwrap());
}

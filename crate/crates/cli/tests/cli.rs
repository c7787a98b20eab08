use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn flagtype(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flagtype")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("flagtype-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn classify_prints_verdict_and_label() {
    let o = flagtype(&["classify", "--n", "3", "--triple", "(2)|(2)|(2)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Infinite [O6 corollary]"), "{}", stdout(&o));

    let o = flagtype(&["classify", "--n", "7", "--triple", "(7)|(4)|(1,1,1,4)"]);
    assert!(stdout(&o).starts_with("Finite [III-4]"), "{}", stdout(&o));

    let o = flagtype(&["classify", "--n", "5", "--triple", "(1,4)|(2,3)|(5)", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "Finite");
}

#[test]
fn classify_substitutes_the_rank() {
    let a = stdout(&flagtype(&["classify", "--n", "6", "--triple", "(1,n-1)|(n)|(2)"]));
    let b = stdout(&flagtype(&["classify", "--n", "6", "--triple", "(1,5)|(6)|(2)"]));
    assert_eq!(a, b);
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(flagtype(&["classify", "--n", "3", "--triple", "(2|(2)"]).status.code(), Some(2));
    assert_eq!(flagtype(&["classify", "--n", "3", "--triple", "(4)|(1)|(1)"]).status.code(), Some(2));
    assert_eq!(flagtype(&["classify", "--n", "3", "--triple", "(1)|(1)|(1)", "--square-classes", "maybe"]).status.code(), Some(2));
    assert_eq!(flagtype(&["census", "--n", "2", "--q", "4", "--space", "(1)"]).status.code(), Some(2));
    assert_eq!(flagtype(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(flagtype(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn batch_classification_reads_csv() {
    let dir = scratch("batch");
    let path = dir.join("batch.csv");
    fs::write(&path, "n,triple,square_classes\n3,(2)|(2)|(2),\n5,\"(1,4)|(2,3)|(5)\",finite\n").unwrap();
    let o = flagtype(&["classify", "--batch", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let verdicts: Vec<&str> = s.lines().filter(|l| !l.starts_with(' ')).collect();
    assert_eq!(verdicts.len(), 2);
    assert!(verdicts[0].starts_with("Infinite"));
    assert!(verdicts[1].starts_with("Finite"));
}

#[test]
fn invariants_of_explicit_triple() {
    let o = flagtype(&["invariants", "--n", "2", "--q", "3", "--up", "1,0,0,0", "--um", "0,0,0,1", "--v", "1,0,0,0;0,1,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["violated_relations"].as_array().unwrap().len(), 0);
    assert_eq!(v["b"].as_array().unwrap().len(), 15);
}

#[test]
fn canonical_form_roundtrips() {
    let o = flagtype(&["canonical", "--n", "2", "--q", "5", "--theta", "0,1,1,0", "--b", "0,0,1,1,0,0,0,0,0,0,0,0,0,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["roundtrip"], true);
    let bad = flagtype(&["canonical", "--n", "2", "--q", "5", "--theta", "0,1,1,0", "--b", "1,0,1,1,0,0,0,0,0,0,0,0,0,0,0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn normalize_reaches_standard_pair() {
    let o = flagtype(&["normalize", "--n", "2", "--q", "3", "--up", "1,1,0,0", "--um", "0,0,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verified"], true);
}

#[test]
fn witness_separation_and_infeasibility() {
    let o = flagtype(&["witness", "--family", "O4_L31_0", "--q", "5", "--lambda", "2", "--mu", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "distinct");

    let o = flagtype(&["witness", "--family", "O8_L32_i", "--q", "3", "--lambda", "1", "--mu", "2"]);
    assert_eq!(o.status.code(), Some(3));

    let o = flagtype(&["witness", "--family", "O6_L322_sq", "--q", "5", "--lambda", "1", "--certificate", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["target"], 4);
}

#[test]
fn census_is_deterministic_and_stored() {
    let dir = scratch("census");
    let args = ["census", "--n", "2", "--q", "3,5", "--space", "(n)|(1)|(1,1)", "--store", dir.to_str().unwrap()];
    let a = flagtype(&args);
    let b = flagtype(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    let rows: Vec<&str> = s.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].contains(",20,") && rows[2].contains(",20,"), "{s}");
    let stored = fs::read_dir(&dir).unwrap().count();
    assert_eq!(stored, 1);
}

#[test]
fn fix_first_matches_full_census() {
    let full = stdout(&flagtype(&["census", "--n", "2", "--q", "3", "--space", "(1)|(1,1)|(2)"]));
    let fixed = stdout(&flagtype(&["census", "--n", "2", "--q", "3", "--space", "(1)|(1,1)|(2)", "--fix-first"]));
    let count = |s: &str| s.lines().nth(1).unwrap().rsplit(',').nth(1).unwrap().to_string();
    assert_eq!(count(&full), count(&fixed));
}

#[test]
fn verify_suites_pass_and_report_aggregates() {
    let dir = scratch("verify");
    let store = dir.to_str().unwrap();
    for (suite, n) in [("prop58", "3"), ("roundtrip", "2"), ("rv-generators", "2"), ("bruhat", "2"), ("censuses", "2"), ("cor87", "2")] {
        let o = flagtype(&["verify", "--suite", suite, "--n", n, "--trials", "50", "--store", store]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stdout(&o));
    }
    let o = flagtype(&["verify", "--suite", "witnesses", "--n", "2", "--family", "O4_L31_1", "--store", store]);
    assert_eq!(o.status.code(), Some(0));
    let o = flagtype(&["report", "--store", store]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.contains("| pass |")).count(), 7, "{s}");
    let o = flagtype(&["report", "--store", store, "--format", "csv"]);
    assert!(stdout(&o).starts_with("kind,name,status,detail"));
}

#[test]
fn verify_outside_feasibility_exits_3() {
    let o = flagtype(&["verify", "--suite", "witnesses", "--n", "4", "--q", "3", "--family", "O8_L32_i"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn report_on_empty_store_exits_2() {
    let dir = scratch("empty");
    assert_eq!(flagtype(&["report", "--store", dir.to_str().unwrap()]).status.code(), Some(2));
}

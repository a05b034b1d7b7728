use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    root().join("fixtures").join(name)
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read_to_string(path).unwrap()
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recipe-plan")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn compiled(dir: &TempDir) -> PathBuf {
    let db = dir.path().join("db.json");
    let o = bin(&[
        "produce",
        "--kb",
        fixture("dahl_kb.json").to_str().unwrap(),
        "--out",
        db.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    db
}

fn query(verb: &str, dish: &str, db: &Path, supplies: &Path, extra: &[&str]) -> Output {
    let mut args = vec![verb, dish, "--db", db.to_str().unwrap(), "--supplies", supplies.to_str().unwrap()];
    args.extend_from_slice(extra);
    bin(&args)
}

#[test]
fn produce_writes_the_expected_database() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    assert_eq!(fs::read_to_string(db).unwrap(), golden("dahl_db.json"));
}

#[test]
fn plan_matches_golden() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    let o = query("plan", "vegetable dahl", &db, &fixture("dahl_supplies.txt"), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("dahl_plan.txt"));
    assert!(!stdout(&o).contains('\r'));
}

#[test]
fn gerund_plan_matches_golden() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    let o = query("plan", "vegetable dahl", &db, &fixture("dahl_supplies.txt"), &["--gerund"]);
    assert_eq!(stdout(&o), golden("dahl_plan_gerund.txt"));
}

#[test]
fn dish_name_is_normalized() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    let o = query("plan", "  Vegetable   DAHL ", &db, &fixture("dahl_supplies.txt"), &[]);
    assert_eq!(stdout(&o), golden("dahl_plan.txt"));
}

#[test]
fn orders_lists_forty() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    let o = query("orders", "vegetable dahl", &db, &fixture("dahl_supplies.txt"), &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text, golden("dahl_orders.txt"));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("orders: 40"));
    let totals: Vec<u64> = text.lines().skip(4).map(|l| l.parse().unwrap()).collect();
    assert_eq!(totals.len(), 40);
    assert_eq!(totals.first(), Some(&3180));
    assert_eq!(totals.last(), Some(&3840));
    assert!(totals.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn verify_agrees_on_dahl() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    let o = query("verify", "vegetable dahl", &db, &fixture("dahl_supplies.txt"), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("optimizer makespan: 3180"));
    assert!(text.contains("oracle makespan: 3180"));
    assert!(text.ends_with("agrees: yes\n"));
}

#[test]
fn missing_lentils_exit_two() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    for verb in ["plan", "orders", "verify"] {
        let o = query(verb, "vegetable dahl", &db, &fixture("dahl_supplies_no_lentils.txt"), &[]);
        assert_eq!(o.status.code(), Some(2), "{verb}");
        assert_eq!(stdout(&o), "Insufficient ingredients, you need:\nlentils\n");
    }
}

#[test]
fn unknown_dish_exit_two() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    let o = query("orders", "beef wellington", &db, &fixture("dahl_supplies.txt"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("beef wellington"));
}

#[test]
fn dish_already_in_supplies() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    let o = query("plan", "lentils", &db, &fixture("dahl_supplies.txt"), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "lentils\nTime: 0 secs\nIngredients\nlentils\nInstructions\nPassive times:\n"
    );
    let o = query("orders", "lentils", &db, &fixture("dahl_supplies.txt"), &[]);
    assert!(stdout(&o).starts_with("orders: 1\n"));
}

#[test]
fn single_process_dish_has_one_order() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    let o = query("orders", "chopped carrot", &db, &fixture("dahl_supplies.txt"), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("orders: 1\nmin makespan: 120 (2 min)\n"));
}

#[test]
fn order_limit_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    let o = query("plan", "vegetable dahl", &db, &fixture("dahl_supplies.txt"), &["--limit", "39"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("39"));
    let o = query("plan", "vegetable dahl", &db, &fixture("dahl_supplies.txt"), &["--limit", "40"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn seeded_plans_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let db = compiled(&dir);
    let run = || stdout(&query("plan", "vegetable dahl", &db, &fixture("dahl_supplies.txt"), &["--seed", "7"]));
    assert_eq!(run(), run());
}

#[test]
fn empty_knowledge_base_compiles() {
    let dir = TempDir::new().unwrap();
    let kb = dir.path().join("kb.json");
    let db = dir.path().join("db.json");
    fs::write(&kb, r#"{ "format": 1 }"#).unwrap();
    let o = bin(&["produce", "--kb", kb.to_str().unwrap(), "--out", db.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "strings: 0\nprocesses: 0\n");
    assert_eq!(
        fs::read_to_string(&db).unwrap(),
        "{\n  \"format\": 1,\n  \"can_make\": [],\n  \"skills\": []\n}\n"
    );
}

#[test]
fn self_defining_synonym_is_rejected() {
    let dir = TempDir::new().unwrap();
    let kb = dir.path().join("kb.json");
    fs::write(
        &kb,
        r#"{
  "format": 1,
  "synonyms": [
    { "name": "stock", "definition": ["stock", "water"] }
  ]
}"#,
    )
    .unwrap();
    let db = dir.path().join("db.json");
    let o = bin(&["produce", "--kb", kb.to_str().unwrap(), "--out", db.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("stock"), "{}", stderr(&o));
    assert!(!db.exists());
}

#[test]
fn unknown_key_and_bad_version_are_rejected() {
    let dir = TempDir::new().unwrap();
    let kb = dir.path().join("kb.json");
    let db = dir.path().join("db.json");
    for (text, needle) in [
        ("{ \"format\": 1,\n  \"colour\": \"red\" }", "line 2"),
        (r#"{ "format": 2 }"#, "format version 2"),
        ("{ \"format\": 1, ", "line 1"),
    ] {
        fs::write(&kb, text).unwrap();
        let o = bin(&["produce", "--kb", kb.to_str().unwrap(), "--out", db.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{text}");
        assert!(stderr(&o).contains(needle), "{}", stderr(&o));
    }
}

#[test]
fn missing_files_and_usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let nowhere = dir.path().join("nope.json");
    let o = query("plan", "x", &nowhere, &fixture("dahl_supplies.txt"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot read"));
    assert_eq!(bin(&["plan"]).status.code(), Some(1));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_refuses_oversized_instances() {
    let dir = TempDir::new().unwrap();
    let mut processes = Vec::new();
    for i in 0..8 {
        let input = if i == 0 { "\"flour\"".to_string() } else { format!("\"stage {}\"", i - 1) };
        processes.push(format!(
            r#"{{ "input": [{input}], "output": ["stage {i}"], "time": 10, "f_time": 0, "direction": "step {i}" }}"#
        ));
    }
    let kb = dir.path().join("kb.json");
    fs::write(&kb, format!(r#"{{ "format": 1, "processes": [{}] }}"#, processes.join(","))).unwrap();
    let db = dir.path().join("db.json");
    let supplies = dir.path().join("supplies.txt");
    fs::write(&supplies, "flour\n").unwrap();
    assert_eq!(
        bin(&["produce", "--kb", kb.to_str().unwrap(), "--out", db.to_str().unwrap()]).status.code(),
        Some(0)
    );
    let o = query("verify", "stage 7", &db, &supplies, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("8 processes"), "{}", stderr(&o));
    let o = query("verify", "stage 3", &db, &supplies, &[]);
    assert_eq!(o.status.code(), Some(0));
}

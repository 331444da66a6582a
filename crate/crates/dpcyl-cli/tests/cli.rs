use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn dpcyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpcyl")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn table_matches() {
    let out = dpcyl(&["table"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["all_matched"], true);
}

#[test]
fn cylinder_from_coordinates_and_verify() {
    let out = dpcyl(&["cylinder", "--surface", "3/4A1", "--H", "[1,1,-1/2]"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let bundle = json(&out);
    assert_eq!(bundle["certificate"]["lemma"], "4A1-cubic");
    assert_eq!(bundle["certificate"]["epsilon"], "1/4");

    let good = scratch("good.json");
    std::fs::write(&good, &out.stdout).unwrap();
    let out = dpcyl(&["verify", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["accepted"], true);

    // Negate one coefficient.
    let mut bad = bundle.clone();
    let c = bad["certificate"]["support"][0]["coeff"].as_str().unwrap().to_string();
    let neg = c.strip_prefix('-').map(str::to_string).unwrap_or(format!("-{c}"));
    bad["certificate"]["support"][0]["coeff"] = Value::from(neg);
    let path = scratch("bad.json");
    std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    let out = dpcyl(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["accepted"], false);
    assert_eq!(report["effective_ok"], false);
}

#[test]
fn cylinder_accepts_e_basis_input() {
    let k = "[3,-1,-1,-1,-1,-1,-1]";
    let a = dpcyl(&["cylinder", "--surface", "3/A3", "--H", k]);
    let b = dpcyl(&["cylinder", "--surface", "3/A3", "--H", "3e0-e1-e2-e3-e4-e5-e6"]);
    let c = dpcyl(&["cylinder", "--surface", "3/A3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn batch_is_reproducible() {
    let run = |seed: &str| dpcyl(&["batch", "--surface", "all", "--count", "2", "--seed", seed]);
    let (a, b) = (run("11"), run("11"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run("12").stdout);
    let v = json(&a);
    assert_eq!(v["failed"], 0);
    assert!(v["total"].as_u64().unwrap() > 50);
}

#[test]
fn out_flag_writes_the_file() {
    let path = scratch("curves.json");
    let out = dpcyl(&["curves", "--surface", "4/2A1/8lines", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["minus_one"].as_array().unwrap().len(), 8);
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(dpcyl(&["bogus"]).status.code(), Some(2));
    assert_eq!(dpcyl(&["classify", "--surface", "9/E9"]).status.code(), Some(2));
    assert_eq!(dpcyl(&["cylinder", "--surface", "3/A3", "--H", "[1,2]"]).status.code(), Some(2));
    // Zero is not ample.
    assert_eq!(dpcyl(&["cylinder", "--surface", "3/A3", "--H", "[0,0,0,0,0,0,0]"]).status.code(), Some(2));
    assert_eq!(dpcyl(&["verify", "/nonexistent.json"]).status.code(), Some(2));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const EXAMPLE_ONE: &str = "0,0,0,1,0,0,2,0,5,6,0,2,1,7,5,1,0,0,0,0";

fn genus4(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genus4"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn manifest(out: &Path, stem: &str) -> Value {
    let text = fs::read_to_string(out.join(format!("{stem}.manifest.json"))).expect("manifest written");
    serde_json::from_str(&text).expect("manifest is JSON")
}

#[test]
fn verify_quadrics_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = genus4(dir.path(), &["verify-quadrics"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for n in ["split: 81 points", "cone: 73 points", "nonsplit: 65 points"] {
        assert!(s.contains(n), "{s}");
    }
    assert_eq!(manifest(dir.path(), "verify-quadrics")["records"], 3);
}

#[test]
fn defect_audit_has_no_survivors() {
    let dir = tempfile::tempdir().unwrap();
    let o = genus4(dir.path(), &["defect", "--q", "8", "--g", "4", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("survivors: none"), "{}", stdout(&o));
    let o = genus4(dir.path(), &["defect", "--q", "8", "--g", "4", "--k", "2"]);
    let s = stdout(&o);
    assert!(s.contains("N2=45") && s.contains("N2=43"), "{s}");
}

#[test]
fn analyze_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = genus4(dir.path(), &["analyze", "--quadric", "split", "--cubic", EXAMPLE_ONE]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((r["n8"].as_u64(), r["n64"].as_u64()), (Some(27), Some(119)));
    assert_eq!(r["labels"][0], "(5,1)");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(genus4(dir.path(), &["bogus"]).status.code(), Some(2));
    assert_eq!(genus4(dir.path(), &["search", "--case", "red9"]).status.code(), Some(2));
    assert_eq!(genus4(dir.path(), &["search", "--case", "red2", "--range-end", "0o1000000000"]).status.code(), Some(2));
    assert_eq!(genus4(dir.path(), &["search", "--case", "red2", "--normalize-scaling"]).status.code(), Some(2));
    assert_eq!(genus4(dir.path(), &["analyze", "--quadric", "split", "--cubic", "1,2"]).status.code(), Some(2));
}

#[test]
fn empty_search_still_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = genus4(dir.path(), &["search", "--case", "red2", "--range-end", "64"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(dir.path().join("search-red2.jsonl")).unwrap(), "");
    let m = manifest(dir.path(), "search-red2");
    assert_eq!(m["records"], 0);
    assert_eq!(m["result"]["stats"]["scanned"], 64);
}

#[test]
fn digest_independent_of_workers() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["search", "--case", "red1a", "--range-end", "1048576"];
    assert_eq!(genus4(a.path(), &args).status.code(), Some(0));
    let mut one = args.to_vec();
    one.extend(["--workers", "1", "--batch", "200000"]);
    assert_eq!(genus4(b.path(), &one).status.code(), Some(0));
    let (ma, mb) = (manifest(a.path(), "search-red1a"), manifest(b.path(), "search-red1a"));
    assert!(ma["records"].as_u64().unwrap() > 0);
    assert_eq!(ma["digest"], mb["digest"]);
    assert_eq!(
        fs::read(a.path().join("search-red1a.jsonl")).unwrap(),
        fs::read(b.path().join("search-red1a.jsonl")).unwrap()
    );
}

#[test]
fn resumed_search_matches_uninterrupted() {
    let whole = tempfile::tempdir().unwrap();
    let part = tempfile::tempdir().unwrap();
    let args = ["search", "--case", "red1b", "--range-start", "0o1000000", "--range-end", "0o5000000", "--batch", "100000"];
    assert_eq!(genus4(whole.path(), &args).status.code(), Some(0));

    let ck = part.path().join("red1b.ck.json");
    let mut resumable = args.to_vec();
    resumable.extend(["--checkpoint", ck.to_str().unwrap()]);
    let mut first = resumable.clone();
    first.extend(["--max-batches", "3"]);
    let o = genus4(part.path(), &first);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("stopped at index"), "{}", stdout(&o));
    assert!(!part.path().join("search-red1b.manifest.json").exists());
    // A torn write after the checkpoint is dropped on resume.
    let certs = part.path().join("search-red1b.jsonl");
    let mut text = fs::read_to_string(&certs).unwrap();
    text.push_str("{\"partial\":\n");
    fs::write(&certs, text).unwrap();

    assert_eq!(genus4(part.path(), &resumable).status.code(), Some(0));
    let (a, b) = (manifest(whole.path(), "search-red1b"), manifest(part.path(), "search-red1b"));
    assert_eq!(a["digest"], b["digest"]);
    assert_eq!(a["result"], b["result"]);
    assert!(b["parameters"]["resumed_at"].as_u64().is_some());
    assert_eq!(fs::read(whole.path().join("search-red1b.jsonl")).unwrap(), fs::read(&certs).unwrap());
}

#[test]
fn mismatched_checkpoint_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.json");
    let ck = ck.to_str().unwrap();
    let first = ["search", "--case", "red2", "--range-end", "400000", "--batch", "100000", "--checkpoint", ck, "--max-batches", "1"];
    assert_eq!(genus4(dir.path(), &first).status.code(), Some(0));
    let other = ["search", "--case", "red2", "--range-end", "400000", "--target", "26", "--checkpoint", ck];
    assert_eq!(genus4(dir.path(), &other).status.code(), Some(1));
}

#[test]
fn classify_search_output() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(genus4(dir.path(), &["search", "--case", "red2"]).status.code(), Some(0));
    let certs = dir.path().join("search-red2.jsonl");
    let o = genus4(dir.path(), &["classify", "--certificates", certs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("120 certificates, 0 good, 0 anomalous"), "{}", stdout(&o));
    let o = genus4(dir.path(), &["analyze", "--certificates", certs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(manifest(dir.path(), "analyze")["records"], 120);
}

#[test]
fn tables_write_four_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = genus4(dir.path(), &["tables", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    for class in 1..=4 {
        let csv = fs::read_to_string(dir.path().join(format!("defect3-type{class}.csv"))).unwrap();
        assert!(csv.lines().count() > 1);
    }
    let t1 = fs::read_to_string(dir.path().join("defect3-type1.csv")).unwrap();
    assert!(t1.contains("11,2,1 -5 2,") && t1.contains("0.561"), "{t1}");
}

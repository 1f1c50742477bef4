use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn bertini(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bertini"))
        .args(args)
        .env("BERTINI_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn records(cache: &Path) -> Vec<PathBuf> {
    let mut v: Vec<_> = fs::read_dir(cache.join("runs")).map(|d| d.map(|e| e.unwrap().path()).collect()).unwrap_or_default();
    v.sort();
    v
}

#[test]
fn local_factor_prints_ratio() {
    let dir = TempDir::new().unwrap();
    let o = bertini(dir.path(), &["local-factor", "--q", "2", "--e", "1", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "21/32");
}

#[test]
fn local_factor_from_image_agrees() {
    let dir = TempDir::new().unwrap();
    let o = bertini(dir.path(), &["local-factor", "--q", "2", "--e", "1", "--n", "2", "--from-image"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.matches("11/16").count(), 2, "{out}");
    assert!(out.contains("EQUAL"));
}

#[test]
fn usage_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["local-factor", "--q", "2", "--e", "1", "--n", "0"][..],
        &["census", "--a", "-1", "--n", "2", "--d", "3", "--q", "2", "--exhaustive"],
        &["census", "--n", "2", "--d", "3", "--q", "2"],
        &["smooth-prob", "--n", "2", "--q", "6"],
        &[],
    ] {
        assert_eq!(bertini(dir.path(), args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn cap_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let o = bertini(dir.path(), &["census", "--n", "2", "--d", "40", "--q", "2", "--exhaustive"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn smooth_prob_values() {
    let dir = TempDir::new().unwrap();
    let exact = bertini(dir.path(), &["smooth-prob", "--n", "3", "--q", "2"]);
    assert_eq!(stdout(&exact).trim(), "63/256");
    let float = bertini(dir.path(), &["--float", "smooth-prob", "--n", "3", "--q", "2"]);
    assert_eq!(stdout(&float).trim(), "0.24609375");
    let zeta = bertini(dir.path(), &["smooth-prob", "--n", "1", "--q", "2", "--float"]);
    assert_eq!(stdout(&zeta).trim(), "0.375");

    let path = dir.path().join("n2.json");
    let n2 = bertini(dir.path(), &["smooth-prob", "--n", "2", "--q", "2", "--eps", "1e-9", "--record", path.to_str().unwrap()]);
    assert!(stdout(&n2).starts_with("0.2839863"), "{}", stdout(&n2));
    let rec: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(rec["payload"]["tail_bound"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn census_exhaustive_json_and_csv() {
    let dir = TempDir::new().unwrap();
    let o = bertini(dir.path(), &["census", "--n", "2", "--d", "4", "--q", "2", "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total"], 1 << 15);
    assert_eq!(v["smooth_ratio"], "9216/32767");

    let csv = bertini(dir.path(), &["census", "--n", "2", "--d", "3,4", "--q", "2", "--exhaustive", "--format", "csv"]);
    let lines: Vec<_> = stdout(&csv).lines().map(str::to_string).collect();
    assert_eq!(lines[0], "d,smooth_fraction,radius,sections");
    assert!(lines[1].starts_with("3,0.2725"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn census_results_are_cached_by_content_hash() {
    let dir = TempDir::new().unwrap();
    bertini(dir.path(), &["census", "--n", "2", "--d", "3", "--q", "2", "--exhaustive"]);
    let cached: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_file()).collect();
    assert_eq!(cached.len(), 1);
    assert_eq!(cached[0].file_stem().unwrap().len(), 64);
}

#[test]
fn threads_do_not_change_results() {
    let dir = TempDir::new().unwrap();
    let args = |t: &'static str| ["--threads", t, "--no-cache", "census", "--n", "2", "--d", "12", "--q", "2", "--samples", "3000", "--seed", "9"];
    let one = bertini(dir.path(), &args("1"));
    let four = bertini(dir.path(), &args("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn replay_reproduces_payloads() {
    let dir = TempDir::new().unwrap();
    bertini(dir.path(), &["census", "--n", "2", "--d", "20", "--q", "2", "--samples", "2000", "--seed", "4"]);
    bertini(dir.path(), &["census", "--n", "2", "--d", "3", "--q", "2", "--exhaustive"]);
    bertini(dir.path(), &["local-factor", "--q", "3", "--e", "1", "--n", "2", "--from-image"]);
    bertini(dir.path(), &["stab-rank", "--n", "1", "--q", "3", "--e", "1,1"]);
    let recs = records(dir.path());
    assert_eq!(recs.len(), 4);
    for r in &recs {
        let o = bertini(dir.path(), &["--replay", r.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", r.display());
        assert!(stdout(&o).contains("REPLAY MATCH"));
    }

    // a tampered payload is caught
    let mut rec: Value = serde_json::from_str(&fs::read_to_string(&recs[0]).unwrap()).unwrap();
    rec["payload"]["smooth"] = Value::from(rec["payload"]["smooth"].as_u64().unwrap() + 1);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, rec.to_string()).unwrap();
    let o = bertini(dir.path(), &["--replay", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("REPLAY MISMATCH"));
}

#[test]
fn verify_tables_passes_by_default() {
    let dir = TempDir::new().unwrap();
    let o = bertini(dir.path(), &["verify-tables"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("PASS").count(), 6, "{out}");
}

#[test]
fn verify_tables_reports_corrupted_fixture() {
    let dir = TempDir::new().unwrap();
    let fixture = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/tables.json")).unwrap();
    let bad = dir.path().join("tables.json");
    fs::write(&bad, fixture.replace("45/11", "46/11").replace("0.2839863", "0.2839873")).unwrap();
    let o = bertini(dir.path(), &["verify-tables", "--expected", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL average_points (2,d): expected 46/11, got 45/11"), "{out}");
    assert!(out.contains("FAIL smoothness (2,d): expected 0.2839873"), "{out}");
    assert_eq!(out.matches("PASS").count(), 4);
}

#[test]
fn verify_tables_at_other_q_is_informational() {
    let dir = TempDir::new().unwrap();
    let o = bertini(dir.path(), &["verify-tables", "--q", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.matches("INFO").count(), 6);
    assert!(out.contains("176/35"), "{out}");
}

#[test]
fn stab_rank_prints_window() {
    let dir = TempDir::new().unwrap();
    let o = bertini(dir.path(), &["stab-rank", "--n", "2", "--q", "2", "--e", "1,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("rank 18 (jet dimension 18) from d = 5, constant over the window d = 5..=14"), "{}", stdout(&o));
}

#[test]
fn anti_bertini_candidate_reverifies() {
    let dir = TempDir::new().unwrap();
    let o = bertini(dir.path(), &["anti-bertini", "--k", "3", "--budget", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("re-verified: true"));
}

fn python_validator() -> Option<()> {
    let ok = Command::new("python3").args(["-c", "import jsonschema"]).output().ok()?.status.success();
    ok.then_some(())
}

fn validate(schema: &Path, doc: &Path) -> bool {
    let script = "import json, sys, jsonschema\njsonschema.validate(json.load(open(sys.argv[2])), json.load(open(sys.argv[1])))";
    Command::new("python3").args(["-c", script]).arg(schema).arg(doc).stderr(Stdio::null()).status().unwrap().success()
}

#[test]
fn records_validate_against_schema() {
    if python_validator().is_none() {
        eprintln!("python3 with jsonschema not found; skipping");
        return;
    }
    let schema = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/run_record.schema.json"));
    let dir = TempDir::new().unwrap();
    for args in [
        &["local-factor", "--q", "2", "--e", "2", "--n", "1", "--from-image"][..],
        &["smooth-prob", "--n", "2", "--q", "3"],
        &["census", "--n", "2", "--d", "3,4", "--q", "2", "--exhaustive"],
        &["census", "--n", "3", "--d", "10", "--q", "3", "--samples", "500", "--seed", "1"],
        &["verify-tables"],
        &["stab-rank", "--n", "1", "--q", "2"],
        &["anti-bertini", "--k", "2", "--budget", "1", "--window"],
        &["anti-bertini", "--k", "2", "--budget", "4"],
    ] {
        bertini(dir.path(), args);
    }
    let recs = records(dir.path());
    assert_eq!(recs.len(), 8);
    for r in &recs {
        assert!(validate(schema, r), "{}", r.display());
    }

    // and the schema is not vacuous
    let mut rec: Value = serde_json::from_str(&fs::read_to_string(&recs[0]).unwrap()).unwrap();
    rec["version"] = Value::from("dev");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, rec.to_string()).unwrap();
    assert!(!validate(schema, &bad));
}

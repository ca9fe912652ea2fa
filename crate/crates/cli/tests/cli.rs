use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_midgraph"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn build_level_five_counts() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["build", "--n0", "2", "--level", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let b = json(&dir.path().join("build.json"));
    assert_eq!(b["levels"][5]["vcount"], 68);
    assert_eq!(b["levels"][5]["ecount"], 184);
    let csv = fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    assert!(csv.contains("5,68,184,68"));
    let side = json(&dir.path().join("cache/hierarchy_n0-2_n-5.json"));
    assert_eq!(side["format_version"], 1);
    assert_eq!(side["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn over_budget_level_exits_3() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["build", "--n0", "2", "--level", "8"]);
    assert_eq!(code(&o), 3);
    let o = run(dir.path(), &["build", "--level", "5", "--budget-vertices", "50"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn verify_small_level_exhaustive_passes() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["verify", "--n0", "2", "--level", "4", "--exhaustive"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let s = json(&dir.path().join("verify.json"));
    assert_eq!(s["passed"], true);
    for c in s["checks"].as_array().unwrap() {
        let status = c["status"].as_str().unwrap();
        assert!(["pass", "fail", "skipped-budget"].contains(&status));
        if c["gating"] == true {
            assert_eq!(status, "pass", "{c}");
        }
    }
}

#[test]
fn bad_arguments_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["build"])), 2);
    assert_eq!(code(&run(dir.path(), &["build", "--level", "x"])), 2);
    assert_eq!(code(&run(dir.path(), &["clique", "--level", "4", "--power", "2", "--mode", "sampled"])), 2);
    assert_eq!(code(&run(dir.path(), &["distances", "--level", "3", "--from", "{0,{0,1}}", "--to", "7"])), 2);
    assert_eq!(code(&run(dir.path(), &["separated", "--level", "4", "--power", "5"])), 2);
    assert_eq!(code(&run(dir.path(), &["bound", "--level", "4", "--epsilon", "1/8"])), 2);
    assert_eq!(code(&run(dir.path(), &["build", "--level", "3", "--n0", "0"])), 2);
}

#[test]
fn unwritable_output_exits_4() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("plain");
    fs::write(&file, "x").unwrap();
    assert_eq!(code(&run(&file, &["build", "--level", "3"])), 4);
}

#[test]
fn outputs_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["verify", "--level", "5", "--seed", "3"];
    assert_eq!(code(&run(a.path(), &args)), 0);
    assert_eq!(code(&run(b.path(), &args)), 0);
    let read = |d: &TempDir, f: &str| fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&a, "verify.json"), read(&b, "verify.json"));
    for args in [
        &["export", "--level", "4", "--format", "csv"][..],
        &["power", "--level", "5", "--k", "3"][..],
        &["separated", "--level", "5", "--power", "6"][..],
    ] {
        assert_eq!(code(&run(a.path(), args)), 0);
        assert_eq!(code(&run(b.path(), args)), 0);
    }
    for f in ["G4_vertices.csv", "G4_edges.csv", "G4_distances.csv", "G4_delta.csv", "manifest.json", "power.csv", "noncompactness.json", "separated.json"] {
        assert_eq!(read(&a, f), read(&b, f), "{f}");
    }
}

#[test]
fn export_dot_matches_build() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["export", "--level", "4", "--format", "dot"])), 0);
    let dot = fs::read_to_string(dir.path().join("G4.dot")).unwrap();
    assert!(dot.starts_with("graph G_4 {"));
    assert_eq!(dot.matches("[label=").count(), 12);
    assert_eq!(dot.matches(" -- ").count(), 16);
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["files"][0]["file"], "G4.dot");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("run.cfg");
    fs::write(&conf, "n0=3\nlevel=2\n").unwrap();
    let conf = conf.to_str().unwrap();
    assert_eq!(code(&run(dir.path(), &["build", "--config", conf])), 0);
    assert_eq!(json(&dir.path().join("build.json"))["levels"][2]["vcount"], 6);
    assert_eq!(code(&run(dir.path(), &["build", "--config", conf, "--level", "3"])), 0);
    assert_eq!(json(&dir.path().join("build.json"))["levels"][3]["vcount"], 18);
    let saved = fs::read_to_string(dir.path().join("run.conf")).unwrap();
    assert!(saved.contains("n0=3\nlevel=3\n"));
    fs::write(dir.path().join("bad.cfg"), "level=3\nspeed=9\n").unwrap();
    let bad = dir.path().join("bad.cfg");
    assert_eq!(code(&run(dir.path(), &["build", "--config", bad.to_str().unwrap()])), 2);
}

#[test]
fn corrupt_cache_is_rebuilt() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["build", "--level", "5"])), 0);
    let bin = dir.path().join("cache/hierarchy_n0-2_n-5.bin");
    let mut bytes = fs::read(&bin).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    fs::write(&bin, &bytes).unwrap();
    let o = run(dir.path(), &["distances", "--level", "5", "--from", "0", "--to", "1"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("content hash mismatch"));
    assert_eq!(json(&dir.path().join("distance.json"))["d"], 16);
}

#[test]
fn geodesic_and_clique_reports() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["geodesic", "--level", "6", "--from", "0", "--to", "1", "--depth", "2"]);
    assert_eq!(code(&o), 0);
    let g = json(&dir.path().join("geodesic.json"));
    assert_eq!(g["samples"][1]["point"], "{0,{0,1}}");
    assert_eq!(g["samples"][1]["t"], "1/4");
    assert_eq!(g["interval_check"]["violations"], 0);
    assert_eq!(code(&run(dir.path(), &["clique", "--level", "5", "--power", "2"])), 0);
    let c = json(&dir.path().join("clique.json"));
    assert_eq!((c["size"].as_u64(), c["status"].as_str()), (Some(10), Some("exact")));
    assert_eq!(c["turan_holds_at_size"], true);
}

#[test]
fn bound_command_reports_certificate() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["bound", "--level", "6", "--k", "4", "--epsilon", "1/32"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let b = json(&dir.path().join("bound.json"));
    assert_eq!(b["certificate"]["sum_identity"], true);
    assert_eq!(b["certificate"]["dominates"], true);
    assert_eq!(b["certificate"]["exact"], 638210);
    assert!(b["parameters"]["smallest_k"].as_u64().is_some());
}

use std::path::Path;
use std::process::{Command, Output};

use mmcodes_cli::error::exit;
use mmcodes_cli::fixtures::ZOO;
use serde_json::Value;

fn mmcodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmcodes"))
        .args(args)
        .env_remove("MMCODES_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn write_row1(dir: &Path) -> String {
    let p = dir.join("row1.toml");
    std::fs::write(&p, ZOO[0].1).unwrap();
    p.to_str().unwrap().to_string()
}

const SEARCH: &str = r#"
t = 2
orders = [[3, 3]]
term_range = [2, 3]
max_candidates = 12
batch = 4
seed = 5
"#;

#[test]
fn build_then_verify_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_row1(dir.path());
    let out = dir.path().join("bundle");
    let o = mmcodes(&["build", &cfg, "--out", out.to_str().unwrap()]);
    let manifest = json(&o);
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["n"], 96);
    assert_eq!(manifest["chain_dims"], serde_json::json!([16, 64, 96, 64, 16]));
    assert!(out.join("P_X.alist").exists() && out.join("P_Z.mtx").exists());

    let v = json(&mmcodes(&["verify", out.to_str().unwrap()]));
    assert_eq!((v["ok"].as_bool(), v["k"].as_u64()), (Some(true), Some(12)));

    // a flipped entry breaks the hash and the recomputation check
    let px = out.join("P_X.mtx");
    let text = std::fs::read_to_string(&px).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    let last = lines.pop().unwrap().to_string();
    let replaced = if last.ends_with(" 1") { last.replace(" 1", " 2") } else { last.clone() };
    let mut tampered = lines.join("\n");
    tampered.push('\n');
    tampered.push_str(if replaced == last { "1 3" } else { &replaced });
    tampered.push('\n');
    std::fs::write(&px, tampered).unwrap();
    let o = mmcodes(&["verify", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(exit::VERIFICATION), "{}", stdout(&o));
}

#[test]
fn params_from_config_and_bundle_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_row1(dir.path());
    let out = dir.path().join("b");
    assert!(mmcodes(&["build", &cfg, "--out", out.to_str().unwrap(), "--formats", "alist"]).status.success());
    let a = json(&mmcodes(&["params", &cfg, "--w-exhaustive", "4"]));
    let b = json(&mmcodes(&["params", out.to_str().unwrap(), "--w-exhaustive", "4"]));
    assert_eq!(a["report"], b["report"]);
    assert_eq!(a["report"]["k"], 12);
    assert_eq!(a["report"]["d_x"]["upper"], 4);
    assert_eq!(a["report"]["d_x"]["lower"], 4);

    let text = stdout(&mmcodes(&["params", &cfg, "--format", "text", "--confinement-w", "2"]));
    assert!(text.contains("[[96, 12, 4 (exact)]]"), "{text}");
    assert!(text.contains("Z-confinement: 4,4 (exact)"), "{text}");
}

#[test]
fn export_streams_alist() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_row1(dir.path());
    let o = mmcodes(&["export", &cfg, "--format", "alist"]);
    assert!(o.status.success());
    let m = mmcodes::read_alist(&stdout(&o)).unwrap();
    assert_eq!(m.shape(), (64, 96));
    let o = mmcodes(&["export", &cfg, "--format", "mtx", "--out", dir.path().join("m").to_str().unwrap()]);
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn distance_and_single_shot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_row1(dir.path());
    let d = json(&mmcodes(&["distance", &cfg, "--type", "z", "--w-exhaustive", "4"]));
    assert_eq!(d["bounds"][0][0], "Z");
    assert_eq!(d["bounds"][0][1]["witness"].as_array().unwrap().len(), 4);
    let s = json(&mmcodes(&["ssdist", &cfg, "--w-exhaustive", "2", "--iterations", "50"]));
    assert_eq!(s["bounds"].as_array().unwrap().len(), 2);
    let c = json(&mmcodes(&["confine", &cfg, "--type", "x", "--confinement-w", "2", "--confinement-mode", "cluster"]));
    assert_eq!(c["profiles"][0][1]["entries"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_row1(dir.path());
    assert_eq!(mmcodes(&["params", &cfg, "--no-such-flag"]).status.code(), Some(exit::USAGE));
    assert_eq!(mmcodes(&["params", "/nonexistent.toml"]).status.code(), Some(exit::USAGE));
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, ZOO[0].1.replace("1 + wx", "1 + wq")).unwrap();
    let o = mmcodes(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(exit::USAGE));
    assert!(String::from_utf8_lossy(&o.stderr).contains("generator 1"));

    let o = mmcodes(&["--budget", "1000", "distance", &cfg, "--w-exhaustive", "4"]);
    assert_eq!(o.status.code(), Some(exit::BUDGET));
    assert!(String::from_utf8_lossy(&o.stderr).contains("MMCODES_BUDGET"));
    let o = Command::new(env!("CARGO_BIN_EXE_mmcodes"))
        .args(["distance", &cfg, "--w-exhaustive", "4"])
        .env("MMCODES_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(exit::BUDGET));
}

#[test]
fn search_is_reproducible_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, SEARCH).unwrap();
    let run = |workers: &str, name: &str| {
        let out = dir.path().join(name);
        let o = mmcodes(&["search", cfg.to_str().unwrap(), "--workers", workers, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("1", "a.jsonl");
    let b = run("2", "b.jsonl");
    let strip = |s: &str| -> Vec<Value> {
        s.lines()
            .map(|l| {
                let mut v: Value = serde_json::from_str(l).unwrap();
                if let Some(o) = v.as_object_mut() {
                    o.remove("workers");
                    if let Some(r) = o.get_mut("report").and_then(Value::as_object_mut) {
                        r.remove("workers");
                    }
                }
                v
            })
            .collect()
    };
    assert_eq!(strip(&a), strip(&b));
    let last: Value = serde_json::from_str(a.lines().last().unwrap()).unwrap();
    assert_eq!(last["type"], "summary");
    assert_eq!(last["sampled"], 12);
}

#[test]
fn table2_selected_rows() {
    let o = mmcodes(&["table2", "1", "4", "--format", "json"]);
    let rows = json(&o);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["k"], 44);
    assert!(rows.iter().all(|r| r["status"] == "match"));
    assert_eq!(mmcodes(&["table2", "0"]).status.code(), Some(exit::USAGE));
}

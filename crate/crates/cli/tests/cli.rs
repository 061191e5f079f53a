use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use otable_cli::io::{read_scan_csv, ScanRow};
use otable_core::security::tradeoff_scan;
use serde_json::Value;

fn otable(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otable"))
        .args(args)
        .env_remove("OTABLE_SEED")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Value {
    let out = otable(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn schema(name: &str) -> Value {
    json(&Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name))
}

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn honest_batch_of_one_hundred() {
    let dir = tempfile::tempdir().unwrap();
    let r = ok(&[
        "gen-tables", "--protocol", "nland", "--n", "100", "--adversary-a", "honest", "--adversary-b", "honest", "--seed",
        "7", "--out-dir", s(dir.path()),
    ]);
    assert_eq!(r["tables"], 100);
    assert_eq!(r["failed"], 0);
    assert_eq!(r["errors"], 0);
    let text = std::fs::read_to_string(dir.path().join("transcripts.jsonl")).unwrap();
    assert!(text.starts_with("# "));
    assert_eq!(text.lines().count(), 101);
}

#[test]
fn empty_batch_has_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen-tables", "--n", "0", "--out-dir", s(dir.path())]);
    let text = std::fs::read_to_string(dir.path().join("transcripts.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with('#') && text.ends_with('\n'));
    assert_eq!(json(&dir.path().join("alice.json"))["tables"], Value::Array(vec![]));
}

#[test]
fn party_files_match_the_view_schema() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen-tables", "--protocol", "nland3", "--n", "40", "--seed", "2", "--out-dir", s(dir.path())]);
    let variants = schema("views.schema.json")["oneOf"].as_array().unwrap().clone();
    for (file, variant) in [("alice.json", &variants[0]), ("bob.json", &variants[1])] {
        let v = json(&dir.path().join(file));
        assert_eq!(keys(&v), keys(&variant["properties"]));
        assert_eq!(v["party"], variant["properties"]["party"]["const"]);
        let allowed = keys(&variant["properties"]["tables"]["items"]["properties"]);
        for t in v["tables"].as_array().unwrap() {
            assert_eq!(keys(t), allowed, "{file}");
        }
    }
    // neither file carries the other side's bits
    let a = std::fs::read_to_string(dir.path().join("alice.json")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("bob.json")).unwrap();
    assert!(!a.contains("\"y\"") && !a.contains("\"f\""));
    assert!(!b.contains("\"x\"") && !b.contains("\"e\""));
}

#[test]
fn transcripts_match_their_schema() {
    let dir = tempfile::tempdir().unwrap();
    let sc = schema("transcript.schema.json");
    let allowed = keys(&sc["properties"]);
    let required: BTreeSet<String> = sc["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    for (k, proto) in ["nland", "nland3", "nland2"].iter().enumerate() {
        let out = dir.path().join(proto);
        ok(&["gen-tables", "--protocol", proto, "--n", "30", "--eps-fail", "0.2", "--out-dir", s(&out)]);
        let text = std::fs::read_to_string(out.join("transcripts.jsonl")).unwrap();
        for line in text.lines().skip(1) {
            let v: Value = serde_json::from_str(line).unwrap();
            let present = keys(&v);
            assert!(present.is_subset(&allowed), "{k}: {present:?}");
            assert!(required.is_subset(&present), "{k}: {present:?}");
        }
    }
}

#[test]
fn scan_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    ok(&["holevo-scan", "--samples", "64", "--ancilla", "1", "--seed", "5", "--out", s(&csv), "--out-dir", s(dir.path())]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("seed,chi_y,chi_r,chi_yr,sum"));
    let rows = read_scan_csv(&csv).unwrap();
    let want: Vec<ScanRow> = tradeoff_scan(64, 1, 5).unwrap().points.iter().map(ScanRow::from).collect();
    assert_eq!(rows, want);
}

#[test]
fn qhe_reports_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.txt");
    std::fs::write(&c, "# two qubits\nH 0\nT 0\nCNOT 0 1\nT 1\nH 1\nP 0\nT 0\n").unwrap();
    let r = ok(&["qhe", "--circuit", s(&c), "--seed", "3", "--out-dir", s(dir.path())]);
    assert!(r["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
    assert!(r["tables_used"].as_u64().unwrap() <= r["table_bound"].as_u64().unwrap());
    assert_eq!(r["bob_view_audit"], "ok");
    let summary = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    let line = summary.lines().find(|l| l.starts_with("fidelity: ")).unwrap();
    let f: f64 = line["fidelity: ".len()..].parse().unwrap();
    assert!(f >= 1.0 - 1e-9);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let out = dir.path().join(tag);
        ok(&["gen-tables", "--protocol", "nland2", "--n", "60", "--eps-noise", "0.1", "--seed", "9", "--out-dir", s(&out)]);
        ["transcripts.jsonl", "alice.json", "bob.json", "report.json"]
            .map(|f| std::fs::read(out.join(f)).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn env_seed_and_config_match_flags() {
    let dir = tempfile::tempdir().unwrap();
    let by_flag = ok(&["ns-box", "--e", "0.36", "--samples", "300", "--seed", "12", "--out-dir", s(dir.path())]);
    let env = Command::new(env!("CARGO_BIN_EXE_otable"))
        .args(["ns-box", "--e", "0.36", "--samples", "300", "--out-dir", s(dir.path())])
        .env("OTABLE_SEED", "12")
        .output()
        .unwrap();
    assert_eq!(serde_json::from_slice::<Value>(&env.stdout).unwrap(), by_flag);
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "ns-box", "e": 0.36, "samples": 300, "seed": 12}"#).unwrap();
    assert_eq!(ok(&["--config", s(&cfg), "--out-dir", s(dir.path())]), by_flag);
    // explicit flags override the file
    let other = ok(&["--config", s(&cfg), "--seed", "13", "--out-dir", s(dir.path())]);
    assert_eq!(other["seed"], 13);
}

#[test]
fn errors_are_json_records() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.txt");
    let out = otable(&["qhe", "--circuit", s(&missing), "--out-dir", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let rec: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(rec["outcome"], "error");
    assert_eq!(rec["kind"], "io");
    assert!(rec["message"].as_str().unwrap().contains("nope.txt"));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "H 0\nX 0\n").unwrap();
    let out = otable(&["qhe", "--circuit", s(&bad), "--out-dir", s(dir.path())]);
    let rec: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!((rec["kind"].as_str(), out.status.code()), (Some("core"), Some(1)));
    assert!(rec["message"].as_str().unwrap().contains("line 2"));

    let out = otable(&["gen-tables", "--n", "lots"]);
    let rec: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!((rec["kind"].as_str(), out.status.code()), (Some("usage"), Some(2)));

    let out = otable(&["gen-tables", "--adversary-b", "entangled_input", "--out-dir", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn abort_is_an_outcome_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("batch");
    ok(&[
        "gen-tables", "--n", "200", "--adversary-a", "entangled_input", "--alice-fraction", "0.2", "--seed", "3",
        "--out-dir", s(&batch),
    ]);
    let out = dir.path().join("checked");
    let r = ok(&["check", "--batch", s(&batch), "--k", "100", "--threshold", "0", "--out-dir", s(&out)]);
    assert_eq!(r["outcome"], "abort");
    assert_eq!(r["tables_out"], 0);
    assert_eq!(json(&out.join("bob.json"))["tables"], Value::Array(vec![]));
}

#[test]
fn batch_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n);
    ok(&["gen-tables", "--n", "400", "--seed", "1", "--out-dir", s(&d("gen"))]);
    let c = ok(&["check", "--batch", s(&d("gen")), "--k", "50", "--out-dir", s(&d("check"))]);
    assert_eq!((c["outcome"].as_str(), c["tables_out"].as_u64()), (Some("ok"), Some(350)));
    let m = ok(&["combine", "--batch", s(&d("check")), "--k", "2", "--out-dir", s(&d("comb"))]);
    let groups = m["tables_out"].as_u64().unwrap();
    assert!((170..=175).contains(&groups), "{groups}");
    let e = ok(&["error-reduce", "--batch", s(&d("comb")), "--q", "4", "--out-dir", s(&d("red"))]);
    assert_eq!(e["residual_error_rate"], 0.0);
    assert_eq!(e["accepted"].as_u64().unwrap(), groups / 5);

    let circuit = d("and.txt");
    std::fs::write(&circuit, "wire a alice\nwire b bob\nAND c a b\nOUT c both\n").unwrap();
    let r = ok(&["eval-circuit", "--circuit", s(&circuit), "--alice", "1", "--bob", "1", "--batch", s(&d("red")), "--out-dir", s(&d("mpc"))]);
    assert_eq!(r["outputs"], serde_json::json!([true]));
    let alice = json(&d("mpc").join("alice.json"));
    assert_eq!(alice["outputs"][0]["value"], true);
}

#[test]
fn commitment_flip_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let honest = ok(&["commit", "--bit", "1", "--bob-inputs", "1011", "--out-dir", s(dir.path())]);
    assert_eq!((honest["outcome"].as_str(), honest["opened"].as_bool()), (Some("ok"), Some(true)));
    let forged = ok(&["commit", "--bit", "1", "--bob-inputs", "1011", "--flip", "0100", "--out-dir", s(dir.path())]);
    assert_eq!(forged["outcome"], "abort");
    let lucky = ok(&["commit", "--bit", "1", "--bob-inputs", "1011", "--flip", "1011", "--out-dir", s(dir.path())]);
    assert_eq!(lucky["equivocated"], true);
    let ot = ok(&["ot", "--m0", "0", "--m1", "1", "--choice", "1", "--out-dir", s(dir.path())]);
    assert_eq!(ot["output"], true);
}

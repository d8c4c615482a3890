use std::path::Path;
use std::process::{Command, Output};

use rglab::graph::GraphTopology;
use sha2::{Digest, Sha256};

fn rg_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rg-lab"))
        .args(args)
        .env("RG_LAB_THREADS", "2")
        .output()
        .expect("rg-lab runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Value printed on a `key = value` line.
fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| {
            let (k, v) = l.split_once('=')?;
            (k.trim() == key).then(|| v.trim().to_owned())
        })
        .unwrap_or_else(|| panic!("no `{key}` in output:\n{text}"))
}

fn json_block(text: &str) -> serde_json::Value {
    let (_, json) = text.split_once("--- json ---").expect("json marker");
    serde_json::from_str(json.trim()).expect("valid json")
}

#[test]
fn edge_prob_examples() {
    let o = rg_lab(&["edge-prob", "-K", "1", "-P", "5", "-d", "1", "-f", "1", "-g", "1"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "s"), "0.2");
    assert_eq!(field(&stdout(&o), "s exact"), "1/5");

    let o = rg_lab(&["edge-prob", "-K", "3", "-P", "10", "-d", "2", "-f", "1", "-g", "1"]);
    assert_eq!(field(&stdout(&o), "s exact"), "11/60");
    assert_eq!(field(&stdout(&o), "s"), "0.183333333");

    let o = rg_lab(&["edge-prob", "-K", "3", "-P", "10", "-d", "2", "-f", "0.5", "-g", "0.5"]);
    assert_eq!(field(&stdout(&o), "t"), "0.0458333333");

    let o = rg_lab(&["edge-prob", "-K", "3", "-P", "2", "-d", "1", "-f", "1", "-g", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("K exceeds P"));

    // Too many digits for an exact fraction.
    let o = rg_lab(&["edge-prob", "-K", "400", "-P", "100000000", "-d", "2"]);
    assert!(field(&stdout(&o), "s exact").starts_with("(more than 64"));
}

#[test]
fn predict_examples() {
    let g = (1000f64).ln() / 1000.0;
    let g_arg = format!("{g}");
    let o = rg_lab(&["predict", "-n", "1000", "-K", "4", "-P", "4", "-d", "1", "-g", &g_arg]);
    assert!(o.status.success());
    let alpha: f64 = field(&stdout(&o), "alpha").parse().unwrap();
    assert!(alpha.abs() < 1e-9);
    assert_eq!(field(&stdout(&o), "prediction"), "0.367879441");

    let o = rg_lab(&["predict", "-n", "1000", "-K", "36", "-P", "10000", "-d", "2", "-f", "0"]);
    assert_eq!(field(&stdout(&o), "prediction"), "0");

    let mut last = -1.0;
    for g in ["0.5", "0.7", "0.9", "1"] {
        let o = rg_lab(&["predict", "-n", "1000", "-K", "36", "-P", "10000", "-d", "2", "-g", g]);
        let p: f64 = field(&stdout(&o), "prediction").parse().unwrap();
        assert!(p > last, "prediction must increase with g");
        last = p;
        assert!(stderr(&o).contains("warning: regime check"));
    }

    let o = rg_lab(&["predict", "-n", "2", "-K", "3", "-P", "10", "-d", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn critical_examples() {
    // K = P: every pair is adjacent, so a tiny g suffices.
    let o = rg_lab(&["critical", "--axis", "g", "-n", "1000", "-K", "5", "-P", "5", "-d", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let g: f64 = field(&out, "value").parse().unwrap();
    assert!(g < 0.01);
    assert_eq!(field(&out, "status"), "feasible");
    assert_eq!(field(&out, "alpha"), "0");

    // f* = ((ln n)/n) / (g s) with s = 11/60.
    let o = rg_lab(&["critical", "--axis", "f", "-n", "50", "-K", "3", "-P", "10", "-d", "2", "-g", "0.5"]);
    let f: f64 = field(&stdout(&o), "value").parse().unwrap();
    let hand = (50f64.ln() / 50.0) / (0.5 * 11.0 / 60.0);
    assert!((f - hand).abs() < 1e-8 * hand);

    // Linear scan over K = 2..200 with the same inequality puts K* at 36.
    let o = rg_lab(&["critical", "--axis", "K", "-n", "1000", "-P", "10000", "-d", "2"]);
    assert_eq!(field(&stdout(&o), "value"), "36");

    let o = rg_lab(&["critical", "--axis", "g", "-n", "1000", "-K", "36", "-P", "10000", "-d", "2", "-f", "0.5"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "status"), "INFEASIBLE");
    let g: f64 = field(&stdout(&o), "value").parse().unwrap();
    assert!(g > 1.0);

    let o = rg_lab(&["critical", "--axis", "q", "-n", "10", "-K", "3", "-P", "10", "-d", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

fn read_manifest(csv: &Path) -> serde_json::Value {
    let path = csv.with_file_name(format!("{}.manifest.json", csv.file_stem().unwrap().to_str().unwrap()));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("complete.csv");
    let o = rg_lab(&[
        "simulate", "-n", "20", "-K", "4", "-P", "4", "-d", "1", "--trials", "1", "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "sweep_param,sweep_value,n,K,P,d,f,g,m,trials,successes,empirical_prob,ci_low,ci_high,alpha,predicted_limit,critical_value,seed"
    );
    assert_eq!(lines.len(), 2);
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cols.len(), 18);
    assert_eq!(cols[10], "1", "successes");

    let manifest = read_manifest(&csv);
    assert_eq!(manifest["tool"], "rg-lab");
    assert_eq!(manifest["base_seed"], 0);
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 1);
    assert_eq!(outputs[0]["path"], csv.to_str().unwrap());
    assert_eq!(outputs[0]["sha256"], hex::encode(Sha256::digest(text.as_bytes())));

    let summary = json_block(&stdout(&o));
    assert_eq!(summary[0]["successes"], 1);
    assert_eq!(summary[0]["params"]["ring_size"], 4);
}

#[test]
fn sweep_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "n = 1000\nK = 36\nP = 10000\nd = 2\nf = 1\ntrials = 20\nseed = 5\n\n[sweep]\naxis = g\nstart = 0.5\nstop = 1.0\nstep = 0.05\n",
    )
    .unwrap();
    let csv = dir.path().join("g.csv");
    let o = rg_lab(&["sweep", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r[0] == "g" && r[16] == "0.939679374" && r[17] == "5"));
    assert_eq!(rows[2][1], "0.6");
    let probs: Vec<f64> = rows.iter().map(|r| r[11].parse().unwrap()).collect();
    assert_eq!(probs[0], 0.0);
    assert!(probs[10] > probs[0]);

    // Flags override the file.
    let csv2 = dir.path().join("g2.csv");
    let o = rg_lab(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--values", "1", "--trials", "5", "--out",
        csv2.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv2).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().contains(",5,"));
}

#[test]
fn config_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "n = 100\nK = twelve\n").unwrap();
    let out = dir.path().join("x.csv");
    let o = rg_lab(&["simulate", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2, field `K`"), "{}", stderr(&o));

    let o = rg_lab(&[
        "simulate", "-n", "10", "-K", "2", "-P", "4", "-d", "1", "--trials", "2", "--out",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));

    let missing = dir.path().join("missing.cfg");
    let o = rg_lab(&["simulate", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let o = Command::new(env!("CARGO_BIN_EXE_rg-lab"))
        .args(["simulate", "-n", "10", "-K", "2", "-P", "4", "-d", "1", "--out", out.to_str().unwrap()])
        .env("RG_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_coupling() {
    let o = rg_lab(&["verify", "coupling", "-n", "1000", "-K", "100", "-P", "10000", "-d", "2", "--trials", "50"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("validity rate = "));
    assert_eq!(field(&stdout(&o), "containment violations"), "0");
    let json = json_block(&stdout(&o));
    assert_eq!(json["containment_violations"], 0);

    // K = 20 <= 3 ln 1000.
    let o = rg_lab(&["verify", "coupling", "-n", "1000", "-K", "20", "-P", "10000", "-d", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("coupling infeasible"));
}

#[test]
fn verify_degree_guard_and_reports() {
    let o = rg_lab(&[
        "verify", "degree", "-t", "0", "-n", "200", "-K", "10", "-P", "1000", "-d", "1", "--trials", "20",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("regime guard"));
    let json = json_block(&stdout(&o));
    assert_eq!(json["rows"].as_array().unwrap().len(), 4);
    assert_eq!(json["t"], 0.0);

    let o = rg_lab(&["verify", "degree", "-t", "0.9", "-n", "200", "-K", "10", "-P", "1000", "-d", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = rg_lab(&[
        "verify", "gap", "-n", "300", "-K", "20", "-P", "2000", "-d", "1", "--trials", "20",
    ]);
    assert!(o.status.success());
    assert_eq!(json_block(&stdout(&o))["trials"], 20);

    let o = rg_lab(&[
        "verify", "dominance", "-n", "300", "-K", "20", "-P", "2000", "-d", "1", "--trials", "30", "-k", "1",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("dominance "));
}

#[test]
fn sample_prints_parseable_edge_list() {
    let o = rg_lab(&["sample", "-n", "30", "-K", "5", "-P", "60", "-d", "1", "--seed", "3"]);
    assert!(o.status.success());
    let g = GraphTopology::parse_edge_list(&stdout(&o)).unwrap();
    assert_eq!(g.node_count(), 30);
    let again = rg_lab(&["sample", "-n", "30", "-K", "5", "-P", "60", "-d", "1", "--seed", "3"]);
    assert_eq!(o.stdout, again.stdout);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use stabmetro::protocol2::{qfi_subspace, SubspaceSpec, SubspaceState};
use stabmetro::{fixtures, LabeledGraph};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabmetro")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn csv_rows(args: &[&str]) -> Vec<Vec<String>> {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn fig1a_preset_matches_the_library_fixture() {
    let preset: LabeledGraph =
        LabeledGraph::from_json(include_str!("../presets/fig1a.json")).unwrap();
    assert_eq!(preset, fixtures::fig1a());
}

#[test]
fn analyze_fig1a() {
    let v = json(&["analyze", "--preset", "fig1a"]);
    assert_eq!(v["twins_classes"], serde_json::json!([["A", "B", "D"]]));
    assert_eq!(v["true_twins_classes"], serde_json::json!([["F", "G"]]));
    assert_eq!(v["leaves"], serde_json::json!(["A", "B", "D", "J"]));
    assert_eq!(v["roots"], serde_json::json!(["C", "I"]));
    assert_eq!(v["u_bar"], serde_json::json!(["F", "G"]));
    assert_eq!(v["bound"], 26);
}

#[test]
fn analyze_hexagon() {
    let v = json(&["analyze", "--graph", "cycle:6"]);
    assert_eq!(v["twins_classes"], serde_json::json!([]));
    assert_eq!(v["true_twins_classes"], serde_json::json!([]));
    assert_eq!(v["bound"], 6);
    let rows = csv_rows(&["analyze", "--preset", "fig1b", "--format", "csv"]);
    assert_eq!(rows[0][0], "vertex");
    assert_eq!(rows.len(), 7);
}

#[test]
fn analyze_rejects_malformed_json() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.json", "{\"n\": 3,\n \"edges\": [[0, 1], [1, 1]]}");
    let out = run(&["analyze", "--input", &p]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("self-loop"), "{}", stderr(&out));
    let p = write(&dir, "broken.json", "{\"n\": 3,\n \"edges\": [[0, 1],\n");
    let out = run(&["analyze", "--input", &p]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn search_star_and_fig1a() {
    let v = json(&["search", "--graph", "star:8"]);
    assert_eq!(v["qfi"], 64);
    assert_eq!(v["attainable"], true);
    assert_eq!(v["hamiltonian"].as_array().unwrap().len(), 8);
    assert_eq!(v["measurement"].as_array().unwrap().len(), 8);

    let v = json(&["search", "--preset", "fig1a", "--alpha", "C,F,I,J"]);
    assert_eq!(v["qfi"], 24);
    let mut h: Vec<String> = v["hamiltonian"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect();
    h.sort();
    assert_eq!(h, ["X_A", "X_B", "X_D", "X_J", "Y_F", "Y_G", "Z_C", "Z_I"]);
    assert_eq!(v["partition"]["S2"], serde_json::json!(["E", "H"]));
}

#[test]
fn search_size_limit_exits_two() {
    let out = run(&["search", "--graph", "cycle:25", "--mode", "exhaustive"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("limit"));
    let v = json(&["search", "--graph", "cycle:25", "--mode", "greedy"]);
    assert_eq!(v["qfi"], 25);
}

#[test]
fn verify_fig1a_protocol() {
    let v = json(&["verify", "--preset", "fig1a", "--alpha", "C,F,I,J", "--theta", "0,0.3,1.0"]);
    assert_eq!(v["saturated"], true);
    for c in ["stabilizes", "measurement_anticommutes_h", "measurement_commutes_k", "k_anticommutes_h"] {
        assert_eq!(v["conditions"][c], true, "{c}");
    }
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert!(r["gap"].as_f64().unwrap().abs() < 1e-7);
        assert!((r["qfi"].as_f64().unwrap() - 24.0).abs() < 1e-8);
    }
}

#[test]
fn verify_ghz_standard_protocol() {
    let v = json(&["verify", "--ghz", "6"]);
    for r in v["rows"].as_array().unwrap() {
        assert!((r["qfi"].as_f64().unwrap() - 36.0).abs() < 1e-8);
        assert!((r["cfi"].as_f64().unwrap() - 36.0).abs() < 1e-8);
    }
    let out = run(&["verify", "--ghz", "20"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_corrupted_measurement_exits_three() {
    let out = run(&["verify", "--ghz", "4", "--measurement", "XZZZ"]);
    assert_eq!(code(&out), 3);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["conditions"]["measurement_anticommutes_h"], false);

    let dir = TempDir::new().unwrap();
    let model = format!(
        "{{\"graph\": {}, \"alpha\": [\"C\", \"F\", \"I\", \"J\"], \"measurement\": \"ZZXZZYYZZZ\"}}",
        include_str!("../presets/fig1a.json")
    );
    let p = write(&dir, "model.json", &model);
    let out = run(&["verify", "--model", &p, "--theta", "0.3"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn protocol2_examples() {
    let v = json(&["protocol2", "--sizes", "3,3,3"]);
    assert_eq!(v["qfi"].as_f64().unwrap(), 81.0);
    let v = json(&["protocol2", "--sizes", "4,5", "--state-preset", "uniform", "--oracle"]);
    // Populations 1/2 on h = 9 and h = −1.
    assert!((v["qfi"].as_f64().unwrap() - 41.0).abs() < 1e-12);
    assert!((v["oracle_qfi"].as_f64().unwrap() - 41.0).abs() < 1e-8);
    let v = json(&["protocol2", "--sizes", "3,3,3", "--state-preset", "min"]);
    assert!((v["qfi"].as_f64().unwrap() - 9.0).abs() < 1e-12);
    let out = run(&["protocol2", "--sizes", "1,4"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("at least 2"));
}

#[test]
fn protocol2_state_file_round_trip() {
    assert!(SubspaceSpec::new(6, vec![vec![0, 2, 4], vec![1, 3], vec![5]]).is_err());
    let spec = SubspaceSpec::new(7, vec![vec![0, 2, 4], vec![1, 3], vec![5, 6]]).unwrap();
    let state = SubspaceState::diagonal(spec.clone(), &[0.1, 0.2, 0.3, 0.4]).unwrap();
    let dir = TempDir::new().unwrap();
    let sp = write(&dir, "spec.json", &spec.to_json());
    let st = write(&dir, "state.json", &state.to_json());
    let v = json(&["protocol2", "--input", &sp, "--state", &st, "--oracle"]);
    assert!((v["qfi"].as_f64().unwrap() - qfi_subspace(&state)).abs() < 1e-12);
    assert!((v["oracle_qfi"].as_f64().unwrap() - qfi_subspace(&state)).abs() < 1e-8);
    assert_eq!(v["blocks"], serde_json::json!([[0, 2, 4], [1, 3], [5, 6]]));
    let alone = json(&["protocol2", "--state", &st]);
    assert_eq!(alone["qfi"], v["qfi"]);
    let other = write(&dir, "other.json", r#"{"n": 7, "blocks": [[0, 1, 2], [3, 4], [5, 6]]}"#);
    assert_eq!(code(&run(&["protocol2", "--input", &other, "--state", &st])), 1);
}

#[test]
fn protocol2_family_file() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "fam.json", r#"{"family": "ii", "n": 12, "m": 2}"#);
    let v = json(&["protocol2", "--family", &p]);
    assert_eq!(v["sizes"], serde_json::json!([4, 4, 4]));
    let eps = v["family"]["epsilon"].as_f64().unwrap();
    assert!((eps - 2.0 * 3f64.ln() / 12f64.ln()).abs() < 1e-12);
}

#[test]
fn noise_fig3a_ghz_column() {
    let rows = csv_rows(&["noise", "--preset", "fig3a", "--format", "csv"]);
    let header = &rows[0];
    let ghz = header.iter().position(|h| h == "ghz").unwrap();
    let pcol = header.iter().position(|h| h == "p").unwrap();
    assert!(rows.len() > 10);
    for r in &rows[1..] {
        let p: f64 = r[pcol].parse().unwrap();
        let f: f64 = r[ghz].parse().unwrap();
        let want = 81.0 * (1.0 - 2.0 * p).powi(18);
        assert!((f - want).abs() <= 1e-12 * want.max(1e-300), "p = {p}: {f} vs {want}");
    }
}

#[test]
fn noise_fig3b_separable_baseline() {
    let rows = csv_rows(&["noise", "--preset", "fig3b", "--format", "csv"]);
    let h = &rows[0];
    let (ncol, pcol, sep) = (
        h.iter().position(|x| x == "n").unwrap(),
        h.iter().position(|x| x == "p").unwrap(),
        h.iter().position(|x| x == "separable").unwrap(),
    );
    let mut sizes = std::collections::BTreeSet::new();
    for r in &rows[1..] {
        let n: f64 = r[ncol].parse().unwrap();
        let p: f64 = r[pcol].parse().unwrap();
        let f: f64 = r[sep].parse().unwrap();
        assert!((f - n * (1.0 - 2.0 * p).powi(2)).abs() < 1e-12);
        sizes.insert(r[ncol].clone());
    }
    assert!(sizes.len() >= 5);
}

#[test]
fn noise_rejects_bad_p() {
    let out = run(&["noise", "--preset", "fig3a", "--p", "1.5"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("outside [0, 1]"));
}

#[test]
fn construct_atype53() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("composite.json");
    let v = json(&["construct", "--preset", "atype53", "--graph-out", g.to_str().unwrap()]);
    assert_eq!(v["composite"]["n"], 27);
    assert_eq!(v["composite"]["best_qfi"], 243);
    let e = v["scaling"]["exponent"].as_f64().unwrap();
    assert!((e - 5.0 / 3.0).abs() <= 0.15, "{e}");
    let lg = LabeledGraph::from_json(&fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(lg.graph.n(), 27);
    assert!(lg.graph.is_connected());
    let again = json(&["analyze", "--input", g.to_str().unwrap()]);
    assert_eq!(again["bound"], 243);
}

#[test]
fn construct_errors() {
    let dir = TempDir::new().unwrap();
    let y = write(
        &dir,
        "y.json",
        r#"{"type": "B", "meta_edges": [[0,1],[1,2],[2,3],[3,0]],
            "assignment": [{"kind":"s1","size":4},{"kind":"s3","size":5},{"kind":"s2","size":4},{"kind":"s3","size":5}],
            "meta_stabilizer": "YZZY"}"#,
    );
    let out = run(&["construct", "--input", &y]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("rule table"), "{}", stderr(&out));

    let s = write(&dir, "s.json", r#"{"scaling": {"family": "star", "n_values": [8, 16]}}"#);
    let out = run(&["construct", "--input", &s]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("need ≥3"), "{}", stderr(&out));
}

#[test]
fn construct_b_type_flags_unknown_rules() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "c4.json",
        r#"{"type": "B", "meta_edges": [[0,1],[1,2],[2,3],[3,0]],
            "assignment": [{"kind":"s2","size":4},{"kind":"s3","size":5},{"kind":"s2","size":4},{"kind":"s3","size":5}],
            "meta_stabilizer": "YZZY"}"#,
    );
    let v = json(&["construct", "--input", &p]);
    assert_eq!(v["composite"]["unknown_rules"].as_array().unwrap().len(), 2);
    let rules = write(&dir, "rules.json", r#"{"Y": {"s2": "prohibited"}}"#);
    let out = run(&["construct", "--input", &p, "--rules", &rules]);
    assert_eq!(code(&out), 1);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["noise", "--preset", "fig3a"],
        vec!["search", "--graph", "cycle:30", "--mode", "greedy", "--seed", "7"],
        vec!["construct", "--preset", "atype53", "--format", "csv"],
    ] {
        let a = dir.path().join("a.out");
        let b = dir.path().join("b.out");
        for p in [&a, &b] {
            let mut full = args.clone();
            full.extend(["--output", p.to_str().unwrap()]);
            assert!(run(&full).status.success());
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{args:?}");
        assert!(!fs::read(Path::new(&a)).unwrap().is_empty());
    }
}

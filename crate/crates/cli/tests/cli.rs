use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn machine(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "machines", &format!("{name}.tm")].iter().collect();
    p.to_string_lossy().into_owned()
}

fn omega(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omega")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn check_verify_schema(v: &Value) {
    for key in ["machine", "input", "m", "steps", "omega_truth", "simulator_outcome", "agree", "wall_ms", "length"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for key in ["build_ms", "eval_ms", "simulate_ms"] {
        assert!(v["wall_ms"][key].is_number());
    }
    for key in ["natural", "noidx", "size"] {
        assert!(v["length"][key].as_u64().unwrap() > 0);
    }
}

#[test]
fn verify_walker_before_acceptance() {
    let o = omega(&["verify", "--program", &machine("walker"), "--input", "01", "--zone-exp", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    check_verify_schema(&v);
    assert_eq!(v["steps"], 2);
    assert_eq!(v["omega_truth"], false);
    assert_eq!(v["simulator_outcome"]["outcome"], "Running");
    assert_eq!(v["agree"], true);
}

#[test]
fn verify_immediate_reject() {
    for word in ["0", "10"] {
        let o = omega(&[
            "verify", "--program", &machine("immediate-reject"), "--input", word, "--zone-exp", "1", "--strategy", "bdd",
        ]);
        assert_eq!(code(&o), 0);
        let v = json(&o);
        assert_eq!(v["omega_truth"], false);
        assert_eq!(v["agree"], true);
    }
}

#[test]
fn verify_exit_code_tracks_agreement() {
    let o = omega(&["verify", "--program", &machine("walker"), "--input", "01", "--zone-exp", "2", "--strategy", "bdd"]);
    let v = json(&o);
    check_verify_schema(&v);
    assert_eq!(v["simulator_outcome"]["outcome"], "Accepted");
    let expected = v["omega_truth"] == true;
    assert_eq!(v["agree"], expected);
    assert_eq!(code(&o), if expected { 0 } else { 3 });
}

#[test]
fn verify_timeout_exits_2() {
    let o = omega(&[
        "verify", "--program", &machine("walker"), "--input", "01", "--zone-exp", "1", "--strategy", "guarded",
        "--budget-ms", "1",
    ]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    assert_eq!(v["omega_truth"], "timeout");
    assert!(v["agree"].is_null());
}

#[test]
fn verify_needs_zone_exponent() {
    let o = omega(&["verify", "--program", &machine("walker"), "--input", "01"]);
    assert_eq!(code(&o), 1);
    let o = omega(&["verify", "--program", "/nonexistent.tm", "--input", "01", "--zone-exp", "1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn encode_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["interchange", "qcir", "qdimacs"] {
        let a = dir.path().join(format!("a.{format}"));
        let b = dir.path().join(format!("b.{format}"));
        for out in [&a, &b] {
            let o = omega(&[
                "encode", "--program", &machine("alternator"), "--input", "01", "--zone-exp", "1", "--format", format,
                "--out", out.to_str().unwrap(),
            ]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{format}");
    }
    let q = omega_core::eval::qbf::Qbf::parse_qdimacs(&fs::read_to_string(dir.path().join("a.qdimacs")).unwrap());
    let q = q.unwrap();
    assert!(q.prefix[0].0, "outermost block is universal");
    let (f, _) =
        omega_core::fo::parse_formula(&fs::read_to_string(dir.path().join("a.interchange")).unwrap()).unwrap();
    assert!(f.is_closed());
}

#[test]
fn eval_sentences_and_models() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "f.fo", "(signature boolean)\n(exists (x0,0) (forall (x0,1) (= (meet x0,0 x0,1) x0,1)))\n");
    for strategy in ["naive", "shortcircuit", "guarded", "qbf", "bdd"] {
        let o = omega(&["eval", &f, "--strategy", strategy]);
        assert_eq!(code(&o), 0);
        assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "true", "{strategy}");
    }
    let g = write(&dir, "g.fo", "(signature relational equiv)\n(forall (a0,0 a0,1) (~ a0,0 a0,1))\n");
    let one = write(&dir, "one.json", r#"{"size": 2, "classes": [[0, 1]]}"#);
    let two = write(&dir, "two.json", r#"{"size": 2, "classes": [[0], [1]]}"#);
    assert_eq!(String::from_utf8(omega(&["eval", &g, "--model", &one]).stdout).unwrap().trim(), "true");
    assert_eq!(String::from_utf8(omega(&["eval", &g, "--model", &two]).stdout).unwrap().trim(), "false");
    assert_eq!(code(&omega(&["eval", &g])), 1);
}

#[test]
fn stats_csv() {
    let o = omega(&["stats", "--program", &machine("walker"), "--lengths", "4,8,16,32"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x_len,p_len,omega_len,omega_len_noidx,build_ms"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r.len(), 5);
        assert!(r[0] <= r[2]);
    }
    let slope = ((rows[3][2] / rows[0][2]).ln()) / ((rows[3][0] / rows[0][0]).ln());
    assert!(slope > 1.0 && slope < 2.5, "{slope}");
}

#[test]
fn simulate_reports_trace() {
    let o = omega(&["simulate", "--program", &machine("walker"), "--input", "01", "--steps", "4", "--trace"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["outcome"]["outcome"], "Accepted");
    assert_eq!(v["outcome"]["step"], 4);
    assert_eq!(v["trace"].as_array().unwrap().len(), 5);
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn translate_with_model_check() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "f.fo", "(signature boolean)\n(forall (x0,0) (or (= x0,0 0) (= x0,0 1)))\n");
    let model = write(&dir, "m.json", r#"{"size": 2, "classes": [[0], [1]], "consts": [0, 1]}"#);
    let o = omega(&["translate", &f, "--mode", "2.0", "--check-model", &model]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("(signature relational equiv consts)"));
    let summary: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(summary["check"]["equivalent"], true);

    let o = omega(&["translate", &f, "--mode", "2.1"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("(signature relational equiv)"));

    let o = omega(&["translate", &f, "--mode", "2.2"]);
    assert_eq!(code(&o), 1);

    let n = write(&dir, "n.fo", "(signature relational equiv)\n(not (~ y0,0 y0,1))\n");
    let eq3 = write(&dir, "e.json", r#"{"size": 3, "classes": [[0], [1], [2]]}"#);
    let o = omega(&["translate", &f, "--mode", "2.2", "--n-formula", &n, "--check-model", &eq3]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // N is inlined, so the output carries the signature N is written in.
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("(signature relational equiv)\n"));
    assert!(!out.contains(" c0") && !out.contains("(N "));
}

#[test]
fn reduce_prints_clone() {
    let dir = tempfile::tempdir().unwrap();
    let extra = write(&dir, "p.tm", &format!("{}q7 0 -> q0 R\n", fs::read_to_string(machine("walker")).unwrap()));
    let o = omega(&["reduce", "--program", &extra, "--compare", &machine("walker")]);
    assert_eq!(code(&o), 0);
    let reduced = String::from_utf8(o.stdout).unwrap();
    assert!(!reduced.contains("q7"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("monoclonal: true"));
}

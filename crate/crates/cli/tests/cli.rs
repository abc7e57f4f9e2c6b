use std::path::Path;
use std::process::{Command, Output};

use nilcurv_cli::format::{load_str, parse_str, to_json};
use serde_json::Value;

fn nilcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilcurv"))
        .args(args)
        .env_remove("NILCURV_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

fn emit(dir: &Path, file: &str, args: &[&str]) -> String {
    let path = dir.join(file).to_str().unwrap().to_string();
    let mut all = vec!["family"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--emit", &path]);
    let out = nilcurv(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn emitted_family_checks_ricci_flat() {
    let dir = tempfile::tempdir().unwrap();
    for mode in ["rational", "float"] {
        let f = emit(dir.path(), "l.json", &["l6_19", "--alpha", "1/2", "--mode", mode]);
        let out = nilcurv(&["check", &f, "--json"]);
        assert_eq!(out.status.code(), Some(0));
        let r = json(&out);
        assert_eq!(check(&r, "einstein")["verdict"], "ricci_flat");
        assert_eq!(r["mode"], mode);
        assert_eq!(r["input_sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn asymmetric_metric_names_entries() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(
        &f,
        r#"{"dim": 2, "mode": "rational", "metric": [["1", "1/2"], ["0", "1"]], "brackets": []}"#,
    )
    .unwrap();
    let out = nilcurv(&["check", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(1, 2)") && err.contains("(2, 1)"), "{err}");
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, "{\n  \"dim\": 2,\n  \"mode\": \"float\",\n  oops\n}").unwrap();
    let out = nilcurv(&["check", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn conti8_decomposes_into_einstein_system() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "c.json", &["conti8"]);
    let r = json(&nilcurv(&["check", &f, "--decompose", "--json"]));
    let ein = check(&r, "einstein");
    assert_eq!(ein["verdict"], "einstein");
    assert!(ein["lambda"].as_f64().unwrap().abs() > 0.1);
    let es = check(&r, "es_system");
    assert_eq!(es["verdict"], "holds");
    assert!(es["residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn quasi_einstein_family_carries_cocycle() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "q.json", &["qe_dim6", "--a2", "-3", "--eps", "-", "--mode", "rational"]);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(file["cocycle"]["p"], 1);
    let r = json(&nilcurv(&["check", &f, "--json"]));
    assert_eq!(check(&r, "quasi_einstein")["verdict"], "quasi_einstein");
    assert_eq!(check(&r, "extension.einstein")["verdict"], "ricci_flat");
}

#[test]
fn emit_parse_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, mode) in [("dim7_147e", "rational"), ("dim7_147e", "float"), ("qe_dim5", "float"), ("conti8", "float")] {
        let f = emit(dir.path(), "x.json", &[name, "--mode", mode]);
        let text = std::fs::read_to_string(&f).unwrap();
        let doc = load_str(&text).unwrap();
        let again = to_json(&doc.to_file());
        assert_eq!(again, text, "{name} {mode}");
        assert_eq!(parse_str(&again).unwrap(), parse_str(&text).unwrap());
    }
}

#[test]
fn exit_code_tracks_failures() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "c.json", &["conti8"]);
    for args in [vec!["check", &f, "--json"], vec!["check", &f, "--json", "--tol", "1e-15"]] {
        let out = nilcurv(&args);
        let failed = json(&out)["failed"].as_u64().unwrap();
        assert_eq!(out.status.code(), Some(i32::from(failed > 0)));
    }
}

#[test]
fn tiny_tolerance_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "c.json", &["conti8"]);
    let out = nilcurv(&["check", &f, "--tol", "1e-17", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["failed"].as_u64().unwrap() > 0);
    assert!(out.stderr.is_empty());
}

#[test]
fn flag_tolerance_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = emit(dir.path(), "l.json", &["l6_19"]);
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_nilcurv"));
        c.args(["check", &f, "--json"]).env_remove("NILCURV_TOL");
        if let Some(e) = env {
            c.env("NILCURV_TOL", e);
        }
        if let Some(t) = flag {
            c.args(["--tol", t]);
        }
        json(&c.output().unwrap())["tolerance"].as_f64().unwrap()
    };
    assert_eq!(run(None, None), 1e-9);
    assert_eq!(run(Some("1e-6"), None), 1e-6);
    assert_eq!(run(Some("1e-6"), Some("1e-3")), 1e-3);
}

#[test]
fn file_tolerance_is_the_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("t.json");
    std::fs::write(
        &f,
        r#"{"dim": 3, "mode": "float", "metric": [[1,0,0],[0,1,0],[0,0,1]],
            "brackets": [{"i": 1, "j": 2, "k": 3, "c": 1}], "tolerance": 1e-7}"#,
    )
    .unwrap();
    let r = json(&nilcurv(&["check", f.to_str().unwrap(), "--json"]));
    assert_eq!(r["tolerance"], 1e-7);
    assert_eq!(check(&r, "nilpotency")["verdict"], "2-step");
}

#[test]
fn randomized_commands_reproduce() {
    for args in [
        vec!["lemma", "weyl-fuzz", "--pairs", "200", "--seed", "3", "--json"],
        vec!["search", "--trials", "5", "--seed", "2", "--json"],
        vec!["lemma", "imp-search", "--k", "1", "--restarts", "5", "--seed", "4", "--json"],
    ] {
        let a = nilcurv(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, nilcurv(&args).stdout, "{args:?}");
    }
}

#[test]
fn lemma_commands_default_inputs() {
    let r = json(&nilcurv(&["lemma", "imp-check", "--json"]));
    assert_eq!(r["checks"][0]["residual"], "0");
    let r = json(&nilcurv(&["lemma", "genlem0", "--json"]));
    assert_eq!(r["checks"][0]["verdict"], "conclusions_hold");
    let r = json(&nilcurv(&["lemma", "genlem1", "--json"]));
    assert_eq!(r["checks"][0]["verdict"], "adapted_basis");
}

#[test]
fn bad_flags_are_errors() {
    assert_eq!(nilcurv(&["family", "l6_19", "--r", "1"]).status.code(), Some(2));
    assert_eq!(nilcurv(&["family", "nope"]).status.code(), Some(2));
    assert_eq!(nilcurv(&["search", "--problem", "other"]).status.code(), Some(2));
    assert_eq!(nilcurv(&["check"]).status.code(), Some(2));
}

#[test]
fn report_file_matches_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("r.json");
    let out = nilcurv(&["lemma", "weyl-fuzz", "--pairs", "20", "--json", "--report", rep.to_str().unwrap()]);
    assert_eq!(std::fs::read(&rep).unwrap(), out.stdout);
}

#[test]
fn verify_paper_quick_is_deterministic() {
    let a = nilcurv(&["verify-paper", "--quick", "--json"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    let r = json(&a);
    assert_eq!(r["failed"], 0);
    assert!(r["checks"].as_array().unwrap().len() >= 20);
    assert_eq!(a.stdout, nilcurv(&["verify-paper", "--quick", "--json"]).stdout);
}

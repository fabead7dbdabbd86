use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pencillab")).args(args).env_remove("PENCILLAB_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn record<'a>(r: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    r["records"].as_array().unwrap().iter().find(|x| x["name"] == name).unwrap()
}

#[test]
fn counterexample_is_almost_compatible_but_not_compatible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["check", "--pair", &fixture("counterexample.pairs"), "--grid", "5", "--box", "-1:1", "--report", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let r = report(&out);
    assert_eq!(record(&r, "almost_compatible")["status"], "holds");
    let c = record(&r, "compatible");
    assert_eq!(c["status"], "fails");
    assert!(c["result"]["witness"]["lambda"].is_object());
    assert!(c["result"]["certificate"].as_str().unwrap().starts_with("probabilistic"));
    assert_eq!(r["status"], "fails");
    assert_eq!(r["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn identity_pair_is_flat() {
    let o = run(&["curvature", "--pair", &fixture("identity.pairs"), "--expect", "flat"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("curvature_g1: flat"));
    let o = run(&["curvature", "--pair", &fixture("identity.pairs"), "--expect", "general"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn two_component_constant_curvature_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.json");
    let o = run(&["family", "--kind", "two_component", "--c", "0.5", "--K", "1", "--grid", "6", "--box", "1.2:2:0:1", "--report", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(&out);
    let g3 = &record(&r, "curvature_G3")["result"];
    assert_eq!(g3["kind"], "constant_curvature");
    assert!((g3["k"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    // c must match the curvature sign
    assert_eq!(code(&run(&["family", "--kind", "two_component", "--c", "0.3", "--K", "1"])), 1);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|k| dir.path().join(format!("{k}.json"))).collect();
    for p in &paths {
        run(&["family", "--pair", &fixture("frobenius.pairs"), "--box", "0.5:1.5", "--report", p.to_str().unwrap()]);
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn input_errors_exit_one_without_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.json");
    let o = out.to_str().unwrap();
    for args in [
        vec!["check", "--pair", &fixture("broken.pairs") as &str, "--report", o],
        vec!["check", "--pair", "/nonexistent/x.pairs", "--report", o],
        vec!["check", "--pair", &fixture("identity.pairs"), "--box", "0:1,0:1,0:1", "--report", o],
        vec!["check", "--pair", &fixture("identity.pairs"), "--tol", "-1", "--report", o],
        vec!["family", "--kind", "frobenius", "--report", o],
        vec!["bogus"],
    ] {
        let r = run(&args);
        assert_eq!(code(&r), 1, "{args:?}: {}", String::from_utf8_lossy(&r.stderr));
        assert!(!out.exists());
    }
    let r = run(&["check", "--pair", &fixture("broken.pairs")]);
    assert!(String::from_utf8_lossy(&r.stderr).contains("g2[1][1]"));
}

#[test]
fn seed_from_environment_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = Command::new(env!("CARGO_BIN_EXE_pencillab"))
        .args(["identities", "--pair", &fixture("counterexample.pairs"), "--seed", "5", "--report", out.to_str().unwrap()])
        .env("PENCILLAB_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(report(&out)["settings"]["seed"], 11);
}

#[test]
fn family_stanzas() {
    for (file, expected) in [
        ("frobenius.pairs", 0),
        ("dubrovin.pairs", 0),
        ("diagonal.pairs", 0),
        ("gpc_sphere.pairs", 0),
        ("vector_potential.pairs", 0),
    ] {
        let o = run(&["family", "--pair", &fixture(file), "--box", "0.5:1.5"]);
        assert_eq!(code(&o), expected, "{file}: {}", String::from_utf8_lossy(&o.stdout));
    }
    // a stanza also serves the pair-level commands
    assert_eq!(code(&run(&["check", "--pair", &fixture("frobenius.pairs"), "--box", "0.5:1.5"])), 0);
    // the Liouville metric against delta is the other counterexample
    assert_eq!(code(&run(&["family", "--kind", "conformal", "--K", "-1", "--box", "-1.5:1.5"])), 2);
}

#[test]
fn eigenvalue_expectations() {
    let p = fixture("identity.pairs");
    assert_eq!(code(&run(&["eigenvalues", "--pair", &p])), 0);
    assert_eq!(code(&run(&["eigenvalues", "--pair", &p, "--expect", "singular"])), 0);
    assert_eq!(code(&run(&["eigenvalues", "--pair", &p, "--expect", "nonsingular"])), 2);
}

mod common;

use std::fs;
use std::path::Path;

use common::{cli, config};
use nehari::manifold::io::write_field;
use serde_json::Value;

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn verify_passes_on_shipped_configs() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["reference.toml", "variable.toml"] {
        let out = tmp.path().join(name);
        assert_eq!(cli(&["verify", "--config", path(&config(name)), "--out", path(&out)]), 0, "{name}");
        let csv = fs::read_to_string(out.join("verify.csv")).unwrap();
        assert!(csv.starts_with("property,seed,lhs,rhs,margin,pass\n"));
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
        assert!(out.join("verify.config.toml").exists());
    }
}

#[test]
fn fault_injection_is_caught() {
    let tmp = tempfile::tempdir().unwrap();
    let code = cli(&[
        "verify",
        "--config",
        path(&config("variable.toml")),
        "--out",
        path(tmp.path()),
        "--fault-inject",
        "r_q=0.5",
    ]);
    assert_eq!(code, 1);
    let csv = fs::read_to_string(tmp.path().join("verify.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("holder,") && l.ends_with(",false")));
}

#[test]
fn bad_configs_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let zero = write_config(
        tmp.path(),
        "[instance]\nsizes = [16]\nmetric = \"identity\"\np = 3.0\nq = 2.0\nbeta = 4.0\n[verify]\ntrials = 0\n",
    );
    assert_eq!(cli(&["verify", "--config", path(&zero), "--out", path(tmp.path())]), 1);
    let broken = write_config(tmp.path(), "[instance\nsizes = [16]\n");
    assert_eq!(cli(&["verify", "--config", path(&broken), "--out", path(tmp.path())]), 1);
    let unknown = write_config(tmp.path(), "colour = 3\n");
    assert_eq!(cli(&["verify", "--config", path(&unknown), "--out", path(tmp.path())]), 1);
}

#[test]
fn solve_writes_reports_and_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("alt");
    assert_eq!(cli(&["solve", "--config", path(&config("alternate.toml")), "--out", path(&out)]), 0);
    for f in ["report_plus.json", "report_minus.json", "u_plus.field", "u_minus.field", "resolved_config.toml"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let minus: Value = serde_json::from_str(&fs::read_to_string(out.join("report_minus.json")).unwrap()).unwrap();
    assert_eq!(minus["status"], "pass");
    assert_eq!(minus["branch"], "minus");
    assert!(minus["report"]["J_value"].as_f64().unwrap() > 0.0);

    let out = tmp.path().join("ref");
    assert_eq!(cli(&["solve", "--config", path(&config("reference.toml")), "--out", path(&out)]), 2);
}

#[test]
fn sweep_has_one_row_per_point() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["sweep", "--config", path(&config("reference.toml")), "--out", path(tmp.path())]), 0);
    let csv = fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert!(tmp.path().join("sweep.config.toml").exists());
}

#[test]
fn project_recovers_golden_ratio() {
    let tmp = tempfile::tempdir().unwrap();
    let lambda = 0.1;
    let (u, mu, a) = common::golden_coefficients(64, lambda);
    let field = tmp.path().join("u.field");
    write_field(&field, &u).unwrap();
    let body = format!(
        "[instance]\nsizes = [64]\nmetric = \"identity\"\np = 3.0\nq = 2.0\nbeta = 4.0\n\
         mu = {mu:e}\na = {a:e}\nlambda = {lambda:e}\n[project]\ntruncate = false\n"
    );
    let cfg = write_config(tmp.path(), &body);
    let out = tmp.path().join("proj");
    assert_eq!(cli(&["project", "--config", path(&cfg), "--out", path(&out), "--field", path(&field)]), 0);
    let doc: Value = serde_json::from_str(&fs::read_to_string(out.join("projection.json")).unwrap()).unwrap();
    let roots = doc["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    let t = roots[0]["t"].as_f64().unwrap();
    assert!((t - (1.0 + 5f64.sqrt()) / 2.0).abs() <= 1e-9, "t = {t}");
    assert_eq!(roots[0]["class"], "minus");
    assert!(out.join("projected_0.field").exists());
}

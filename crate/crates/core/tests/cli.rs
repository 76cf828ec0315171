use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use radial_sobolev::verify::value_f64;
use serde_json::Value;

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radial-sobolev"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn csv_rows(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .skip(2)
        .map(|l| {
            let (r, v) = l.split_once(',').unwrap();
            (r.parse().unwrap(), v.parse().unwrap())
        })
        .collect()
}

const DECAY: &str = r#"
manifold.warp = "hyperbolic"
manifold.R = "inf"
manifold.N = 3

family.0.kind = "gaussian"
family.0.params = [1.0]
family.1.kind = "gaussian"
family.1.params = [0.5]

check.0.kind = "decay_lemma"
check.0.p = 2.0
check.0.grid.points = 64

check.1.kind = "radial_lemma_power"
check.1.manifold.warp = "euclidean"
check.1.manifold.R = 1.0
check.1.p = 2.0
check.1.grid.points = 64

output.csv = true
"#;

#[test]
fn run_writes_report_and_matching_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "decay.toml", DECAY);
    let out = bin(dir.path(), &["run", &cfg, "--out", "rep.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    for key in ["run_meta", "checks"] {
        assert!(report.get(key).is_some());
    }
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    for c in checks {
        for key in ["kind", "params", "verdict", "measured", "worst_case", "grid", "runtime_ms"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }

    let decay = &checks[0];
    let csv = fs::read_to_string(dir.path().join("rep.check0.decay_ratio.csv")).unwrap();
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 64);
    let r = value_f64(&decay["worst_case"]["r"]);
    let ratio = value_f64(&decay["worst_case"]["ratio"]);
    let row = rows.iter().find(|(x, _)| *x == r).expect("worst r on the grid");
    assert_eq!(row.1, ratio);
    assert!(rows.iter().all(|(_, v)| *v <= 1.0));

    let lemma = &checks[1]["worst_case"]["base"];
    let csv = fs::read_to_string(dir.path().join("rep.check1.lemma_ratio.csv")).unwrap();
    let rows = csv_rows(&csv);
    let r = value_f64(&lemma["r"]);
    let row = rows.iter().find(|(x, _)| *x == r).expect("worst r on the grid");
    assert_eq!(row.1, value_f64(&lemma["sup"]));
}

#[test]
fn dump_matches_report_worst_case() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "decay.toml", DECAY);
    assert_eq!(bin(dir.path(), &["run", &cfg, "--out", "rep.json"]).status.code(), Some(0));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    let worst = &report["checks"][0]["worst_case"];
    let family = ["gaussian(1)", "gaussian(0.5)"]
        .iter()
        .position(|f| worst["family"] == *f)
        .unwrap()
        .to_string();
    let out = bin(dir.path(), &["dump", "decay_ratio", &cfg, "--check", "0", "--family", &family]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# quantity=decay_ratio"));
    assert_eq!(text.lines().nth(1), Some("r,decay_ratio"));
    let rows = csv_rows(&text);
    let r = value_f64(&worst["r"]);
    assert_eq!(rows.iter().find(|(x, _)| *x == r).unwrap().1, value_f64(&worst["ratio"]));
}

#[test]
fn dump_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        r#"
manifold.warp = "tanh_cap"
manifold.R = 1.0
manifold.N = 2
family.0.kind = "linear"
check.0.kind = "counterexample"
check.0.k = 3
check.0.p = 2.0
check.0.grid.r_min = 1e-4
check.1.kind = "identity"
check.1.k = 2
"#,
    );
    let out = bin(dir.path(), &["dump", "integrand", &cfg, "--check", "0", "--out", "i.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&fs::read_to_string(dir.path().join("i.csv")).unwrap());
    let (r, v) = rows[0];
    assert!(((v * r.powi(3)) - 1.0).abs() < 1e-6, "r^3 φ^-3 = {}", v * r.powi(3));

    let out = bin(dir.path(), &["dump", "norm_profile", &cfg, "--check", "1", "--j", "0", "--grid", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|(r, v)| r == v));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let guard = write(
        dir.path(),
        "guard.toml",
        "manifold.warp = \"euclidean\"\nmanifold.R = 1.0\nmanifold.N = 3\ncheck.0.kind = \"radial_lemma_power\"\ncheck.0.k = 2\ncheck.0.p = 2.0\n",
    );
    let out = bin(dir.path(), &["run", &guard]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert!(!dir.path().join("report.json").exists());

    let unknown = write(dir.path(), "unknown.toml", "manifold.warp = \"saddle\"\nmanifold.N = 3\ncheck.0.kind = \"identity\"\n");
    assert_eq!(bin(dir.path(), &["run", &unknown]).status.code(), Some(2));
    assert_eq!(bin(dir.path(), &["run", "missing.toml"]).status.code(), Some(2));

    let counter = write(
        dir.path(),
        "counter.toml",
        "manifold.warp = \"euclidean\"\nmanifold.R = 1.0\nmanifold.N = 4\ncheck.0.kind = \"counterexample\"\ncheck.0.k = 2\ncheck.0.p = 2.0\n",
    );
    assert_eq!(bin(dir.path(), &["run", &counter]).status.code(), Some(2));

    // only concentrating profiles approach the p = 1 supremum
    let unstable = write(
        dir.path(),
        "unstable.toml",
        r#"
manifold.warp = "spherical"
manifold.R = 2.0
manifold.N = 3
check.0.kind = "radial_lemma_power"
check.0.k = 1
check.0.p = 1.0
check.0.families = [0, 1, 2, 4]
check.0.grid.points = 32
family.0.kind = "gaussian"
family.0.params = [1.0]
family.1.kind = "power_decay"
family.1.params = [2.0]
family.2.kind = "polynomial_bump"
family.2.params = [0.4, 0.9, 1.0, 0.5, -0.25]
family.3.kind = "log_profile"
family.3.params = [2.0, 0.1]
family.4.kind = "linear"
"#,
    );
    let out = bin(dir.path(), &["run", &unstable, "--out", "u.json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("u.json")).unwrap()).unwrap();
    assert_eq!(report["checks"][0]["verdict"], "fail");
}

#[test]
fn diagnostic_mode_is_flagged_not_judged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "diag.toml",
        r#"
manifold.warp = "euclidean"
manifold.R = 1.0
manifold.N = 3
family.0.kind = "gaussian"
family.0.params = [1.0]
check.0.kind = "embedding_ratio"
check.0.q = 12.0
check.0.diagnostic = true
"#,
    );
    let out = bin(dir.path(), &["run", &cfg, "--out", "d.json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("d.json")).unwrap()).unwrap();
    assert_eq!(report["checks"][0]["verdict"], "diagnostic");
    assert_eq!(report["run_meta"]["diagnostic"], 1);
}

#[test]
fn overrides_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "o.toml",
        "manifold.warp = \"hyperbolic\"\nmanifold.N = 3\ncheck.0.kind = \"identity\"\ncheck.0.k = 2\n",
    );
    let out = bin(dir.path(), &["run", &cfg, "--grid", "8", "--tol", "1e-9", "--out", "o.json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o.json")).unwrap()).unwrap();
    assert_eq!(report["checks"][0]["grid"]["points"], 8);
    assert_eq!(value_f64(&report["checks"][0]["grid"]["tol"]), 1e-9);
    assert_eq!(value_f64(&report["run_meta"]["overrides"]["tol"]), 1e-9);
}

#[test]
fn worker_env_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "w.toml",
        "manifold.warp = \"euclidean\"\nmanifold.N = 2\ncheck.0.kind = \"identity\"\ncheck.0.grid.points = 4\n",
    );
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_radial-sobolev"))
            .args(["run", &cfg, "--out", "w.json"])
            .env("RADSOB_WORKERS", workers)
            .current_dir(dir.path())
            .status()
            .unwrap()
            .code()
    };
    assert_eq!(run("2"), Some(0));
    assert_eq!(run("zero"), Some(2));
}

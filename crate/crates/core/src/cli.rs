//! Configuration-driven front end: runs check suites into JSON reports and
//! dumps curves as CSV.
//!
//! Config files are TOML with dotted keys:
//!
//! ```toml
//! manifold.warp = "hyperbolic"      # or a coefficient list for an odd series
//! manifold.R = "inf"
//! manifold.N = 3
//!
//! family.0.kind = "gaussian"
//! family.0.params = [1.0]
//!
//! check.0.kind = "identity"
//! check.0.k = 3
//! check.0.sweep.N = [2, 3, 4]       # expands into one check per value
//! check.0.grid.points = 128
//!
//! output.report = "report.json"
//! output.csv = true
//! ```

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;
use toml::Table;

use crate::funcspace::{Family, RadialFunction};
use crate::manifold::{ManifoldSpec, WarpKind, WarpSpec};
use crate::quadrature::{QuadConfig, MIN_TOL};
use crate::verify::{
    counterexample_integrand_curve, decay_ratio_curve, default_families, lemma_ratio_curve, norm_profile_curve, num,
    run_checks, CheckKind, CheckReport, CheckSpec, EmbeddingSpace, Verdict, VerifyError,
};

pub const WORKERS_ENV: &str = "RADSOB_WORKERS";
pub const DEFAULT_REPORT: &str = "report.json";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

/// A parsed configuration: the expanded check list and output settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub checks: Vec<CheckSpec>,
    pub report: Option<PathBuf>,
    pub csv: bool,
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub grid: Option<usize>,
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(tol) = o.tol {
            if !(tol.is_finite() && tol >= MIN_TOL) {
                return config_err(format!("--tol {tol} must be ≥ {MIN_TOL}"));
            }
            for c in &mut self.checks {
                c.quad.tol = tol;
            }
        }
        if let Some(points) = o.grid {
            if points < 2 {
                return config_err("--grid must be ≥ 2");
            }
            for c in &mut self.checks {
                c.grid.points = points;
            }
        }
        Ok(())
    }

    /// Rejects inadmissible checks before anything runs.
    pub fn validate(&self) -> Result<(), CliError> {
        for (i, c) in self.checks.iter().enumerate() {
            c.validate().map_err(|e| CliError::Config(format!("check {i} ({}): {e}", c.kind)))?;
        }
        Ok(())
    }
}

// ------------------------------------------------------------------ parsing

fn as_f64(v: &toml::Value, key: &str) -> Result<f64, CliError> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        toml::Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        _ => config_err(format!("`{key}` must be a number")),
    }
}

fn as_usize(v: &toml::Value, key: &str) -> Result<usize, CliError> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => config_err(format!("`{key}` must be a non-negative integer")),
    }
}

fn as_str<'a>(v: &'a toml::Value, key: &str) -> Result<&'a str, CliError> {
    v.as_str().ok_or_else(|| CliError::Config(format!("`{key}` must be a string")))
}

fn as_table<'a>(v: &'a toml::Value, key: &str) -> Result<&'a Table, CliError> {
    v.as_table().ok_or_else(|| CliError::Config(format!("`{key}` must be a section")))
}

fn as_list<'a>(v: &'a toml::Value, key: &str) -> Result<&'a Vec<toml::Value>, CliError> {
    v.as_array().ok_or_else(|| CliError::Config(format!("`{key}` must be a list")))
}

fn f64_list(v: &toml::Value, key: &str) -> Result<Vec<f64>, CliError> {
    as_list(v, key)?.iter().map(|x| as_f64(x, key)).collect()
}

/// Entries of a section keyed `0, 1, 2, ...`, in numeric order.
fn indexed<'a>(t: &'a Table, section: &str) -> Result<Vec<(usize, &'a Table)>, CliError> {
    let mut out = Vec::new();
    for (k, v) in t {
        let i: usize = k
            .parse()
            .map_err(|_| CliError::Config(format!("`{section}.{k}`: entries must be numbered")))?;
        out.push((i, as_table(v, &format!("{section}.{k}"))?));
    }
    out.sort_by_key(|(i, _)| *i);
    Ok(out)
}

fn reject_unknown(t: &Table, allowed: &[&str], prefix: &str) -> Result<(), CliError> {
    match t.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => config_err(format!("unknown key `{prefix}.{k}`")),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Default)]
struct ManifoldDraft {
    warp: Option<WarpKind>,
    radius: Option<f64>,
    dim: Option<usize>,
}

impl ManifoldDraft {
    fn merge(&self, t: &Table, prefix: &str) -> Result<ManifoldDraft, CliError> {
        reject_unknown(t, &["warp", "R", "N", "coefficients"], prefix)?;
        let mut out = self.clone();
        if let Some(w) = t.get("warp") {
            out.warp = Some(parse_warp(w, t.get("coefficients"), prefix)?);
            if t.get("R").is_none() {
                out.radius = None;
            }
        }
        if let Some(r) = t.get("R") {
            out.radius = Some(as_f64(r, &format!("{prefix}.R"))?);
        }
        if let Some(n) = t.get("N") {
            out.dim = Some(as_usize(n, &format!("{prefix}.N"))?);
        }
        Ok(out)
    }

    fn build(&self, prefix: &str) -> Result<ManifoldSpec, CliError> {
        let kind = match &self.warp {
            Some(k) => k.clone(),
            None => return config_err(format!("{prefix}: missing `manifold.warp`")),
        };
        let dim = match self.dim {
            Some(n) => n,
            None => return config_err(format!("{prefix}: missing `manifold.N`")),
        };
        let radius = self.radius.unwrap_or_else(|| kind.default_radius());
        let warp = WarpSpec::new(kind, radius).map_err(|e| CliError::Config(format!("{prefix}: {e}")))?;
        ManifoldSpec::new(warp, dim).map_err(|e| CliError::Config(format!("{prefix}: {e}")))
    }
}

fn parse_warp(v: &toml::Value, coefficients: Option<&toml::Value>, prefix: &str) -> Result<WarpKind, CliError> {
    match v {
        toml::Value::Array(_) => Ok(WarpKind::CustomOdd(f64_list(v, &format!("{prefix}.warp"))?)),
        toml::Value::String(s) if s == "custom_odd_series" => match coefficients {
            Some(c) => Ok(WarpKind::CustomOdd(f64_list(c, &format!("{prefix}.coefficients"))?)),
            None => config_err(format!("{prefix}: custom_odd_series needs `coefficients`")),
        },
        toml::Value::String(s) => {
            WarpKind::from_tag(s).ok_or_else(|| CliError::Config(format!("{prefix}: unknown warp `{s}`")))
        }
        _ => config_err(format!("`{prefix}.warp` must be a tag or a coefficient list")),
    }
}

fn parse_family(t: &Table, prefix: &str) -> Result<RadialFunction, CliError> {
    reject_unknown(t, &["kind", "params", "scale"], prefix)?;
    let tag = as_str(
        t.get("kind").ok_or_else(|| CliError::Config(format!("{prefix}: missing `kind`")))?,
        &format!("{prefix}.kind"),
    )?;
    let params = match t.get("params") {
        Some(p) => f64_list(p, &format!("{prefix}.params"))?,
        None => Vec::new(),
    };
    let family = Family::from_tag(tag, &params).map_err(|e| CliError::Config(format!("{prefix}: {e}")))?;
    let scale = match t.get("scale") {
        Some(s) => as_f64(s, &format!("{prefix}.scale"))?,
        None => 1.0,
    };
    if !(scale.is_finite() && scale > 0.0) {
        return config_err(format!("{prefix}: scale must be positive"));
    }
    Ok(RadialFunction::new(family).scaled(scale))
}

const CHECK_KEYS: &[&str] = &[
    "kind",
    "k",
    "p",
    "q",
    "theta",
    "j",
    "space",
    "diagnostic",
    "families",
    "grid",
    "tol",
    "panel_budget",
    "manifold",
    "sweep",
];

/// Sweep axes, expanded in this nesting order.
const SWEEP_KEYS: &[&str] = &["warp", "N", "k", "p", "q", "theta"];

fn parse_check(
    t: &Table,
    prefix: &str,
    manifold: &ManifoldDraft,
    families: &[RadialFunction],
) -> Result<Vec<CheckSpec>, CliError> {
    reject_unknown(t, CHECK_KEYS, prefix)?;
    let key = |k: &str| format!("{prefix}.{k}");
    let tag = as_str(
        t.get("kind").ok_or_else(|| CliError::Config(format!("{prefix}: missing `kind`")))?,
        &key("kind"),
    )?;
    let kind = CheckKind::from_tag(tag).ok_or_else(|| CliError::Config(format!("{prefix}: unknown check `{tag}`")))?;
    let draft = match t.get("manifold") {
        Some(m) => manifold.merge(as_table(m, &key("manifold"))?, &key("manifold"))?,
        None => manifold.clone(),
    };
    let fams = match t.get("families") {
        Some(list) => as_list(list, &key("families"))?
            .iter()
            .map(|i| {
                let i = as_usize(i, &key("families"))?;
                families
                    .get(i)
                    .cloned()
                    .ok_or_else(|| CliError::Config(format!("{prefix}: no family {i}")))
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => families.to_vec(),
    };

    let base = |m: ManifoldSpec| -> Result<CheckSpec, CliError> {
        let mut spec = CheckSpec::new(kind, m).with_families(fams.clone());
        if let Some(v) = t.get("k") {
            spec.k = as_usize(v, &key("k"))?;
        }
        if let Some(v) = t.get("p") {
            spec.p = as_f64(v, &key("p"))?;
        }
        if let Some(v) = t.get("q") {
            spec.q = Some(as_f64(v, &key("q"))?);
        }
        if let Some(v) = t.get("theta") {
            spec.theta = as_f64(v, &key("theta"))?;
        }
        if let Some(v) = t.get("j") {
            spec.j = Some(as_usize(v, &key("j"))?);
        }
        if let Some(v) = t.get("space") {
            spec.space = match as_str(v, &key("space"))? {
                "manifold" => EmbeddingSpace::Manifold,
                "interval" => EmbeddingSpace::Interval,
                other => return config_err(format!("{prefix}: unknown space `{other}`")),
            };
        }
        if let Some(v) = t.get("diagnostic") {
            spec.diagnostic = v
                .as_bool()
                .ok_or_else(|| CliError::Config(format!("`{}` must be a boolean", key("diagnostic"))))?;
        }
        if let Some(g) = t.get("grid") {
            let g = as_table(g, &key("grid"))?;
            reject_unknown(g, &["points", "r_min", "r_max"], &key("grid"))?;
            if let Some(v) = g.get("points") {
                spec.grid.points = as_usize(v, &key("grid.points"))?;
            }
            if let Some(v) = g.get("r_min") {
                spec.grid.r_min = Some(as_f64(v, &key("grid.r_min"))?);
            }
            if let Some(v) = g.get("r_max") {
                spec.grid.r_max = Some(as_f64(v, &key("grid.r_max"))?);
            }
        }
        let mut quad = QuadConfig::default();
        if let Some(v) = t.get("tol") {
            quad.tol = as_f64(v, &key("tol"))?;
        }
        if let Some(v) = t.get("panel_budget") {
            quad.panel_budget = as_usize(v, &key("panel_budget"))?;
        }
        if !(quad.tol.is_finite() && quad.tol >= MIN_TOL) || quad.panel_budget == 0 {
            return config_err(format!("{prefix}: tol must be ≥ {MIN_TOL} and panel_budget positive"));
        }
        spec.quad = quad;
        Ok(spec)
    };

    let sweep = match t.get("sweep") {
        Some(s) => {
            let s = as_table(s, &key("sweep"))?;
            reject_unknown(s, SWEEP_KEYS, &key("sweep"))?;
            Some(s)
        }
        None => None,
    };
    let axis = |name: &str| sweep.and_then(|s| s.get(name));

    let mut drafts = vec![draft];
    if let Some(ws) = axis("warp") {
        let mut next = Vec::new();
        for d in &drafts {
            for w in as_list(ws, &key("sweep.warp"))? {
                let mut d = d.clone();
                d.warp = Some(parse_warp(w, None, &key("sweep"))?);
                d.radius = None;
                next.push(d);
            }
        }
        drafts = next;
    }
    if let Some(ns) = axis("N") {
        let mut next = Vec::new();
        for d in &drafts {
            for n in as_list(ns, &key("sweep.N"))? {
                let mut d = d.clone();
                d.dim = Some(as_usize(n, &key("sweep.N"))?);
                next.push(d);
            }
        }
        drafts = next;
    }
    let mut specs = Vec::new();
    for d in &drafts {
        specs.push(base(d.build(prefix)?)?);
    }
    for name in ["k", "p", "q", "theta"] {
        let Some(values) = axis(name) else { continue };
        let values = as_list(values, &key(&format!("sweep.{name}")))?;
        let mut next = Vec::new();
        for s in &specs {
            for v in values {
                let mut s = s.clone();
                let label = key(&format!("sweep.{name}"));
                match name {
                    "k" => s.k = as_usize(v, &label)?,
                    "p" => s.p = as_f64(v, &label)?,
                    "q" => s.q = Some(as_f64(v, &label)?),
                    _ => s.theta = as_f64(v, &label)?,
                }
                next.push(s);
            }
        }
        specs = next;
    }
    Ok(specs)
}

/// Parses config text into an expanded check list.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
    reject_unknown(&root, &["manifold", "family", "check", "output"], "")
        .map_err(|_| CliError::Config("unknown top-level section".into()))?;
    let manifold = match root.get("manifold") {
        Some(m) => ManifoldDraft::default().merge(as_table(m, "manifold")?, "manifold")?,
        None => ManifoldDraft::default(),
    };
    let families = match root.get("family") {
        Some(f) => indexed(as_table(f, "family")?, "family")?
            .into_iter()
            .map(|(i, t)| parse_family(t, &format!("family.{i}")))
            .collect::<Result<Vec<_>, _>>()?,
        None => default_families(),
    };
    let mut checks = Vec::new();
    match root.get("check") {
        Some(c) => {
            for (i, t) in indexed(as_table(c, "check")?, "check")? {
                checks.extend(parse_check(t, &format!("check.{i}"), &manifold, &families)?);
            }
        }
        None => return config_err("no checks configured"),
    }
    if checks.is_empty() {
        return config_err("no checks configured");
    }
    let (mut report, mut csv) = (None, false);
    if let Some(o) = root.get("output") {
        let o = as_table(o, "output")?;
        reject_unknown(o, &["report", "csv"], "output")?;
        if let Some(r) = o.get("report") {
            report = Some(PathBuf::from(as_str(r, "output.report")?));
        }
        if let Some(c) = o.get("csv") {
            csv = c
                .as_bool()
                .ok_or_else(|| CliError::Config("`output.csv` must be a boolean".into()))?;
        }
    }
    Ok(RunConfig { checks, report, csv })
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

// ------------------------------------------------------------------- report

/// Assembles the report document from finished check entries.
pub fn build_report(entries: &[CheckReport], config: &Path, overrides: &Overrides, timestamp: &str) -> Value {
    let count = |v: Verdict| entries.iter().filter(|e| e.verdict == v).count();
    let mut meta = Map::new();
    meta.insert("tool".into(), json!(env!("CARGO_PKG_NAME")));
    meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    meta.insert("timestamp".into(), json!(timestamp));
    meta.insert("config".into(), json!(config.display().to_string()));
    meta.insert(
        "overrides".into(),
        json!({
            "tol": overrides.tol.map_or(Value::Null, num),
            "grid": overrides.grid.map_or(Value::Null, |g| json!(g)),
        }),
    );
    meta.insert("checks".into(), json!(entries.len()));
    meta.insert("passed".into(), json!(count(Verdict::Pass)));
    meta.insert("failed".into(), json!(count(Verdict::Fail)));
    meta.insert("diagnostic".into(), json!(count(Verdict::Diagnostic)));
    json!({
        "run_meta": Value::Object(meta),
        "checks": entries.iter().map(|e| e.to_json(true)).collect::<Vec<_>>(),
    })
}

/// Exit code for a finished run.
pub fn exit_code(entries: &[CheckReport]) -> i32 {
    if entries.iter().all(|e| e.passed()) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Runs every configured check and writes the report; returns the exit code.
pub fn run(config_path: &Path, overrides: &Overrides, out: Option<&Path>) -> Result<i32, CliError> {
    let mut config = load_config(config_path)?;
    config.apply(overrides)?;
    config.validate()?;
    let entries = run_checks(&config.checks).into_iter().collect::<Result<Vec<_>, _>>()?;
    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
    let report = build_report(&entries, config_path, overrides, &timestamp);
    let path = out
        .map(Path::to_path_buf)
        .or_else(|| config.report.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_REPORT));
    write_file(&path, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    if config.csv {
        for (i, (spec, entry)) in config.checks.iter().zip(&entries).enumerate() {
            if let Some((quantity, family)) = default_curve(spec, entry) {
                let csv = dump_curve(quantity, spec, i, family, None)?;
                write_file(&csv_path(&path, i, quantity), &csv)?;
            }
        }
    }
    Ok(exit_code(&entries))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `<report stem>.check<i>.<quantity>.csv` next to the report.
pub fn csv_path(report: &Path, index: usize, quantity: Quantity) -> PathBuf {
    let stem = report.file_stem().map_or_else(|| "report".into(), |s| s.to_string_lossy().into_owned());
    report.with_file_name(format!("{stem}.check{index}.{}.csv", quantity.tag()))
}

// ------------------------------------------------------------------- curves

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    NormProfile,
    DecayRatio,
    LemmaRatio,
    Integrand,
}

impl Quantity {
    pub fn tag(&self) -> &'static str {
        match self {
            Quantity::NormProfile => "norm_profile",
            Quantity::DecayRatio => "decay_ratio",
            Quantity::LemmaRatio => "lemma_ratio",
            Quantity::Integrand => "integrand",
        }
    }
}

/// Curve written for a check when CSV output is on, with the family index
/// of its worst case.
pub fn default_curve(spec: &CheckSpec, entry: &CheckReport) -> Option<(Quantity, usize)> {
    let worst = &entry.worst_case;
    let family = worst["family"].as_str().or_else(|| worst["base"]["family"].as_str());
    let index = family
        .and_then(|f| spec.families.iter().position(|v| v.to_string() == f))
        .unwrap_or(0);
    match spec.kind {
        CheckKind::Identity | CheckKind::GradientInequality => Some((Quantity::NormProfile, index)),
        CheckKind::DecayLemma => Some((Quantity::DecayRatio, index)),
        CheckKind::RadialLemmaPower | CheckKind::RadialLemmaLog => Some((Quantity::LemmaRatio, index)),
        CheckKind::Counterexample => Some((Quantity::Integrand, 0)),
        _ => None,
    }
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        x.to_string()
    }
}

/// Samples `quantity` on the check's grid as CSV: a `#` parameter line,
/// the column header `r,<quantity>`, then one row per grid point.
pub fn dump_curve(
    quantity: Quantity,
    spec: &CheckSpec,
    check_index: usize,
    family: usize,
    j: Option<usize>,
) -> Result<String, CliError> {
    let grid = spec.grid.resolve(spec.manifold.warp.radius())?;
    let needs_family = !(quantity == Quantity::Integrand && spec.kind == CheckKind::Counterexample);
    let v = if needs_family {
        spec.families
            .get(family)
            .ok_or_else(|| CliError::Config(format!("check {check_index} has no family {family}")))?
            .clone()
    } else {
        RadialFunction::linear()
    };
    let m = &spec.manifold;
    let rows: Vec<(f64, f64)> = match quantity {
        Quantity::NormProfile => norm_profile_curve(m, &v, j.unwrap_or(spec.k), &grid)?,
        Quantity::DecayRatio => {
            if spec.kind != CheckKind::DecayLemma {
                return config_err("decay_ratio needs a decay_lemma check");
            }
            spec.validate()?;
            decay_ratio_curve(spec, &v, &grid)?
        }
        Quantity::LemmaRatio => {
            if !matches!(spec.kind, CheckKind::RadialLemmaPower | CheckKind::RadialLemmaLog) {
                return config_err("lemma_ratio needs a radial lemma check");
            }
            spec.validate()?;
            lemma_ratio_curve(spec, &v, &grid)?
                .ok_or_else(|| CliError::Config(format!("{v} has infinite Sobolev norm")))?
        }
        Quantity::Integrand => {
            if spec.kind == CheckKind::Counterexample {
                counterexample_integrand_curve(spec, &grid)
            } else {
                let w = &m.warp;
                let n = spec.n() as f64;
                grid.iter()
                    .map(|&r| {
                        let d = v.derivatives(r, spec.k).map_err(VerifyError::from)?;
                        Ok((r, d[spec.k].abs().powf(spec.p) * w.eval(r).powf(n - 1.0)))
                    })
                    .collect::<Result<Vec<_>, VerifyError>>()?
            }
        }
    };
    let mut out = String::new();
    let _ = write!(
        out,
        "# quantity={} check={} kind={} warp={} R={} N={} k={} p={}",
        quantity.tag(),
        check_index,
        spec.kind,
        m.warp.kind().tag(),
        m.warp.radius(),
        spec.n(),
        spec.k,
        spec.p
    );
    if needs_family {
        let _ = write!(out, " family={v}");
    }
    if quantity == Quantity::NormProfile {
        let _ = write!(out, " j={}", j.unwrap_or(spec.k));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "r,{}", quantity.tag());
    for (r, x) in rows {
        let _ = writeln!(out, "{},{}", fmt_f64(r), fmt_f64(x));
    }
    Ok(out)
}

// ---------------------------------------------------------------- arguments

#[derive(Debug, Parser)]
#[command(name = "radial-sobolev", version, about = "Numerical checks for radial Sobolev inequalities")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
    /// Relative quadrature tolerance for every check
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Number of r-grid points for every check
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Output path (report for `run`, CSV for `dump`)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every check in a config and write the JSON report
    Run { config: PathBuf },
    /// Write one curve of one check as CSV
    Dump {
        quantity: Quantity,
        config: PathBuf,
        /// Index into the expanded check list
        #[arg(long, default_value_t = 0)]
        check: usize,
        /// Index into the check's family list
        #[arg(long, default_value_t = 0)]
        family: usize,
        /// Derivative order for norm_profile (defaults to the check's k)
        #[arg(long)]
        j: Option<usize>,
    },
}

fn dump(args: &Args, quantity: Quantity, config: &Path, check: usize, family: usize, j: Option<usize>) -> Result<i32, CliError> {
    let mut cfg = load_config(config)?;
    cfg.apply(&Overrides {
        tol: args.tol,
        grid: args.grid,
    })?;
    let spec = cfg
        .checks
        .get(check)
        .ok_or_else(|| CliError::Config(format!("no check {check} (config expands to {})", cfg.checks.len())))?;
    let csv = dump_curve(quantity, spec, check, family, j)?;
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(EXIT_PASS)
}

/// Sizes the global worker pool from the environment.
pub fn init_workers() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV}={raw} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let result = init_workers().and_then(|_| match &args.command {
        Command::Run { config } => run(
            config,
            &Overrides {
                tol: args.tol,
                grid: args.grid,
            },
            args.out.as_deref(),
        ),
        Command::Dump {
            quantity,
            config,
            check,
            family,
            j,
        } => dump(&args, *quantity, config, *check, *family, *j),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("radial-sobolev: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
manifold.warp = "hyperbolic"
manifold.R = "inf"
manifold.N = 3

family.0.kind = "gaussian"
family.0.params = [1.0]
family.1.kind = "linear"

check.0.kind = "identity"
check.0.k = 2
check.0.sweep.N = [2, 3]
check.0.grid.points = 8

check.1.kind = "asymptotic_leading"
check.1.k = 3
check.1.manifold.warp = "euclidean"
"#;

    #[test]
    fn parses_and_expands() {
        let c = parse_config(SMALL).unwrap();
        assert_eq!(c.checks.len(), 3);
        assert_eq!(c.checks[0].n(), 2);
        assert_eq!(c.checks[1].n(), 3);
        assert_eq!(c.checks[0].families.len(), 2);
        assert_eq!(c.checks[2].manifold.warp.kind(), &WarpKind::Euclidean);
        assert!(!c.checks[2].manifold.warp.is_bounded());
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            "manifold.warp = \"saddle\"\nmanifold.N = 3\ncheck.0.kind = \"identity\"",
            "manifold.warp = \"euclidean\"\nmanifold.N = 3\ncheck.0.kind = \"compactness\"",
            "manifold.warp = \"euclidean\"\nmanifold.N = 3\ncheck.0.kind = \"identity\"\ncheck.0.typo = 1",
            "manifold.warp = \"euclidean\"\nmanifold.N = 3",
            "manifold.warp = \"euclidean\"\ncheck.0.kind = \"identity\"",
            "check.x.kind = \"identity\"",
        ] {
            assert!(parse_config(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn custom_warp_from_list() {
        let c = parse_config("manifold.warp = [1.0, 0.1]\nmanifold.R = 2.0\nmanifold.N = 3\ncheck.0.kind = \"identity\"")
            .unwrap();
        assert_eq!(c.checks[0].manifold.warp.kind(), &WarpKind::CustomOdd(vec![1.0, 0.1]));
    }

    #[test]
    fn inadmissible_is_config_error() {
        let c = parse_config(
            "manifold.warp = \"euclidean\"\nmanifold.R = 1.0\nmanifold.N = 3\ncheck.0.kind = \"radial_lemma_power\"\ncheck.0.k = 2\ncheck.0.p = 2",
        )
        .unwrap();
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn linear_norm_profile_is_r() {
        let c = parse_config(SMALL).unwrap();
        let csv = dump_curve(Quantity::NormProfile, &c.checks[0], 0, 1, Some(0)).unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# quantity=norm_profile"));
        assert_eq!(lines.next(), Some("r,norm_profile"));
        for line in lines {
            let (r, v) = line.split_once(',').unwrap();
            assert_eq!(r.parse::<f64>().unwrap(), v.parse::<f64>().unwrap());
        }
    }
}

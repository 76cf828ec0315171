//! Quantified numerical checks of the radial-reduction identities and the
//! inequalities built on them, with structured report entries.
//!
//! Every empirical constant is a supremum over a family set and an
//! `r`-grid. A constant counts as finite when re-running with twice the
//! grid density and the family set extended by its concentrated
//! refinements moves it by at most 1%.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::funcspace::{
    critical_exponent, manifold_seminorm_integral, seminorm_integral, sobolev_norm_1d, sobolev_norm_manifold,
    FuncError, NormValue, RadialFunction,
};
use crate::geometry::{asymptotic_leading_ratio, covariant_frame, GeometryError, MAX_RANK, MIN_RADIUS};
use crate::manifold::{log_spaced, ManifoldError, ManifoldSpec, WarpKind};
use crate::quadrature::{divergence_probe, GrowthLaw, Integrand, QuadConfig, QuadError};

pub const IDENTITY_TOL: f64 = 1e-8;
pub const GRADIENT_TOL: f64 = 1e-10;
pub const K1_TOL: f64 = 1e-8;
pub const DECAY_TOL: f64 = 1e-6;
pub const STABILITY_TOL: f64 = 0.01;
pub const TERM_INCLUSION_TOL: f64 = 1e-10;
pub const SLOPE_TOL: f64 = 0.02;
pub const ASYMPTOTIC_TOL: f64 = 0.01;
pub const C_PHI_GRID: usize = 1024;

/// Upper end of the default `r`-grid when `R = ∞`.
pub const DEFAULT_UNBOUNDED_R_MAX: f64 = 8.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("inadmissible check parameters: {0}")]
    Inadmissible(String),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

fn inadmissible<T>(msg: impl Into<String>) -> Result<T, VerifyError> {
    Err(VerifyError::Inadmissible(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckKind {
    Identity,
    GradientInequality,
    K1NormEquality,
    RadialLemmaPower,
    RadialLemmaLog,
    DecayLemma,
    Hardy,
    EmbeddingRatio,
    Counterexample,
    AsymptoticLeading,
}

impl CheckKind {
    pub const ALL: [CheckKind; 10] = [
        CheckKind::Identity,
        CheckKind::GradientInequality,
        CheckKind::K1NormEquality,
        CheckKind::RadialLemmaPower,
        CheckKind::RadialLemmaLog,
        CheckKind::DecayLemma,
        CheckKind::Hardy,
        CheckKind::EmbeddingRatio,
        CheckKind::Counterexample,
        CheckKind::AsymptoticLeading,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            CheckKind::Identity => "identity",
            CheckKind::GradientInequality => "gradient_inequality",
            CheckKind::K1NormEquality => "k1_norm_equality",
            CheckKind::RadialLemmaPower => "radial_lemma_power",
            CheckKind::RadialLemmaLog => "radial_lemma_log",
            CheckKind::DecayLemma => "decay_lemma",
            CheckKind::Hardy => "hardy",
            CheckKind::EmbeddingRatio => "embedding_ratio",
            CheckKind::Counterexample => "counterexample",
            CheckKind::AsymptoticLeading => "asymptotic_leading",
        }
    }

    pub fn from_tag(tag: &str) -> Option<CheckKind> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Which norm pair an embedding check compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingSpace {
    /// `L^q_{φ^θ}(M)` against `W^{k,p}(M)`
    Manifold,
    /// `L^q_{φ^θ}(0,R)` against `W^{k,p}((0,R), φ^{N−1})`
    Interval,
}

impl EmbeddingSpace {
    pub fn tag(&self) -> &'static str {
        match self {
            EmbeddingSpace::Manifold => "manifold",
            EmbeddingSpace::Interval => "interval",
        }
    }
}

/// Logarithmic `r`-grid; unset ends take the defaults for the radius.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 256,
            r_min: None,
            r_max: None,
        }
    }
}

impl GridSpec {
    pub fn bounds(&self, radius: f64) -> (f64, f64) {
        let lo = self.r_min.unwrap_or(if radius.is_finite() { (radius / 1e4).max(1e-3) } else { 1e-3 });
        let cap = if radius.is_finite() { 0.999 * radius } else { f64::INFINITY };
        let hi = self.r_max.unwrap_or(if radius.is_finite() { cap } else { DEFAULT_UNBOUNDED_R_MAX }).min(cap);
        (lo, hi)
    }

    pub fn resolve(&self, radius: f64) -> Result<Vec<f64>, VerifyError> {
        let (lo, hi) = self.bounds(radius);
        if self.points < 2 || !(lo >= MIN_RADIUS && lo < hi) {
            return inadmissible(format!("grid [{lo}, {hi}] with {} points", self.points));
        }
        Ok(log_spaced(lo, hi, self.points))
    }

    /// Twice the density on the same range; contains every original point.
    pub fn doubled(&self) -> GridSpec {
        GridSpec {
            points: 2 * self.points - 1,
            ..self.clone()
        }
    }
}

/// One configured check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSpec {
    pub kind: CheckKind,
    pub manifold: ManifoldSpec,
    pub families: Vec<RadialFunction>,
    pub k: usize,
    pub p: f64,
    pub q: Option<f64>,
    pub theta: f64,
    /// Hardy order `j`
    pub j: Option<usize>,
    pub space: EmbeddingSpace,
    pub grid: GridSpec,
    pub quad: QuadConfig,
    /// Out-of-range probing; such runs are reported, never judged.
    pub diagnostic: bool,
}

/// Family set used when a configuration does not name one.
pub fn default_families() -> Vec<RadialFunction> {
    vec![
        RadialFunction::gaussian(1.0),
        RadialFunction::power_decay(2.0),
        RadialFunction::polynomial_bump(vec![1.0, 0.5, -0.25], 0.4, 0.9),
        RadialFunction::log_profile(2.0, 0.1),
        RadialFunction::linear(),
    ]
}

impl CheckSpec {
    pub fn new(kind: CheckKind, manifold: ManifoldSpec) -> Self {
        CheckSpec {
            kind,
            manifold,
            families: default_families(),
            k: 1,
            p: 2.0,
            q: None,
            theta: 0.0,
            j: None,
            space: EmbeddingSpace::Manifold,
            grid: GridSpec::default(),
            quad: QuadConfig::default(),
            diagnostic: false,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_j(mut self, j: usize) -> Self {
        self.j = Some(j);
        self
    }

    pub fn with_space(mut self, space: EmbeddingSpace) -> Self {
        self.space = space;
        self
    }

    pub fn with_families(mut self, families: Vec<RadialFunction>) -> Self {
        self.families = families;
        self
    }

    pub fn with_grid_points(mut self, points: usize) -> Self {
        self.grid.points = points;
        self
    }

    pub fn n(&self) -> usize {
        self.manifold.dim()
    }

    fn nf(&self) -> f64 {
        self.manifold.dim() as f64
    }

    fn kp(&self) -> f64 {
        self.k as f64 * self.p
    }

    fn radius(&self) -> f64 {
        self.manifold.warp.radius()
    }

    fn require_bounded_regular(&self) -> Result<(), VerifyError> {
        if !self.manifold.warp.is_bounded() {
            return inadmissible(format!("{} needs a finite radius", self.kind));
        }
        if !self.manifold.warp.bounded_near_boundary() {
            return inadmissible(format!("{} needs φ bounded away from 0 and ∞ near R", self.kind));
        }
        Ok(())
    }

    /// Admissible `q` range `(lo, hi, hi_inclusive)` for the embedding check.
    pub fn embedding_range(&self) -> Result<(f64, f64, bool), VerifyError> {
        let (n, kp, p) = (self.nf(), self.kp(), self.p);
        let unbounded = !self.manifold.warp.is_bounded();
        let lo = if unbounded { p } else { 1.0 };
        let critical = (n - kp).abs() < 1e-12;
        if n < kp - 1e-12 || (critical && !unbounded && p <= 1.0) {
            return inadmissible(format!("no embedding range for N = {n}, kp = {kp}"));
        }
        match self.space {
            EmbeddingSpace::Manifold => {
                if self.theta < 0.0 {
                    return inadmissible("θ must be ≥ 0");
                }
                if critical {
                    Ok((lo, f64::INFINITY, false))
                } else {
                    Ok((lo, critical_exponent(self.theta, self.n(), self.k, p).expect("N > kp"), true))
                }
            }
            EmbeddingSpace::Interval => {
                if self.theta < n - kp - 1.0 - 1e-12 {
                    return inadmissible(format!("θ must be ≥ N − kp − 1 = {}", n - kp - 1.0));
                }
                if critical {
                    Ok((lo, f64::INFINITY, false))
                } else {
                    Ok((lo, (self.theta + 1.0) * p / (n - kp), true))
                }
            }
        }
    }

    /// Checks parameter admissibility; `Ok(true)` flags an out-of-range
    /// diagnostic run.
    pub fn validate(&self) -> Result<bool, VerifyError> {
        let (n, kp, p) = (self.nf(), self.kp(), self.p);
        if !(p.is_finite() && p >= 1.0) {
            return inadmissible(format!("p = {p} must be ≥ 1"));
        }
        if self.k > MAX_RANK {
            return inadmissible(format!("k = {} exceeds {MAX_RANK}", self.k));
        }
        let needs_families = !matches!(self.kind, CheckKind::Counterexample | CheckKind::AsymptoticLeading);
        if needs_families && self.families.is_empty() {
            return inadmissible("empty family set");
        }
        let unbounded = !self.manifold.warp.is_bounded();
        match self.kind {
            CheckKind::Identity | CheckKind::GradientInequality => {
                if self.k == 0 {
                    return inadmissible("k must be ≥ 1");
                }
            }
            CheckKind::K1NormEquality => {
                if self.k != 1 {
                    return inadmissible("k1_norm_equality needs k = 1");
                }
                if !self.families.iter().any(|f| tail_certified(f, &self.manifold, p, n - 1.0)) {
                    return inadmissible("no family has a certified tail on this manifold");
                }
            }
            CheckKind::RadialLemmaPower => {
                self.require_bounded_regular()?;
                if n <= kp {
                    return inadmissible(format!("radial_lemma_power needs N > kp (N = {n}, kp = {kp})"));
                }
            }
            CheckKind::RadialLemmaLog => {
                self.require_bounded_regular()?;
                if (n - kp).abs() > 1e-12 || p <= 1.0 {
                    return inadmissible(format!("radial_lemma_log needs N = kp and p > 1 (N = {n}, kp = {kp})"));
                }
            }
            CheckKind::DecayLemma => {
                if !unbounded {
                    return inadmissible("decay_lemma needs R = ∞");
                }
                if self.k != 1 {
                    return inadmissible("decay_lemma needs k = 1");
                }
                if self.manifold.warp.c_phi(C_PHI_GRID).value <= 0.0 {
                    return inadmissible("C_φ estimate is 0");
                }
            }
            CheckKind::Hardy => {
                self.require_bounded_regular()?;
                let j = self.j.unwrap_or(self.k);
                if j > self.k {
                    return inadmissible(format!("hardy order j = {j} exceeds k = {}", self.k));
                }
                if n <= j as f64 * p {
                    return inadmissible(format!("hardy needs N > jp (N = {n}, jp = {})", j as f64 * p));
                }
            }
            CheckKind::EmbeddingRatio => {
                let q = match self.q {
                    Some(q) => q,
                    None => return inadmissible("embedding_ratio needs q"),
                };
                if unbounded && self.manifold.warp.c_phi(C_PHI_GRID).value <= 0.0 {
                    return inadmissible("C_φ estimate is 0");
                }
                if unbounded && self.space == EmbeddingSpace::Manifold && self.k > 1 {
                    return inadmissible("manifold norms on R = ∞ are certified for k ≤ 1 only");
                }
                if unbounded && self.families.iter().any(|f| !f.has_envelope()) {
                    return inadmissible("families without a decay envelope on an unbounded manifold");
                }
                if !unbounded && !self.manifold.warp.bounded_near_boundary() {
                    return inadmissible("embedding needs φ bounded away from 0 and ∞ near R");
                }
                let (lo, hi, inclusive) = self.embedding_range()?;
                let inside = q >= lo && (q < hi || (inclusive && q <= hi * (1.0 + 1e-12)));
                if !inside {
                    if self.diagnostic {
                        return Ok(true);
                    }
                    return inadmissible(format!("q = {q} outside the admissible range [{lo}, {hi}]"));
                }
            }
            CheckKind::Counterexample => {
                if unbounded {
                    return inadmissible("counterexample needs a finite radius");
                }
                if n > (self.k as f64 - 1.0) * p {
                    return inadmissible(format!(
                        "counterexample needs N ≤ (k−1)p (N = {n}, (k−1)p = {})",
                        (self.k as f64 - 1.0) * p
                    ));
                }
            }
            CheckKind::AsymptoticLeading => {
                if !(2..=4).contains(&self.k) {
                    return inadmissible("asymptotic_leading needs k ∈ {2, 3, 4}");
                }
            }
        }
        Ok(false)
    }

    pub fn params_json(&self) -> Value {
        let w = &self.manifold.warp;
        let mut manifold = Map::new();
        manifold.insert("warp".into(), json!(w.kind().tag()));
        if let WarpKind::CustomOdd(c) = w.kind() {
            manifold.insert("coefficients".into(), json!(c));
        }
        manifold.insert("R".into(), num(w.radius()));
        manifold.insert("N".into(), json!(self.n()));
        let mut params = Map::new();
        params.insert("manifold".into(), Value::Object(manifold));
        params.insert("k".into(), json!(self.k));
        params.insert("p".into(), num(self.p));
        params.insert("q".into(), self.q.map_or(Value::Null, num));
        params.insert("theta".into(), num(self.theta));
        params.insert("j".into(), self.j.map_or(Value::Null, |j| json!(j)));
        params.insert("space".into(), json!(self.space.tag()));
        params.insert("diagnostic".into(), json!(self.diagnostic));
        params.insert(
            "families".into(),
            Value::Array(self.families.iter().map(|f| json!(f.to_string())).collect()),
        );
        Value::Object(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Diagnostic,
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Diagnostic => "diagnostic",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One report entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub kind: CheckKind,
    pub params: Value,
    pub verdict: Verdict,
    pub measured: Value,
    pub worst_case: Value,
    pub grid: Value,
    pub runtime_ms: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn to_json(&self, timing: bool) -> Value {
        json!({
            "kind": self.kind.tag(),
            "params": self.params,
            "verdict": self.verdict.tag(),
            "measured": self.measured,
            "worst_case": self.worst_case,
            "grid": self.grid,
            "runtime_ms": if timing { num(self.runtime_ms) } else { json!(0) },
        })
    }

    /// A measured scalar, `NaN` when absent or non-numeric.
    pub fn measured_f64(&self, key: &str) -> f64 {
        value_f64(&self.measured[key])
    }
}

/// JSON number, with non-finite values as the strings `inf`, `-inf`, `nan`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// Inverse of [`num`].
pub fn value_f64(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.as_f64().unwrap_or(f64::NAN),
        Value::String(s) => match s.as_str() {
            "inf" => f64::INFINITY,
            "-inf" => f64::NEG_INFINITY,
            _ => f64::NAN,
        },
        _ => f64::NAN,
    }
}

struct Outcome {
    verdict: Verdict,
    measured: Value,
    worst_case: Value,
    grid: Value,
}

/// Runs one check. Inadmissible parameters are an error; numerical
/// failures during the run become a failing entry.
pub fn run_check(spec: &CheckSpec) -> Result<CheckReport, VerifyError> {
    let diagnostic = spec.validate()?;
    let start = Instant::now();
    let outcome = match spec.kind {
        CheckKind::Identity => check_identity(spec),
        CheckKind::GradientInequality => check_gradient_inequality(spec),
        CheckKind::K1NormEquality => check_k1_norm_equality(spec),
        CheckKind::RadialLemmaPower | CheckKind::RadialLemmaLog => check_radial_lemma(spec),
        CheckKind::DecayLemma => check_decay_lemma(spec),
        CheckKind::Hardy => check_hardy(spec),
        CheckKind::EmbeddingRatio => check_embedding_ratio(spec),
        CheckKind::Counterexample => check_counterexample(spec),
        CheckKind::AsymptoticLeading => check_asymptotic_leading(spec),
    };
    let mut outcome = outcome.unwrap_or_else(|e| Outcome {
        verdict: Verdict::Fail,
        measured: json!({ "error": e.to_string() }),
        worst_case: Value::Null,
        grid: quad_json(spec),
    });
    if diagnostic {
        outcome.verdict = Verdict::Diagnostic;
    }
    Ok(CheckReport {
        kind: spec.kind,
        params: spec.params_json(),
        verdict: outcome.verdict,
        measured: outcome.measured,
        worst_case: outcome.worst_case,
        grid: outcome.grid,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs checks concurrently; the report order follows the input order.
pub fn run_checks(specs: &[CheckSpec]) -> Vec<Result<CheckReport, VerifyError>> {
    specs.par_iter().map(run_check).collect()
}

fn quad_json(spec: &CheckSpec) -> Value {
    json!({ "tol": num(spec.quad.tol), "panel_budget": spec.quad.panel_budget })
}

fn grid_json(spec: &CheckSpec, grid: &GridSpec) -> Value {
    let (lo, hi) = grid.bounds(spec.radius());
    json!({
        "points": grid.points,
        "r_min": num(lo),
        "r_max": num(hi),
        "spacing": "log",
        "tol": num(spec.quad.tol),
        "panel_budget": spec.quad.panel_budget,
    })
}

fn family_pairs<'a>(families: &'a [RadialFunction], grid: &'a [f64]) -> Vec<(&'a RadialFunction, f64)> {
    families.iter().flat_map(|f| grid.iter().map(move |&r| (f, r))).collect()
}

// ---------------------------------------------------------------- identity

fn check_identity(spec: &CheckSpec) -> Result<Outcome, VerifyError> {
    let m = &spec.manifold;
    let grid = spec.grid.resolve(spec.radius())?;
    let k = spec.k;
    let rows: Vec<Result<(f64, Vec<f64>, Vec<f64>), VerifyError>> = family_pairs(&spec.families, &grid)
        .par_iter()
        .map(|&(v, r)| {
            let profile = v.derivatives(r, k)?;
            let frame = covariant_frame(m, &m.default_point(r), &profile, k)?;
            let gaps: Vec<f64> = (1..=k).map(|j| (frame.tensors[j].radial_value() - profile[j]).abs()).collect();
            let rel: Vec<f64> = gaps.iter().zip(&profile[1..]).map(|(g, d)| g / d.abs().max(1.0)).collect();
            Ok((r, gaps, rel))
        })
        .collect();
    let pairs = family_pairs(&spec.families, &grid);
    let mut max_rel = 0.0f64;
    let mut max_abs = 0.0f64;
    let mut by_rank = vec![0.0f64; k];
    let mut worst = Value::Null;
    for (row, &(v, _)) in rows.into_iter().zip(&pairs) {
        let (r, gaps, rel) = row?;
        for (j, (&g, &q)) in gaps.iter().zip(&rel).enumerate() {
            by_rank[j] = by_rank[j].max(q);
            max_abs = max_abs.max(g);
            if q > max_rel || worst.is_null() {
                max_rel = max_rel.max(q);
                worst = json!({ "r": num(r), "family": v.to_string(), "rank": j + 1, "gap": num(g) });
            }
        }
    }
    Ok(Outcome {
        verdict: Verdict::from_bool(max_rel <= IDENTITY_TOL),
        measured: json!({
            "max_relative_gap": num(max_rel),
            "max_abs_gap": num(max_abs),
            "max_relative_gap_by_rank": by_rank.iter().map(|&x| num(x)).collect::<Vec<_>>(),
            "threshold": num(IDENTITY_TOL),
            "evaluations": pairs.len(),
        }),
        worst_case: worst,
        grid: grid_json(spec, &spec.grid),
    })
}

// ------------------------------------------------------ gradient inequality

fn check_gradient_inequality(spec: &CheckSpec) -> Result<Outcome, VerifyError> {
    let m = &spec.manifold;
    let grid = spec.grid.resolve(spec.radius())?;
    let k = spec.k;
    let pairs = family_pairs(&spec.families, &grid);
    let rows: Vec<Result<Vec<(f64, f64)>, VerifyError>> = pairs
        .par_iter()
        .map(|&(v, r)| {
            let profile = v.derivatives(r, k)?;
            let frame = covariant_frame(m, &m.default_point(r), &profile, k)?;
            Ok(frame
                .norms()
                .iter()
                .zip(&profile)
                .map(|(n, d)| {
                    let margin = n - d.abs();
                    (margin, margin / d.abs().max(1.0))
                })
                .collect())
        })
        .collect();
    let mut min_margin = f64::INFINITY;
    let mut min_raw = f64::INFINITY;
    let mut by_rank = vec![f64::INFINITY; k + 1];
    let mut worst = Value::Null;
    for (row, &(v, r)) in rows.into_iter().zip(&pairs) {
        for (j, (raw, scaled)) in row?.into_iter().enumerate() {
            by_rank[j] = by_rank[j].min(scaled);
            min_raw = min_raw.min(raw);
            if scaled < min_margin {
                min_margin = scaled;
                worst = json!({ "r": num(r), "family": v.to_string(), "rank": j, "margin": num(raw) });
            }
        }
    }
    Ok(Outcome {
        verdict: Verdict::from_bool(min_margin >= -GRADIENT_TOL),
        measured: json!({
            "min_margin": num(min_margin),
            "min_raw_margin": num(min_raw),
            "min_margin_by_rank": by_rank.iter().map(|&x| num(x)).collect::<Vec<_>>(),
            "threshold": num(-GRADIENT_TOL),
            "evaluations": pairs.len(),
        }),
        worst_case: worst,
        grid: grid_json(spec, &spec.grid),
    })
}

// --------------------------------------------------------- k = 1 equality

fn finite(n: NormValue, what: &str) -> Result<f64, VerifyError> {
    match n {
        NormValue::Finite(x) => Ok(x),
        NormValue::Infinite => Err(VerifyError::Func(FuncError::Parameter(format!("{what} is infinite")))),
    }
}

fn check_k1_norm_equality(spec: &CheckSpec) -> Result<Outcome, VerifyError> {
    let m = &spec.manifold;
    let (p, theta) = (spec.p, spec.nf() - 1.0);
    let omega = m.sphere_volume();
    let admissible: Vec<&RadialFunction> = spec.families.iter().filter(|v| tail_certified(v, m, p, theta)).collect();
    let rows: Vec<Result<(f64, f64, f64), VerifyError>> = admissible
        .par_iter()
        .map(|v| {
            let mut worst = (0.0, 0.0, 0.0);
            for j in 0..=1 {
                let lhs = finite(manifold_seminorm_integral(v, j, p, m, &spec.quad)?, "manifold seminorm")?.powf(1.0 / p);
                let rhs = (omega * finite(seminorm_integral(v, j, p, theta, &m.warp, &spec.quad)?, "1-D seminorm")?)
                    .powf(1.0 / p);
                let d = if lhs == rhs { 0.0 } else { (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE) };
                if d >= worst.0 || j == 0 {
                    worst = (d, lhs, rhs);
                }
            }
            Ok(worst)
        })
        .collect();
    let mut max_d = 0.0;
    let mut worst = Value::Null;
    for (row, v) in rows.into_iter().zip(&admissible) {
        let (d, lhs, rhs) = row?;
        if d >= max_d || worst.is_null() {
            max_d = d;
            worst = json!({ "family": v.to_string(), "manifold_side": num(lhs), "interval_side": num(rhs) });
        }
    }
    Ok(Outcome {
        verdict: Verdict::from_bool(max_d <= K1_TOL),
        measured: json!({
            "max_relative_discrepancy": num(max_d),
            "threshold": num(K1_TOL),
            "omega": num(omega),
            "families_used": admissible.len(),
            "families_skipped": spec.families.len() - admissible.len(),
        }),
        worst_case: worst,
        grid: quad_json(spec),
    })
}

// ------------------------------------------------------ supremum machinery

/// Supremum of a ratio over families and sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct SupOutcome {
    pub sup: f64,
    pub worst_r: Option<f64>,
    pub worst_family: Option<String>,
    /// families excluded because they are not in the space
    pub skipped_families: usize,
    /// sample points where both sides vanish
    pub skipped_points: usize,
}

/// Ratio samples for one family, or `None` when it is outside the space.
type RatioRows = Option<Vec<(Option<f64>, f64)>>;

fn family_sup<F>(families: &[RadialFunction], ratio: F) -> Result<SupOutcome, VerifyError>
where
    F: Fn(&RadialFunction) -> Result<RatioRows, VerifyError> + Sync,
{
    let rows: Vec<Result<RatioRows, VerifyError>> = families.par_iter().map(|v| ratio(v)).collect();
    let mut out = SupOutcome {
        sup: 0.0,
        worst_r: None,
        worst_family: None,
        skipped_families: 0,
        skipped_points: 0,
    };
    for (row, v) in rows.into_iter().zip(families) {
        match row? {
            None => out.skipped_families += 1,
            Some(samples) => {
                for (r, x) in samples {
                    if x.is_nan() {
                        out.skipped_points += 1;
                    } else if x > out.sup || out.worst_family.is_none() {
                        out.sup = out.sup.max(x);
                        out.worst_r = r;
                        out.worst_family = Some(v.to_string());
                    }
                }
            }
        }
    }
    Ok(out)
}

fn refined_families(families: &[RadialFunction]) -> Vec<RadialFunction> {
    let mut out = families.to_vec();
    for f in families {
        let g = f.refined();
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

fn sup_json(s: &SupOutcome) -> Value {
    json!({
        "sup": num(s.sup),
        "r": s.worst_r.map_or(Value::Null, num),
        "family": s.worst_family.clone().map_or(Value::Null, Value::String),
        "skipped_families": s.skipped_families,
        "skipped_points": s.skipped_points,
    })
}

/// Runs `sup` on the base configuration and on the refined one.
fn stability<F>(spec: &CheckSpec, sup: F) -> Result<Outcome, VerifyError>
where
    F: Fn(&[RadialFunction], &GridSpec) -> Result<SupOutcome, VerifyError>,
{
    let base = sup(&spec.families, &spec.grid)?;
    let refined_grid = spec.grid.doubled();
    let refined = sup(&refined_families(&spec.families), &refined_grid)?;
    let change = if base.sup == refined.sup {
        0.0
    } else {
        (refined.sup - base.sup).abs() / base.sup.abs()
    };
    let ok = base.sup.is_finite() && refined.sup.is_finite() && base.worst_family.is_some() && change <= STABILITY_TOL;
    Ok(Outcome {
        verdict: Verdict::from_bool(ok),
        measured: json!({
            "constant": num(base.sup),
            "refined_constant": num(refined.sup),
            "relative_change": num(change),
            "threshold": num(STABILITY_TOL),
            "skipped_families": base.skipped_families,
            "skipped_points": base.skipped_points,
        }),
        worst_case: json!({ "base": sup_json(&base), "refined": sup_json(&refined) }),
        grid: json!({ "base": grid_json(spec, &spec.grid), "refined": grid_json(spec, &refined_grid) }),
    })
}

// ------------------------------------------------------------ radial lemmas

/// `|v(r)| w(r) / ‖v‖_{W^{k,p}((0,R),φ^{N−1})}` on the grid, where `w` is
/// `φ^{(N−kp)/p}` (power variant) or `1/((log R/r)^{(p−1)/p} + 1)` (log
/// variant). `None` when the norm is infinite.
pub fn lemma_ratio_curve(spec: &CheckSpec, v: &RadialFunction, grid: &[f64]) -> Result<Option<Vec<(f64, f64)>>, VerifyError> {
    let w = &spec.manifold.warp;
    let norm = match sobolev_norm_1d(v, spec.k, spec.p, spec.n(), w, &spec.quad)? {
        NormValue::Finite(x) => x,
        NormValue::Infinite => return Ok(None),
    };
    let (n, kp, p) = (spec.nf(), spec.kp(), spec.p);
    let log_variant = spec.kind == CheckKind::RadialLemmaLog;
    let mut out = Vec::with_capacity(grid.len());
    for &r in grid {
        let value = v.derivatives(r, 0)?[0].abs();
        let weight = if log_variant {
            1.0 / ((w.radius() / r).ln().powf((p - 1.0) / p) + 1.0)
        } else {
            w.eval(r).powf((n - kp) / p)
        };
        let ratio = if value == 0.0 && norm == 0.0 { f64::NAN } else { value * weight / norm };
        out.push((r, ratio));
    }
    Ok(Some(out))
}

fn check_radial_lemma(spec: &CheckSpec) -> Result<Outcome, VerifyError> {
    stability(spec, |families, grid| {
        let points = grid.resolve(spec.radius())?;
        family_sup(families, |v| {
            Ok(lemma_ratio_curve(spec, v, &points)?.map(|c| c.into_iter().map(|(r, x)| (Some(r), x)).collect()))
        })
    })
}

// -------------------------------------------------------------- decay lemma

/// `|v(r)|` divided by the decay-lemma right-hand side, on the grid.
/// Points where the right-hand side vanishes are reported as `NaN`.
pub fn decay_ratio_curve(spec: &CheckSpec, v: &RadialFunction, grid: &[f64]) -> Result<Vec<(f64, f64)>, VerifyError> {
    let m = &spec.manifold;
    let w = &m.warp;
    let p = spec.p;
    let n = spec.nf();
    let c_phi = w.c_phi(C_PHI_GRID).value;
    let omega = m.sphere_volume();
    let lp = finite(manifold_seminorm_integral(v, 0, p, m, &spec.quad)?, "L^p norm")?.powf(1.0 / p);
    let grad = finite(manifold_seminorm_integral(v, 1, p, m, &spec.quad)?, "gradient norm")?.powf(1.0 / p);
    let prefactor = (p / (c_phi.powf(n - 1.0) * omega)).powf(1.0 / p);
    let mut out = Vec::with_capacity(grid.len());
    for &r in grid {
        let rhs = prefactor * lp.powf((p - 1.0) / p) * grad.powf(1.0 / p) * w.eval(r).powf((1.0 - n) / p);
        let lhs = v.derivatives(r, 0)?[0].abs();
        out.push((r, if rhs == 0.0 { f64::NAN } else { lhs / rhs }));
    }
    Ok(out)
}

/// Whether a family's norms on an unbounded manifold have a certified tail.
pub fn tail_certified(v: &RadialFunction, m: &ManifoldSpec, p: f64, theta: f64) -> bool {
    let w = &m.warp;
    if w.is_bounded() {
        return true;
    }
    (0..=1).all(|j| {
        let env = v.envelope(j).map(|e| e.powf(p));
        let growth = w.power_envelope(theta);
        match (env, growth) {
            (Some(e), Some(g)) => e.product(&g).tail_bound(1e3_f64.max(e.t0)).is_some(),
            _ => false,
        }
    })
}

fn check_decay_lemma(spec: &CheckSpec) -> Result<Outcome, VerifyError> {
    let m = &spec.manifold;
    let grid = spec.grid.resolve(spec.radius())?;
    let theta = spec.nf() - 1.0;
    let admissible: Vec<&RadialFunction> = spec.families.iter().filter(|v| tail_certified(v, m, spec.p, theta)).collect();
    if admissible.is_empty() {
        return inadmissible("no family has a certified tail on this manifold");
    }
    let curves: Vec<Result<Vec<(f64, f64)>, VerifyError>> =
        admissible.par_iter().map(|v| decay_ratio_curve(spec, v, &grid)).collect();
    let mut max_ratio = 0.0f64;
    let mut skipped = 0;
    let mut worst = Value::Null;
    for (curve, v) in curves.into_iter().zip(&admissible) {
        for (r, x) in curve? {
            if x.is_nan() {
                skipped += 1;
            } else if x > max_ratio || worst.is_null() {
                max_ratio = max_ratio.max(x);
                worst = json!({ "r": num(r), "family": v.to_string(), "ratio": num(x) });
            }
        }
    }
    let c = m.warp.c_phi(C_PHI_GRID);
    let p = spec.p;
    let prefactor = (p / (c.value.powf(spec.nf() - 1.0) * m.sphere_volume())).powf(1.0 / p);
    Ok(Outcome {
        verdict: Verdict::from_bool(max_ratio <= 1.0 + DECAY_TOL),
        measured: json!({
            "max_ratio": num(max_ratio),
            "threshold": num(1.0 + DECAY_TOL),
            "c_phi": num(c.value),
            "c_phi_tail_cutoff": c.tail_cutoff.map_or(Value::Null, num),
            "prefactor": num(prefactor),
            "skipped_points": skipped,
            "families_used": admissible.len(),
            "families_skipped": spec.families.len() - admissible.len(),
        }),
        worst_case: worst,
        grid: grid_json(spec, &spec.grid),
    })
}

// -------------------------------------------------------------------- hardy

/// `(LHS, RHS)` of the Hardy-type inequality of order `j`.
pub fn hardy_sides(spec: &CheckSpec, v: &RadialFunction, j: usize) -> Result<(NormValue, NormValue), VerifyError> {
    let w = &spec.manifold.warp;
    let (k, p, n) = (spec.k, spec.p, spec.nf());
    let lhs = seminorm_integral(v, k - j, p, n - 1.0 - j as f64 * p, w, &spec.quad)?;
    let mut rhs = 0.0;
    for i in (k - j)..=k {
        match seminorm_integral(v, i, p, n - 1.0, w, &spec.quad)? {
            NormValue::Finite(x) => rhs += x,
            NormValue::Infinite => return Ok((lhs, NormValue::Infinite)),
        }
    }
    Ok((lhs, NormValue::Finite(rhs)))
}

fn check_hardy(spec: &CheckSpec) -> Result<Outcome, VerifyError> {
    let j = spec.j.unwrap_or(spec.k);
    let sup = |families: &[RadialFunction], _: &GridSpec| {
        family_sup(families, |v| {
            let (lhs, rhs) = hardy_sides(spec, v, j)?;
            Ok(match rhs {
                NormValue::Infinite => None,
                NormValue::Finite(r) => {
                    let l = lhs.value();
                    Some(vec![(None, if l == 0.0 && r == 0.0 { f64::NAN } else { l / r })])
                }
            })
        })
    };
    if j == 0 {
        let s = sup(&spec.families, &spec.grid)?;
        return Ok(Outcome {
            verdict: Verdict::from_bool(s.sup <= 1.0 + TERM_INCLUSION_TOL),
            measured: json!({ "constant": num(s.sup), "threshold": num(1.0 + TERM_INCLUSION_TOL), "j": 0 }),
            worst_case: sup_json(&s),
            grid: quad_json(spec),
        });
    }
    let mut out = stability(spec, sup)?;
    out.measured["j"] = json!(j);
    out.grid = quad_json(spec);
    Ok(out)
}

// ---------------------------------------------------------------- embedding

/// `‖u‖_{L^q_{φ^θ}} / ‖u‖_{W^{k,p}}` in the configured space.
pub fn embedding_ratio(spec: &CheckSpec, v: &RadialFunction, q: f64) -> Result<Option<f64>, VerifyError> {
    let m = &spec.manifold;
    let w = &m.warp;
    let (num_norm, den) = match spec.space {
        EmbeddingSpace::Manifold => {
            let omega = m.sphere_volume();
            let lq = seminorm_integral(v, 0, q, spec.theta + spec.nf() - 1.0, w, &spec.quad)?;
            let lq = match lq {
                NormValue::Finite(x) => NormValue::Finite((omega * x).powf(1.0 / q)),
                NormValue::Infinite => NormValue::Infinite,
            };
            (lq, sobolev_norm_manifold(v, spec.k, spec.p, m, &spec.quad)?)
        }
        EmbeddingSpace::Interval => {
            let lq = match seminorm_integral(v, 0, q, spec.theta, w, &spec.quad)? {
                NormValue::Finite(x) => NormValue::Finite(x.powf(1.0 / q)),
                NormValue::Infinite => NormValue::Infinite,
            };
            (lq, sobolev_norm_1d(v, spec.k, spec.p, spec.n(), w, &spec.quad)?)
        }
    };
    let den = match den {
        NormValue::Finite(x) => x,
        NormValue::Infinite => return Ok(None),
    };
    let top = num_norm.value();
    Ok(Some(if top == 0.0 && den == 0.0 { f64::NAN } else { top / den }))
}

fn check_embedding_ratio(spec: &CheckSpec) -> Result<Outcome, VerifyError> {
    let q = spec.q.expect("validated");
    let sup_at = |q: f64| {
        move |families: &[RadialFunction], _: &GridSpec| {
            family_sup(families, |v| Ok(embedding_ratio(spec, v, q)?.map(|x| vec![(None, x)])))
        }
    };
    let mut out = stability(spec, sup_at(q))?;
    out.measured["q"] = num(q);
    let (lo, hi, _) = spec.embedding_range().unwrap_or((f64::NAN, f64::NAN, false));
    out.measured["q_range"] = json!([num(lo), num(hi)]);
    if !spec.manifold.warp.is_bounded() {
        let at_p = sup_at(spec.p)(&spec.families, &spec.grid)?;
        out.measured["constant_at_q_eq_p"] = num(at_p.sup);
        if hi.is_finite() {
            let at_crit = sup_at(hi)(&spec.families, &spec.grid)?;
            out.measured["constant_at_critical_q"] = num(at_crit.sup);
        }
    }
    out.grid = quad_json(spec);
    Ok(out)
}

// ----------------------------------------------------------- counterexample

/// Weight exponent `N − 1 − (k−1)p` of the divergent integral.
pub fn counterexample_exponent(spec: &CheckSpec) -> f64 {
    spec.nf() - 1.0 - (spec.k as f64 - 1.0) * spec.p
}

/// `φ(r)^{N−1−(k−1)p}` on the grid.
pub fn counterexample_integrand_curve(spec: &CheckSpec, grid: &[f64]) -> Vec<(f64, f64)> {
    let alpha = counterexample_exponent(spec);
    grid.iter().map(|&r| (r, spec.manifold.warp.eval(r).powf(alpha))).collect()
}

/// Cutoffs `ε` used by the divergence probe, decreasing.
pub fn probe_cutoffs(r0: f64) -> Vec<f64> {
    let mut eps = log_spaced(MIN_RADIUS, 1e-2 * r0, 9);
    eps.reverse();
    eps
}

fn check_counterexample(spec: &CheckSpec) -> Result<Outcome, VerifyError> {
    let w = &spec.manifold.warp;
    let alpha = counterexample_exponent(spec);
    let r0 = (0.5 * w.radius()).min(1.0);
    let eps = probe_cutoffs(r0);
    let f = Integrand::new(|_| 1.0).with_weight(alpha);
    let probe = divergence_probe(&f, w, r0, &eps, &spec.quad)?;
    let expected = -(alpha + 1.0);
    let linear = RadialFunction::linear();
    let one_d = sobolev_norm_1d(&linear, spec.k, spec.p, spec.n(), w, &spec.quad)?;
    let manifold = sobolev_norm_manifold(&linear, spec.k, spec.p, &spec.manifold, &spec.quad)?;
    let (law_ok, expected_law) = if (alpha + 1.0).abs() < 1e-12 {
        (probe.law == GrowthLaw::Log, GrowthLaw::Log)
    } else {
        (
            probe.law == GrowthLaw::Power && ((probe.exponent - expected) / expected).abs() <= SLOPE_TOL,
            GrowthLaw::Power,
        )
    };
    let ok = law_ok && one_d.is_finite() && !manifold.is_finite();
    Ok(Outcome {
        verdict: Verdict::from_bool(ok),
        measured: json!({
            "law": probe.law.tag(),
            "expected_law": expected_law.tag(),
            "exponent": num(probe.exponent),
            "expected_exponent": if expected_law == GrowthLaw::Power { num(expected) } else { num(1.0) },
            "fit_residual": num(probe.residual),
            "power_fit": { "slope": num(probe.power_slope), "residual": num(probe.power_residual) },
            "log_fit": { "slope": num(probe.log_slope), "residual": num(probe.log_residual) },
            "integrand_exponent": num(alpha),
            "sobolev_norm_1d": num(one_d.value()),
            "sobolev_norm_manifold": num(manifold.value()),
            "slope_tolerance": num(SLOPE_TOL),
        }),
        worst_case: json!({
            "samples": probe.samples.iter().map(|&(e, i)| json!([num(e), num(i)])).collect::<Vec<_>>(),
            "r0": num(r0),
        }),
        grid: json!({ "eps": eps.iter().map(|&e| num(e)).collect::<Vec<_>>(), "tol": num(spec.quad.tol) }),
    })
}

// --------------------------------------------------------------- asymptotic

pub const ASYMPTOTIC_RADII: [f64; 2] = [1e-2, 1e-3];

/// `(−1)^k (k−2)!`
pub fn asymptotic_target(k: usize) -> f64 {
    let fact: f64 = (1..=k.saturating_sub(2)).map(|i| i as f64).product();
    if k % 2 == 0 {
        fact
    } else {
        -fact
    }
}

fn check_asymptotic_leading(spec: &CheckSpec) -> Result<Outcome, VerifyError> {
    let target = asymptotic_target(spec.k);
    let mut ratios = Vec::new();
    let mut errors = Vec::new();
    for &r in &ASYMPTOTIC_RADII {
        let x = asymptotic_leading_ratio(&spec.manifold, spec.k, r)?;
        ratios.push(x);
        errors.push(((x - target) / target).abs());
    }
    let converging = errors[1] <= errors[0] + 1e-12;
    let ok = errors[1] <= ASYMPTOTIC_TOL && converging;
    Ok(Outcome {
        verdict: Verdict::from_bool(ok),
        measured: json!({
            "target": num(target),
            "ratios": ratios.iter().map(|&x| num(x)).collect::<Vec<_>>(),
            "relative_errors": errors.iter().map(|&x| num(x)).collect::<Vec<_>>(),
            "converging": converging,
            "threshold": num(ASYMPTOTIC_TOL),
        }),
        worst_case: json!({ "r": num(ASYMPTOTIC_RADII[1]), "ratio": num(ratios[1]) }),
        grid: json!({ "r": ASYMPTOTIC_RADII.iter().map(|&x| num(x)).collect::<Vec<_>>() }),
    })
}

// ------------------------------------------------------------------- curves

/// `|∇^j u|_g(r)` at the default angles.
pub fn norm_profile_curve(m: &ManifoldSpec, v: &RadialFunction, j: usize, grid: &[f64]) -> Result<Vec<(f64, f64)>, VerifyError> {
    grid.par_iter()
        .map(|&r| {
            let profile = v.derivatives(r, j)?;
            let frame = covariant_frame(m, &m.default_point(r), &profile, j)?;
            Ok((r, frame.norms()[j]))
        })
        .collect()
}

/// Largest relative spread of `|∇^j u|_g` across evaluation angles.
pub fn angle_spread(m: &ManifoldSpec, v: &RadialFunction, r: f64, k: usize, angles: &[f64]) -> Result<f64, VerifyError> {
    let profile = v.derivatives(r, k)?;
    let mut norms: Vec<Vec<f64>> = Vec::new();
    for &theta in angles {
        let mut point = vec![theta; m.dim()];
        point[0] = r;
        norms.push(covariant_frame(m, &point, &profile, k)?.norms());
    }
    let mut spread = 0.0f64;
    for j in 0..=k {
        let reference = norms[0][j];
        for n in &norms[1..] {
            let scale = reference.abs().max(f64::MIN_POSITIVE);
            spread = spread.max((n[j] - reference).abs() / scale);
        }
    }
    Ok(spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::WarpSpec;

    fn manifold(kind: WarpKind, radius: f64, n: usize) -> ManifoldSpec {
        ManifoldSpec::new(WarpSpec::new(kind, radius).unwrap(), n).unwrap()
    }

    #[test]
    fn tags_round_trip() {
        for k in CheckKind::ALL {
            assert_eq!(CheckKind::from_tag(k.tag()), Some(k));
        }
        assert_eq!(CheckKind::from_tag("compactness"), None);
    }

    #[test]
    fn asymptotic_targets() {
        assert_eq!(asymptotic_target(2), 1.0);
        assert_eq!(asymptotic_target(3), -1.0);
        assert_eq!(asymptotic_target(4), 2.0);
    }

    #[test]
    fn doubled_grid_contains_original() {
        let g = GridSpec::default();
        let a = g.resolve(1.0).unwrap();
        let b = g.doubled().resolve(1.0).unwrap();
        for (i, x) in a.iter().enumerate() {
            assert_eq!(*x, b[2 * i]);
        }
        assert_eq!(a[0], 1e-3);
        assert_eq!(*a.last().unwrap(), 0.999);
    }

    #[test]
    fn admissibility_guards() {
        let e = manifold(WarpKind::Euclidean, 1.0, 4);
        let c = CheckSpec::new(CheckKind::Counterexample, e.clone()).with_k(2).with_p(2.0);
        assert!(matches!(c.validate(), Err(VerifyError::Inadmissible(_))));
        let r = CheckSpec::new(CheckKind::RadialLemmaPower, e.clone()).with_k(2).with_p(2.0);
        assert!(r.validate().is_err());
        let l = CheckSpec::new(CheckKind::RadialLemmaLog, e.clone()).with_k(2).with_p(2.0);
        assert_eq!(l.validate(), Ok(false));
        let d = CheckSpec::new(CheckKind::DecayLemma, e.clone());
        assert!(d.validate().is_err());
        let q = CheckSpec::new(CheckKind::EmbeddingRatio, e.clone()).with_q(100.0);
        assert!(q.validate().is_err());
        let mut diag = q.clone();
        diag.diagnostic = true;
        assert_eq!(diag.validate(), Ok(true));
        let s = manifold(WarpKind::Spherical, std::f64::consts::PI, 3);
        assert!(CheckSpec::new(CheckKind::Hardy, s).validate().is_err());
    }

    #[test]
    fn identity_and_gradient_small_run() {
        let m = manifold(WarpKind::Hyperbolic, f64::INFINITY, 3);
        let spec = CheckSpec::new(CheckKind::Identity, m.clone()).with_k(3).with_grid_points(16);
        let rep = run_check(&spec).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{:?}", rep.measured);
        assert!(rep.measured_f64("max_relative_gap") <= 1e-10);
        let spec = CheckSpec::new(CheckKind::GradientInequality, m).with_k(3).with_grid_points(16);
        assert_eq!(run_check(&spec).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn asymptotic_check_runs() {
        let m = manifold(WarpKind::Hyperbolic, f64::INFINITY, 3);
        let rep = run_check(&CheckSpec::new(CheckKind::AsymptoticLeading, m).with_k(3)).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{:?}", rep.measured);
    }

    #[test]
    fn json_numbers() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(f64::NEG_INFINITY), json!("-inf"));
        assert_eq!(num(f64::NAN), json!("nan"));
        assert_eq!(value_f64(&num(2.5)), 2.5);
        assert_eq!(value_f64(&json!("inf")), f64::INFINITY);
    }
}

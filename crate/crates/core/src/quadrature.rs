//! Weighted adaptive quadrature `∫_0^R f(t) φ(t)^θ dt`.
//!
//! Panels are graded geometrically towards the origin; the infinite tail
//! (for `R = ∞`) is cut at a point where a decay envelope certifies the
//! remainder. All panels are refined by global adaptive bisection with a
//! 21-point Gauss–Kronrod rule.

use std::fmt;

use thiserror::Error;

use crate::manifold::WarpSpec;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MIN_TOL: f64 = 1e-13;
pub const DEFAULT_PANEL_BUDGET: usize = 4000;

const MAX_GRADED_PANELS: usize = 200;
const MAX_TAIL_DOUBLINGS: usize = 128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("tolerance {0} is below the supported minimum {MIN_TOL}")]
    Tolerance(f64),
    #[error("integrand returned NaN at t = {0}")]
    NotANumber(f64),
    #[error("an infinite range needs a decay envelope for the integrand")]
    MissingEnvelope,
    #[error("invalid integration range [{0}, {1}]")]
    Range(f64, f64),
    #[error("divergence probe: {0}")]
    Probe(String),
}

/// Pointwise bound `C t^β e^{−a t − b t²}`, valid for `t ≥ t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub c: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub t0: f64,
}

impl Envelope {
    pub fn new(c: f64, beta: f64, a: f64, b: f64, t0: f64) -> Self {
        Envelope { c, beta, a, b, t0 }
    }

    pub fn power(c: f64, beta: f64, t0: f64) -> Self {
        Self::new(c, beta, 0.0, 0.0, t0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        self.c * t.powf(self.beta) * (-self.a * t - self.b * t * t).exp()
    }

    /// Bound for the product of the two bounded quantities.
    pub fn product(&self, other: &Envelope) -> Envelope {
        Envelope {
            c: self.c * other.c,
            beta: self.beta + other.beta,
            a: self.a + other.a,
            b: self.b + other.b,
            t0: self.t0.max(other.t0),
        }
    }

    /// Bound for the `q`-th power of the bounded quantity.
    pub fn powf(&self, q: f64) -> Envelope {
        Envelope {
            c: self.c.powf(q),
            beta: self.beta * q,
            a: self.a * q,
            b: self.b * q,
            t0: self.t0,
        }
    }

    /// Certified bound on `∫_T^∞ envelope`, if the envelope is integrable there.
    pub fn tail_bound(&self, t: f64) -> Option<f64> {
        if t < self.t0 || t <= 0.0 {
            return None;
        }
        if self.c == 0.0 {
            return Some(0.0);
        }
        if self.a == 0.0 && self.b == 0.0 {
            return (self.beta < -1.0).then(|| self.c * t.powf(self.beta + 1.0) / (-self.beta - 1.0));
        }
        // d/dt log E ≤ −λ on [T, ∞)
        let lambda = self.a + 2.0 * self.b * t - self.beta.max(0.0) / t;
        if self.b < 0.0 || lambda <= 0.0 {
            return None;
        }
        Some(self.eval(t) / lambda)
    }
}

/// An integrand `f` against the weight `φ^θ`.
pub struct Integrand<'a> {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    pub weight_exponent: f64,
    /// Bound on `|f|` at large `t`; required when `R = ∞`.
    pub envelope: Option<Envelope>,
    /// Integration stops at this distance from the origin.
    pub inner_cutoff: Option<f64>,
}

impl fmt::Debug for Integrand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("weight_exponent", &self.weight_exponent)
            .field("envelope", &self.envelope)
            .field("inner_cutoff", &self.inner_cutoff)
            .finish_non_exhaustive()
    }
}

impl<'a> Integrand<'a> {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        Integrand {
            f: Box::new(f),
            weight_exponent: 0.0,
            envelope: None,
            inner_cutoff: None,
        }
    }

    pub fn with_weight(mut self, theta: f64) -> Self {
        self.weight_exponent = theta;
        self
    }

    pub fn with_envelope(mut self, envelope: Option<Envelope>) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn with_inner_cutoff(mut self, cutoff: f64) -> Self {
        self.inner_cutoff = Some(cutoff);
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    /// `f(t) φ(t)^θ`, with `0 · ∞` read as 0.
    fn weighted(&self, w: &WarpSpec, t: f64) -> Result<f64, QuadError> {
        let v = (self.f)(t);
        if v.is_nan() {
            return Err(QuadError::NotANumber(t));
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        if self.weight_exponent == 0.0 {
            return Ok(v);
        }
        let out = v * w.eval(t).powf(self.weight_exponent);
        if out.is_nan() {
            return Err(QuadError::NotANumber(t));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub tol: f64,
    pub panel_budget: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tol: DEFAULT_TOL,
            panel_budget: DEFAULT_PANEL_BUDGET,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        QuadConfig { tol, ..Self::default() }
    }

    fn validate(&self) -> Result<(), QuadError> {
        if self.tol.is_nan() || self.tol < MIN_TOL {
            return Err(QuadError::Tolerance(self.tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
    pub converged: bool,
    /// Inner cutoff at which the integral was truncated, if any.
    pub truncated_at: Option<f64>,
    /// Point beyond which the tail was bounded by the envelope.
    pub tail_at: Option<f64>,
    /// Panel contributions kept growing towards the origin.
    pub diverging: bool,
}

impl QuadResult {
    fn zero() -> Self {
        QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
            converged: true,
            truncated_at: None,
            tail_at: None,
            diverging: false,
        }
    }
}

// QUADPACK qk21 nodes and weights on [-1, 1], positive half
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208745298638,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk21(g: &dyn Fn(f64) -> Result<f64, QuadError>, a: f64, b: f64) -> Result<Panel, QuadError> {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let fc = g(centr)?;
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let absc = hlgth * XGK[j];
        let f1 = g(centr - absc)?;
        let f2 = g(centr + absc)?;
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * hlgth;
    let resabs = resabs * hlgth.abs();
    let resasc = resasc * hlgth.abs();
    let mut error = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Panel { a, b, value, error })
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in values {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

struct Refined {
    value: f64,
    error: f64,
    subdivisions: usize,
}

/// Global adaptive bisection: the panel with the largest error (lowest
/// position on ties) is split until the total error meets the target.
fn refine(
    g: &dyn Fn(f64) -> Result<f64, QuadError>,
    mut panels: Vec<Panel>,
    extra_value: f64,
    extra_error: f64,
    cfg: &QuadConfig,
) -> Result<Refined, QuadError> {
    let mut subdivisions = 0;
    loop {
        let value = neumaier_sum(panels.iter().map(|p| p.value).chain([extra_value]));
        let error = panels.iter().map(|p| p.error).sum::<f64>() + extra_error;
        let target = cfg.tol * value.abs();
        let done = error <= target || value == 0.0 || !value.is_finite();
        if done || subdivisions >= cfg.panel_budget || extra_error > target {
            return Ok(Refined {
                value,
                error,
                subdivisions,
            });
        }
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Ok(Refined {
                value,
                error,
                subdivisions,
            });
        }
        let left = gk21(g, p.a, mid)?;
        let right = gk21(g, mid, p.b)?;
        panels[worst] = left;
        panels.insert(worst + 1, right);
        subdivisions += 1;
    }
}

struct Graded {
    panels: Vec<Panel>,
    /// extrapolated contribution of `(0, cutoff)`
    extrapolated: f64,
    remainder: f64,
    truncated_at: Option<f64>,
    diverging: bool,
    complete: bool,
}

fn growing(contrib: &[f64]) -> bool {
    let n = contrib.len();
    if n < 8 {
        return false;
    }
    contrib[n - 7..]
        .windows(2)
        .all(|w| w[0] != 0.0 && (w[1] / w[0]).abs() >= 0.98)
}

/// Panels `[hi 2^{-(m+1)}, hi 2^{-m}]` until the contributions are
/// negligible, the cutoff is reached, or the sequence is seen to diverge.
fn graded_toward_zero(
    g: &dyn Fn(f64) -> Result<f64, QuadError>,
    hi: f64,
    cutoff: Option<f64>,
    offset: f64,
    cfg: &QuadConfig,
) -> Result<Graded, QuadError> {
    let mut panels = Vec::new();
    let mut contrib: Vec<f64> = Vec::new();
    let mut sum = offset;
    let mut small_run = 0;
    let mut m = 0;
    loop {
        let b = hi * 0.5f64.powi(m);
        let a = 0.5 * b;
        if matches!(cutoff, Some(c) if a < c) {
            // geometric continuation of the panel sequence below `b`;
            // its uncertainty is the drift of the panel ratio
            let n = contrib.len();
            let ratio = |i: usize| {
                if i >= 1 && i < n && contrib[i - 1] != 0.0 {
                    (contrib[i] / contrib[i - 1]).abs()
                } else {
                    1.0
                }
            };
            let all_zero = contrib.iter().all(|&c| c == 0.0);
            let (rho, rho_prev) = (ratio(n.wrapping_sub(1)), ratio(n.wrapping_sub(2)));
            let (extrapolated, remainder) = if all_zero {
                (0.0, 0.0)
            } else if rho < 1.0 && rho_prev < 1.0 {
                let tail = contrib[n - 1] * rho / (1.0 - rho);
                let drift = (rho - rho_prev).abs() / (1.0 - rho.max(rho_prev));
                (tail, tail.abs() * drift + 50.0 * f64::EPSILON * tail.abs())
            } else {
                (0.0, contrib.last().map_or(0.0, |c| c.abs()))
            };
            return Ok(Graded {
                panels,
                extrapolated,
                remainder,
                truncated_at: Some(b),
                diverging: growing(&contrib),
                complete: true,
            });
        }
        let p = gk21(g, a, b)?;
        let v = p.value;
        panels.push(p);
        contrib.push(v);
        sum += v;
        if !sum.is_finite() || growing(&contrib) {
            return Ok(Graded {
                panels,
                remainder: f64::INFINITY,
                extrapolated: 0.0,
                truncated_at: None,
                diverging: true,
                complete: false,
            });
        }
        let prev = if contrib.len() >= 2 { contrib[contrib.len() - 2] } else { f64::INFINITY };
        let rho = if prev == 0.0 || !prev.is_finite() { 0.0 } else { (v / prev).abs() };
        if sum != 0.0 && v.abs() <= 1e-3 * cfg.tol * sum.abs() && v.abs() <= prev.abs() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 && rho < 1.0 {
            return Ok(Graded {
                panels,
                remainder: v.abs() * rho / (1.0 - rho),
                extrapolated: 0.0,
                truncated_at: None,
                diverging: false,
                complete: true,
            });
        }
        m += 1;
        if m as usize >= MAX_GRADED_PANELS {
            let all_zero = sum == 0.0 && contrib.iter().all(|&c| c == 0.0);
            return Ok(Graded {
                panels,
                remainder: if all_zero { 0.0 } else { v.abs() },
                extrapolated: 0.0,
                truncated_at: None,
                diverging: false,
                complete: all_zero,
            });
        }
    }
}

/// `∫_0^R f(t) φ(t)^θ dt` with `R` the warp's radius.
pub fn integrate_weighted(f: &Integrand, w: &WarpSpec, cfg: &QuadConfig) -> Result<QuadResult, QuadError> {
    cfg.validate()?;
    let g = |t: f64| f.weighted(w, t);
    let radius = w.radius();
    let hi = if radius.is_finite() { radius } else { 1.0 };

    let mut tail_panels = Vec::new();
    let mut tail_error = 0.0;
    let mut tail_at = None;
    let mut tail_ok = true;
    if !radius.is_finite() {
        let env = f.envelope.ok_or(QuadError::MissingEnvelope)?;
        let total_env = w.power_envelope(f.weight_exponent).map(|e| e.product(&env));
        // tail first so the graded part sees the full magnitude
        let mut t = 1.0;
        let mut sum: f64 = 0.0;
        let mut certified = None;
        for _ in 0..MAX_TAIL_DOUBLINGS {
            let bound = total_env.and_then(|e| e.tail_bound(t));
            if let Some(bound) = bound {
                if bound == 0.0 || (sum != 0.0 && bound <= 1e-3 * cfg.tol * sum.abs()) {
                    certified = Some(bound);
                    break;
                }
            }
            let p = gk21(&g, t, 2.0 * t)?;
            sum += p.value;
            tail_panels.push(p);
            t *= 2.0;
        }
        match certified {
            Some(bound) => {
                tail_error = bound;
                tail_at = Some(t);
            }
            None => {
                tail_ok = false;
                tail_error = total_env.and_then(|e| e.tail_bound(t)).unwrap_or(f64::INFINITY);
                tail_at = Some(t);
            }
        }
    }
    let tail_sum = neumaier_sum(tail_panels.iter().map(|p| p.value));
    let graded = graded_toward_zero(&g, hi, f.inner_cutoff, tail_sum, cfg)?;
    if graded.diverging {
        return Ok(QuadResult {
            value: f64::INFINITY,
            error_estimate: f64::INFINITY,
            subdivisions: 0,
            converged: false,
            truncated_at: graded.truncated_at,
            tail_at,
            diverging: true,
        });
    }
    let mut panels = graded.panels;
    panels.reverse();
    panels.extend(tail_panels);
    let refined = refine(&g, panels, graded.extrapolated, graded.remainder + tail_error, cfg)?;
    let converged = graded.complete
        && tail_ok
        && refined.value.is_finite()
        && refined.error <= cfg.tol * refined.value.abs().max(1.0);
    Ok(QuadResult {
        value: refined.value,
        error_estimate: refined.error,
        subdivisions: refined.subdivisions,
        converged,
        truncated_at: graded.truncated_at,
        tail_at,
        diverging: false,
    })
}

/// `∫_a^b f(t) φ(t)^θ dt` on a compact subinterval, with panels whose
/// endpoints grow by factors of 2 from `a`.
pub fn integrate_range(f: &Integrand, w: &WarpSpec, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult, QuadError> {
    cfg.validate()?;
    if !(a > 0.0 && b > a && b.is_finite() && b <= w.radius()) {
        return Err(QuadError::Range(a, b));
    }
    let g = |t: f64| f.weighted(w, t);
    let mut panels = Vec::new();
    let mut lo = a;
    while lo < b {
        let hi = (2.0 * lo).min(b);
        panels.push(gk21(&g, lo, hi)?);
        lo = hi;
    }
    let refined = refine(&g, panels, 0.0, 0.0, cfg)?;
    if refined.value == 0.0 {
        return Ok(QuadResult::zero());
    }
    Ok(QuadResult {
        value: refined.value,
        error_estimate: refined.error,
        subdivisions: refined.subdivisions,
        converged: refined.value.is_finite() && refined.error <= cfg.tol * refined.value.abs().max(1.0),
        truncated_at: None,
        tail_at: None,
        diverging: false,
    })
}

/// Growth law fitted by [`divergence_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthLaw {
    Convergent,
    Power,
    Log,
}

impl GrowthLaw {
    pub fn tag(&self) -> &'static str {
        match self {
            GrowthLaw::Convergent => "convergent",
            GrowthLaw::Power => "power",
            GrowthLaw::Log => "log",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub law: GrowthLaw,
    /// Slope of the selected model (0 when convergent).
    pub exponent: f64,
    /// RMS residual of the selected model.
    pub residual: f64,
    pub power_slope: f64,
    pub power_residual: f64,
    pub log_slope: f64,
    pub log_residual: f64,
    /// `(ε, I(ε))` pairs.
    pub samples: Vec<(f64, f64)>,
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

/// Fits the growth of `I(ε) = ∫_ε^{R0} f φ^θ` as `ε → 0`.
///
/// The power model regresses `log I` on `log(1/ε)`, the log model on
/// `log log(R0/ε)`; the model with the smaller residual is reported.
pub fn divergence_probe(
    f: &Integrand,
    w: &WarpSpec,
    r0: f64,
    eps: &[f64],
    cfg: &QuadConfig,
) -> Result<ProbeResult, QuadError> {
    if eps.len() < 4 {
        return Err(QuadError::Probe("need at least 4 cutoffs".into()));
    }
    if eps.windows(2).any(|p| p[1] >= p[0]) {
        return Err(QuadError::Probe("cutoffs must be strictly decreasing".into()));
    }
    if eps[eps.len() - 1] < 1e-6 || eps[0] >= r0 {
        return Err(QuadError::Probe("cutoffs must lie in [1e-6, R0)".into()));
    }
    let mut samples = Vec::with_capacity(eps.len());
    let mut acc = integrate_range(f, w, eps[0], r0, cfg)?.value;
    samples.push((eps[0], acc));
    for pair in eps.windows(2) {
        acc += integrate_range(f, w, pair[1], pair[0], cfg)?.value;
        samples.push((pair[1], acc));
    }
    let n = samples.len();
    let (last, before) = (samples[n - 1].1, samples[n - 2].1);
    let increment = ((last - before) / last).abs();
    let xs_pow: Vec<f64> = samples.iter().map(|(e, _)| (1.0 / e).ln()).collect();
    let xs_log: Vec<f64> = samples.iter().map(|(e, _)| (r0 / e).ln().ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, i)| i.abs().ln()).collect();
    let (power_slope, power_residual) = linear_fit(&xs_pow, &ys);
    let (log_slope, log_residual) = if xs_log.iter().all(|x| x.is_finite()) {
        linear_fit(&xs_log, &ys)
    } else {
        (f64::NAN, f64::INFINITY)
    };
    let (law, exponent, residual) = if increment < 1e-3 {
        (GrowthLaw::Convergent, 0.0, 0.0)
    } else if log_residual < power_residual {
        (GrowthLaw::Log, log_slope, log_residual)
    } else {
        (GrowthLaw::Power, power_slope, power_residual)
    };
    Ok(ProbeResult {
        law,
        exponent,
        residual,
        power_slope,
        power_residual,
        log_slope,
        log_residual,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::WarpKind;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn kronrod_rule_is_exact_for_polynomials() {
        for deg in 0..=31 {
            let g = |t: f64| Ok(t.powi(deg));
            let p = gk21(&g, 0.0, 1.0).unwrap();
            assert!(rel(p.value, 1.0 / (deg as f64 + 1.0)) < 1e-14, "degree {deg}");
        }
        // embedded Gauss-10 rule integrates t^18 exactly on [-1, 1]
        let resg: f64 = (0..5).map(|j| 2.0 * WG[j] * XGK[2 * j + 1].powi(18)).sum();
        assert!(rel(resg, 2.0 / 19.0) < 1e-14);
    }

    #[test]
    fn monomials_against_euclidean_weight() {
        let cfg = QuadConfig::default();
        let w = WarpSpec::new(WarpKind::Euclidean, 1.0).unwrap();
        for n in 1..=6 {
            let f = Integrand::new(|_| 1.0).with_weight(n as f64 - 1.0);
            let r = integrate_weighted(&f, &w, &cfg).unwrap();
            assert!(r.converged);
            assert!(rel(r.value, 1.0 / n as f64) < 1e-10, "N={n}");
        }
    }

    #[test]
    fn sinh_weight_closed_form() {
        let w = WarpSpec::new(WarpKind::Hyperbolic, 1.0).unwrap();
        let f = Integrand::new(|_| 1.0).with_weight(1.0);
        let r = integrate_weighted(&f, &w, &QuadConfig::default()).unwrap();
        assert!(rel(r.value, 1.0f64.cosh() - 1.0) < 1e-10);
    }

    #[test]
    fn exponential_against_sinh_on_infinite_range() {
        let w = WarpSpec::hyperbolic();
        let f = Integrand::new(|t: f64| (-2.0 * t).exp())
            .with_weight(1.0)
            .with_envelope(Some(Envelope::new(1.0, 0.0, 2.0, 0.0, 0.0)));
        let r = integrate_weighted(&f, &w, &QuadConfig::default()).unwrap();
        assert!(r.converged);
        assert!(rel(r.value, 1.0 / 3.0) < 1e-10, "{r:?}");
        let t = r.tail_at.unwrap();
        let tail = integrate_range(&f, &w, t, 2.0 * t, &QuadConfig::default()).unwrap();
        assert!(tail.value.abs() < r.error_estimate);
    }

    #[test]
    fn missing_envelope_and_bad_tol() {
        let f = Integrand::new(|_| 1.0);
        assert_eq!(
            integrate_weighted(&f, &WarpSpec::euclidean(), &QuadConfig::default()).unwrap_err(),
            QuadError::MissingEnvelope
        );
        let w = WarpSpec::new(WarpKind::Euclidean, 1.0).unwrap();
        assert_eq!(
            integrate_weighted(&f, &w, &QuadConfig::with_tol(1e-14)).unwrap_err(),
            QuadError::Tolerance(1e-14)
        );
        let bad = Integrand::new(|_| f64::NAN);
        assert!(matches!(
            integrate_weighted(&bad, &w, &QuadConfig::default()),
            Err(QuadError::NotANumber(_))
        ));
    }

    #[test]
    fn divergent_weight_is_flagged() {
        let w = WarpSpec::new(WarpKind::Euclidean, 1.0).unwrap();
        let f = Integrand::new(|_| 1.0).with_weight(-2.0);
        let r = integrate_weighted(&f, &w, &QuadConfig::default()).unwrap();
        assert!(!r.converged && r.diverging && r.value.is_infinite());
        let f = Integrand::new(|_| 1.0).with_weight(-1.0).with_inner_cutoff(1e-6);
        let r = integrate_weighted(&f, &w, &QuadConfig::default()).unwrap();
        assert!(r.diverging);
    }

    #[test]
    fn inner_cutoff_remainder() {
        let w = WarpSpec::new(WarpKind::Euclidean, 1.0).unwrap();
        let f = Integrand::new(|_| 1.0).with_weight(2.0).with_inner_cutoff(1e-6);
        let r = integrate_weighted(&f, &w, &QuadConfig::default()).unwrap();
        assert!(rel(r.value, 1.0 / 3.0) < 1e-10);
        // contributions halve per panel, so the cutoff is reached
        let f = Integrand::new(|t: f64| 1.0 + t).with_inner_cutoff(1e-6);
        let r = integrate_weighted(&f, &w, &QuadConfig::default()).unwrap();
        assert!(r.truncated_at.unwrap() < 2e-6);
        assert!(r.converged, "{r:?}");
        assert!(rel(r.value, 1.5) < 1e-10);
    }

    #[test]
    fn probe_examples() {
        let cfg = QuadConfig::default();
        let eps = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        let tanh = WarpSpec::new(WarpKind::TanhCap, 2.0).unwrap();
        let f = Integrand::new(|_| 1.0).with_weight(-3.0);
        let p = divergence_probe(&f, &tanh, 2.0, &eps, &cfg).unwrap();
        assert_eq!(p.law, GrowthLaw::Power);
        assert!((p.exponent - 2.0).abs() < 0.02, "{p:?}");

        let e = WarpSpec::new(WarpKind::Euclidean, 1.0).unwrap();
        let f = Integrand::new(|_| 1.0).with_weight(-1.0);
        let p = divergence_probe(&f, &e, 1.0, &eps, &cfg).unwrap();
        assert_eq!(p.law, GrowthLaw::Log);
        assert!((p.exponent - 1.0).abs() < 1e-6, "{p:?}");

        let f = Integrand::new(|_| 1.0);
        let p = divergence_probe(&f, &e, 1.0, &eps, &cfg).unwrap();
        assert_eq!(p.law, GrowthLaw::Convergent);
        assert_eq!(p.exponent, 0.0);

        assert!(divergence_probe(&f, &e, 1.0, &eps[..3], &cfg).is_err());
        assert!(divergence_probe(&f, &e, 1.0, &[1e-2, 1e-3, 1e-3, 1e-4], &cfg).is_err());
    }

    #[test]
    fn envelope_tail_bounds() {
        let e = Envelope::new(1.0, 0.0, 2.0, 0.0, 0.0);
        assert!(rel(e.tail_bound(3.0).unwrap(), (-6.0f64).exp() / 2.0) < 1e-15);
        let p = Envelope::power(1.0, -3.0, 1.0);
        assert!(rel(p.tail_bound(2.0).unwrap(), 0.125) < 1e-15);
        assert!(Envelope::power(1.0, -1.0, 1.0).tail_bound(2.0).is_none());
        assert!(p.tail_bound(0.5).is_none());
        let g = Envelope::new(2.0, 3.0, 0.0, 1.0, 0.0);
        let t = 4.0;
        // numeric tail for comparison
        let w = WarpSpec::euclidean();
        let f = Integrand::new(move |s: f64| g.eval(s));
        let num = integrate_range(&f, &w, t, 40.0, &QuadConfig::default()).unwrap().value;
        assert!(g.tail_bound(t).unwrap() >= num);
    }
}

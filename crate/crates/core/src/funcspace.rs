//! Radial profiles `v(t)` with exact derivative jets, and the weighted
//! Lebesgue and Sobolev norms built on them.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{covariant_frame, GeometryError, MIN_RADIUS};
use crate::jets::{BasePoint, Jet, JetError, UnivariateFn, MAX_ORDER};
use crate::manifold::{ManifoldSpec, WarpSpec};
use crate::quadrature::{integrate_weighted, Envelope, Integrand, QuadConfig, QuadError, QuadResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuncError {
    #[error("t = {0} is outside the profile's domain")]
    Domain(f64),
    #[error("derivative order {0} is not supported")]
    Order(usize),
    #[error("invalid family parameters: {0}")]
    Parameter(String),
    #[error("integral did not converge (value {value}, error {error})")]
    NotConverged { value: f64, error: f64 },
    #[error("no certified tail for rank {0} on an unbounded manifold")]
    UncertifiedTail(usize),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("{0}")]
    Geometry(Box<GeometryError>),
}

impl From<GeometryError> for FuncError {
    fn from(e: GeometryError) -> Self {
        FuncError::Geometry(Box::new(e))
    }
}

/// A norm, or the signal that the defining integral diverges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormValue {
    Finite(f64),
    Infinite,
}

impl NormValue {
    pub fn value(&self) -> f64 {
        match self {
            NormValue::Finite(v) => *v,
            NormValue::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, NormValue::Finite(_))
    }

    fn from_value(v: f64) -> Self {
        if v.is_finite() {
            NormValue::Finite(v)
        } else {
            NormValue::Infinite
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Finite(v) => write!(f, "{v}"),
            NormValue::Infinite => f.write_str("inf"),
        }
    }
}

/// Named profile families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `e^{−a t²}`
    Gaussian { a: f64 },
    /// `(1 + t²)^{−a}`
    PowerDecay { a: f64 },
    /// `P(t) χ(t)` with `χ` a smooth step from 1 (below `s0`) to 0 (above `s1`).
    PolynomialBump { coeffs: Vec<f64>, s0: f64, s1: f64 },
    /// `log(r0 / √(t² + ε²))`
    LogProfile { r0: f64, eps: f64 },
    /// `t`
    Linear,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Gaussian { .. } => "gaussian",
            Family::PowerDecay { .. } => "power_decay",
            Family::PolynomialBump { .. } => "polynomial_bump",
            Family::LogProfile { .. } => "log_profile",
            Family::Linear => "linear",
        }
    }

    /// Builds a family from its tag and flat parameter list.
    ///
    /// `polynomial_bump` takes `[s0, s1, c0, c1, ...]`, `log_profile`
    /// takes `[r0, eps]`.
    pub fn from_tag(tag: &str, params: &[f64]) -> Result<Family, FuncError> {
        let need = |n: usize| -> Result<(), FuncError> {
            if params.len() == n {
                Ok(())
            } else {
                Err(FuncError::Parameter(format!("{tag} takes {n} parameters, got {}", params.len())))
            }
        };
        let family = match tag {
            "gaussian" => {
                need(1)?;
                Family::Gaussian { a: params[0] }
            }
            "power_decay" => {
                need(1)?;
                Family::PowerDecay { a: params[0] }
            }
            "polynomial_bump" => {
                if params.len() < 3 {
                    return Err(FuncError::Parameter("polynomial_bump takes [s0, s1, c0, ...]".into()));
                }
                Family::PolynomialBump {
                    s0: params[0],
                    s1: params[1],
                    coeffs: params[2..].to_vec(),
                }
            }
            "log_profile" => {
                need(2)?;
                Family::LogProfile {
                    r0: params[0],
                    eps: params[1],
                }
            }
            "linear" => {
                need(0)?;
                Family::Linear
            }
            other => return Err(FuncError::Parameter(format!("unknown family `{other}`"))),
        };
        family.validate()?;
        Ok(family)
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            Family::Gaussian { a } | Family::PowerDecay { a } => vec![*a],
            Family::PolynomialBump { coeffs, s0, s1 } => {
                let mut p = vec![*s0, *s1];
                p.extend(coeffs);
                p
            }
            Family::LogProfile { r0, eps } => vec![*r0, *eps],
            Family::Linear => vec![],
        }
    }

    fn validate(&self) -> Result<(), FuncError> {
        let ok = match self {
            Family::Gaussian { a } | Family::PowerDecay { a } => a.is_finite() && *a > 0.0,
            Family::PolynomialBump { coeffs, s0, s1 } => {
                s0.is_finite() && *s0 > 0.0 && s1 > s0 && s1.is_finite() && coeffs.iter().all(|c| c.is_finite())
            }
            Family::LogProfile { r0, eps } => r0.is_finite() && *r0 > 0.0 && eps.is_finite() && *eps > 0.0,
            Family::Linear => true,
        };
        if ok {
            Ok(())
        } else {
            Err(FuncError::Parameter(format!("{} with parameters {:?}", self.tag(), self.params())))
        }
    }

    /// The same family, more concentrated towards the origin.
    pub fn refined(&self) -> Family {
        match self {
            Family::Gaussian { a } => Family::Gaussian { a: 2.0 * a },
            Family::PowerDecay { a } => Family::PowerDecay { a: 2.0 * a },
            Family::PolynomialBump { coeffs, s0, s1 } => Family::PolynomialBump {
                coeffs: coeffs.iter().enumerate().map(|(i, c)| c * 2f64.powi(i as i32)).collect(),
                s0: s0 / 2.0,
                s1: s1 / 2.0,
            },
            Family::LogProfile { r0, eps } => Family::LogProfile { r0: *r0, eps: eps / 2.0 },
            Family::Linear => Family::Linear,
        }
    }
}

/// A radial profile `λ · v(t)` with `v` from a [`Family`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    pub family: Family,
    pub scale: f64,
}

impl fmt::Display for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.family.params().iter().map(|p| p.to_string()).collect();
        write!(f, "{}({})", self.family.tag(), params.join(","))?;
        if self.scale != 1.0 {
            write!(f, "*{}", self.scale)?;
        }
        Ok(())
    }
}

/// Smooth step ingredient `e^{−1/x}`; below `x = 1e−3` it underflows anyway.
fn flat_exp(x: &Jet) -> Result<Jet, JetError> {
    if x.value() < 1e-3 {
        return Jet::zero(x.base().clone(), x.order());
    }
    x.recip()?.scale(-1.0).compose(UnivariateFn::Exp)
}

impl RadialFunction {
    pub fn new(family: Family) -> Self {
        RadialFunction { family, scale: 1.0 }
    }

    pub fn gaussian(a: f64) -> Self {
        Self::new(Family::Gaussian { a })
    }

    pub fn power_decay(a: f64) -> Self {
        Self::new(Family::PowerDecay { a })
    }

    pub fn linear() -> Self {
        Self::new(Family::Linear)
    }

    pub fn polynomial_bump(coeffs: Vec<f64>, s0: f64, s1: f64) -> Self {
        Self::new(Family::PolynomialBump { coeffs, s0, s1 })
    }

    pub fn log_profile(r0: f64, eps: f64) -> Self {
        Self::new(Family::LogProfile { r0, eps })
    }

    /// The zero function, represented as a scaled profile.
    pub fn zero() -> Self {
        Self::gaussian(1.0).scaled(0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        RadialFunction {
            family: self.family.clone(),
            scale: self.scale * factor,
        }
    }

    pub fn refined(&self) -> Self {
        RadialFunction {
            family: self.family.refined(),
            scale: self.scale,
        }
    }

    /// One-variable jet of `v` at `t`.
    pub fn eval_jet(&self, t: f64, order: usize) -> Result<Jet, FuncError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(FuncError::Domain(t));
        }
        if order > MAX_ORDER {
            return Err(FuncError::Order(order));
        }
        let base: BasePoint = Arc::from(vec![t]);
        let x = Jet::variable(base.clone(), 0, order)?;
        let jet = match &self.family {
            Family::Gaussian { a } => x.try_mul(&x)?.scale(-a).compose(UnivariateFn::Exp)?,
            Family::PowerDecay { a } => x.try_mul(&x)?.add_scalar(1.0).compose(UnivariateFn::Pow(-a))?,
            Family::PolynomialBump { coeffs, s0, s1 } => {
                let mut p = Jet::zero(base.clone(), order)?;
                for &c in coeffs.iter().rev() {
                    p = p.try_mul(&x)?.add_scalar(c);
                }
                let inside = flat_exp(&x.scale(-1.0).add_scalar(*s1))?;
                let outside = flat_exp(&x.add_scalar(-s0))?;
                let chi = if outside.is_zero() {
                    Jet::constant(base.clone(), order, 1.0)?
                } else if inside.is_zero() {
                    Jet::zero(base.clone(), order)?
                } else {
                    inside.try_mul(&inside.try_add(&outside)?.recip()?)?
                };
                p.try_mul(&chi)?
            }
            Family::LogProfile { r0, eps } => x
                .try_mul(&x)?
                .add_scalar(eps * eps)
                .compose(UnivariateFn::Log)?
                .scale(-0.5)
                .add_scalar(r0.ln()),
            Family::Linear => x,
        };
        Ok(jet.scale(self.scale))
    }

    /// `[v(t), v'(t), ..., v^{(order)}(t)]`.
    pub fn derivatives(&self, t: f64, order: usize) -> Result<Vec<f64>, FuncError> {
        Ok(self.eval_jet(t, order)?.univariate_derivatives())
    }

    /// Bound on `|v^{(j)}(t)|` for `t ≥ t0`, when the family has one.
    pub fn envelope(&self, j: usize) -> Option<Envelope> {
        let s = self.scale.abs();
        if s == 0.0 {
            return Some(Envelope::power(0.0, 0.0, 0.0));
        }
        match &self.family {
            Family::Gaussian { a } => {
                // v^{(j)} = P_j(t) e^{−a t²}, P_{j+1} = P_j' − 2 a t P_j
                let mut p = vec![1.0];
                for _ in 0..j {
                    let mut next = vec![0.0; p.len() + 1];
                    for (i, &c) in p.iter().enumerate() {
                        if i > 0 {
                            next[i - 1] += i as f64 * c;
                        }
                        next[i + 1] -= 2.0 * a * c;
                    }
                    p = next;
                }
                let c: f64 = p.iter().map(|x| x.abs()).sum();
                Some(Envelope::new(s * c, j as f64, 0.0, *a, 1.0))
            }
            Family::PowerDecay { a } => {
                // v^{(j)} = Q_j(t) (1+t²)^{−a−j}, Q_{j+1} = Q_j' (1+t²) − 2 (a+j) t Q_j
                let mut q = vec![1.0];
                for m in 0..j {
                    let mut next = vec![0.0; q.len() + 1];
                    for (i, &c) in q.iter().enumerate() {
                        if i > 0 {
                            next[i - 1] += i as f64 * c;
                            next[i + 1] += i as f64 * c;
                        }
                        next[i + 1] -= 2.0 * (a + m as f64) * c;
                    }
                    q = next;
                }
                let c: f64 = q.iter().map(|x| x.abs()).sum();
                Some(Envelope::power(s * c, -2.0 * a - j as f64, 1.0))
            }
            Family::PolynomialBump { s1, .. } => Some(Envelope::power(0.0, 0.0, *s1)),
            Family::LogProfile { .. } | Family::Linear => None,
        }
    }

    /// Whether norms over an unbounded interval can be certified.
    pub fn has_envelope(&self) -> bool {
        self.envelope(0).is_some()
    }
}

/// `p*_θ = (θ + N) p / (N − k p)`, defined when `N > k p`.
pub fn critical_exponent(theta: f64, n: usize, k: usize, p: f64) -> Option<f64> {
    let denom = n as f64 - k as f64 * p;
    (denom > 0.0).then(|| (theta + n as f64) * p / denom)
}

fn norm_from(result: QuadResult) -> Result<NormValue, FuncError> {
    if result.diverging || result.value.is_infinite() {
        return Ok(NormValue::Infinite);
    }
    if !result.converged {
        return Err(FuncError::NotConverged {
            value: result.value,
            error: result.error_estimate,
        });
    }
    Ok(NormValue::Finite(result.value.max(0.0)))
}

/// `∫_0^R |v^{(j)}|^p φ^θ dt`.
pub fn seminorm_integral(
    v: &RadialFunction,
    j: usize,
    p: f64,
    theta: f64,
    w: &WarpSpec,
    cfg: &QuadConfig,
) -> Result<NormValue, FuncError> {
    if v.scale == 0.0 {
        return Ok(NormValue::Finite(0.0));
    }
    let f = Integrand::new(move |t: f64| match v.derivatives(t, j) {
        Ok(d) => d[j].abs().powf(p),
        Err(_) => f64::NAN,
    })
    .with_weight(theta)
    .with_envelope(v.envelope(j).map(|e| e.powf(p)));
    norm_from(integrate_weighted(&f, w, cfg)?)
}

/// `(∫_0^R |v|^q φ^θ dt)^{1/q}`.
pub fn lq_theta_norm_1d(
    v: &RadialFunction,
    q: f64,
    theta: f64,
    w: &WarpSpec,
    cfg: &QuadConfig,
) -> Result<NormValue, FuncError> {
    check_exponent(q)?;
    Ok(match seminorm_integral(v, 0, q, theta, w, cfg)? {
        NormValue::Finite(x) => NormValue::Finite(x.powf(1.0 / q)),
        NormValue::Infinite => NormValue::Infinite,
    })
}

fn check_exponent(p: f64) -> Result<(), FuncError> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(FuncError::Parameter(format!("exponent {p} must be ≥ 1")))
    }
}

/// `(Σ_{j≤k} ∫_0^R |v^{(j)}|^p φ^θ dt)^{1/p}`.
pub fn sobolev_norm_1d_weighted(
    v: &RadialFunction,
    k: usize,
    p: f64,
    theta: f64,
    w: &WarpSpec,
    cfg: &QuadConfig,
) -> Result<NormValue, FuncError> {
    check_exponent(p)?;
    let mut total = 0.0;
    for j in 0..=k {
        match seminorm_integral(v, j, p, theta, w, cfg)? {
            NormValue::Finite(x) => total += x,
            NormValue::Infinite => return Ok(NormValue::Infinite),
        }
    }
    Ok(NormValue::from_value(total.powf(1.0 / p)))
}

/// Norm of `W^{k,p}((0,R), φ^{N−1})`.
pub fn sobolev_norm_1d(
    v: &RadialFunction,
    k: usize,
    p: f64,
    n: usize,
    w: &WarpSpec,
    cfg: &QuadConfig,
) -> Result<NormValue, FuncError> {
    if n < 2 {
        return Err(FuncError::Parameter(format!("dimension {n} must be ≥ 2")));
    }
    sobolev_norm_1d_weighted(v, k, p, n as f64 - 1.0, w, cfg)
}

/// `∫_M |∇^j u|_g^p dV_g = ω_{N−1} ∫_0^R |∇^j u|_g^p φ^{N−1} dr` for `u = v(r)`.
pub fn manifold_seminorm_integral(
    v: &RadialFunction,
    j: usize,
    p: f64,
    m: &ManifoldSpec,
    cfg: &QuadConfig,
) -> Result<NormValue, FuncError> {
    check_exponent(p)?;
    if v.scale == 0.0 {
        return Ok(NormValue::Finite(0.0));
    }
    let w = &m.warp;
    let envelope = if w.is_bounded() {
        None
    } else if j <= 1 {
        // |∇^0 u| = |v|, |∇u|_g = |v'|
        v.envelope(j).map(|e| e.powf(p))
    } else {
        return Err(FuncError::UncertifiedTail(j));
    };
    let f = Integrand::new(move |t: f64| {
        let profile = match v.derivatives(t, j) {
            Ok(d) => d,
            Err(_) => return f64::NAN,
        };
        match covariant_frame(m, &m.default_point(t), &profile, j) {
            Ok(frame) => frame.norms()[j].powf(p),
            Err(_) => f64::NAN,
        }
    })
    .with_weight(m.dim() as f64 - 1.0)
    .with_envelope(envelope)
    .with_inner_cutoff(MIN_RADIUS);
    Ok(match norm_from(integrate_weighted(&f, w, cfg)?)? {
        NormValue::Finite(x) => NormValue::Finite(m.sphere_volume() * x),
        NormValue::Infinite => NormValue::Infinite,
    })
}

/// `‖u‖_{W^{k,p}(M)} = Σ_{j≤k} (∫_M |∇^j u|_g^p dV_g)^{1/p}`.
pub fn sobolev_norm_manifold(
    v: &RadialFunction,
    k: usize,
    p: f64,
    m: &ManifoldSpec,
    cfg: &QuadConfig,
) -> Result<NormValue, FuncError> {
    let mut total = 0.0;
    for j in 0..=k {
        match manifold_seminorm_integral(v, j, p, m, cfg)? {
            NormValue::Finite(x) => total += x.powf(1.0 / p),
            NormValue::Infinite => return Ok(NormValue::Infinite),
        }
    }
    Ok(NormValue::from_value(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::WarpKind;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn unit_ball() -> WarpSpec {
        WarpSpec::new(WarpKind::Euclidean, 1.0).unwrap()
    }

    #[test]
    fn eval_jet_examples() {
        assert_eq!(RadialFunction::linear().derivatives(3.0, 2).unwrap(), vec![3.0, 1.0, 0.0]);
        let d = RadialFunction::gaussian(1.0).derivatives(1e-9, 2).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-15 && d[1].abs() < 1e-8 && (d[2] + 2.0).abs() < 1e-12);
        let d = RadialFunction::power_decay(1.0).derivatives(1.0, 1).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-15 && (d[1] + 0.5).abs() < 1e-15);
        assert_eq!(RadialFunction::linear().eval_jet(0.0, 1).unwrap_err(), FuncError::Domain(0.0));
        assert!(RadialFunction::linear().eval_jet(1.0, 7).is_err());
    }

    #[test]
    fn bump_is_a_smooth_cutoff() {
        let v = RadialFunction::polynomial_bump(vec![1.0], 0.5, 1.0);
        assert_eq!(v.derivatives(0.2, 3).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(v.derivatives(1.2, 3).unwrap().iter().all(|&x| x == 0.0));
        let mid = v.derivatives(0.75, 0).unwrap()[0];
        assert!((mid - 0.5).abs() < 1e-15);
        let h = 1e-5;
        for &t in &[0.6, 0.7, 0.9] {
            let d = v.derivatives(t, 2).unwrap();
            let fd = (v.derivatives(t + h, 1).unwrap()[1] - v.derivatives(t - h, 1).unwrap()[1]) / (2.0 * h);
            assert!((fd - d[2]).abs() < 1e-5 * d[2].abs().max(1.0));
        }
    }

    #[test]
    fn log_profile_derivatives() {
        let v = RadialFunction::log_profile(2.0, 0.1);
        let t: f64 = 0.3;
        let d = v.derivatives(t, 1).unwrap();
        assert!((d[0] - (2.0 / (t * t + 0.01).sqrt()).ln()).abs() < 1e-15);
        assert!((d[1] + t / (t * t + 0.01)).abs() < 1e-15);
    }

    #[test]
    fn envelopes_bound_derivatives() {
        let fams = [
            RadialFunction::gaussian(0.7),
            RadialFunction::power_decay(1.5),
            RadialFunction::polynomial_bump(vec![1.0, -2.0, 0.5], 0.3, 1.1).scaled(-3.0),
        ];
        for v in &fams {
            for j in 0..=4 {
                let env = v.envelope(j).unwrap();
                for i in 0..400 {
                    let t = env.t0.max(1.0) + 0.1 * i as f64;
                    let d = v.derivatives(t, j).unwrap()[j].abs();
                    assert!(d <= env.eval(t) * (1.0 + 1e-12) + 1e-300, "{v} j={j} t={t}");
                }
            }
        }
        assert!(RadialFunction::linear().envelope(0).is_none());
    }

    #[test]
    fn lq_norm_examples() {
        let cfg = QuadConfig::default();
        let w = unit_ball();
        let n = lq_theta_norm_1d(&RadialFunction::linear(), 2.0, 2.0, &w, &cfg).unwrap();
        assert!(rel(n.value(), 0.2f64.sqrt()) < 1e-10);
        let n = lq_theta_norm_1d(&RadialFunction::linear(), 1.0, 0.0, &w, &cfg).unwrap();
        assert!(rel(n.value(), 0.5) < 1e-10);
    }

    #[test]
    fn gaussian_against_sinh_series() {
        // ∫_0^∞ e^{−2t²} sinh t dt = Σ_m m! / (2^{m+2} (2m+1)!)
        let mut oracle = 0.0;
        let mut term_fact = 1.0; // m!
        let mut odd_fact = 1.0; // (2m+1)!
        for m in 0..40 {
            if m > 0 {
                term_fact *= m as f64;
                odd_fact *= (2 * m) as f64 * (2 * m + 1) as f64;
            }
            oracle += term_fact / (2f64.powi(m + 2) * odd_fact);
        }
        let n = lq_theta_norm_1d(&RadialFunction::gaussian(1.0), 2.0, 1.0, &WarpSpec::hyperbolic(), &QuadConfig::default())
            .unwrap();
        assert!(rel(n.value().powi(2), oracle) < 1e-10, "{} vs {oracle}", n.value().powi(2));
    }

    #[test]
    fn sobolev_1d_examples() {
        let cfg = QuadConfig::default();
        let n = sobolev_norm_1d(&RadialFunction::linear(), 1, 2.0, 3, &unit_ball(), &cfg).unwrap();
        assert!(rel(n.value(), (8.0f64 / 15.0).sqrt()) < 1e-10);
        let z = sobolev_norm_1d(&RadialFunction::zero(), 2, 2.0, 3, &unit_ball(), &cfg).unwrap();
        assert_eq!(z, NormValue::Finite(0.0));
        let g = sobolev_norm_1d(&RadialFunction::gaussian(1.0), 2, 2.0, 3, &WarpSpec::hyperbolic(), &cfg).unwrap();
        assert!(g.is_finite() && g.value() > 0.0);
    }

    #[test]
    fn manifold_norm_k1_matches_layer_cake() {
        let cfg = QuadConfig::default();
        let m = ManifoldSpec::new(WarpSpec::hyperbolic(), 3).unwrap();
        let v = RadialFunction::gaussian(1.0);
        let man = sobolev_norm_manifold(&v, 1, 2.0, &m, &cfg).unwrap().value();
        let a = lq_theta_norm_1d(&v, 2.0, 2.0, &m.warp, &cfg).unwrap().value();
        let b = seminorm_integral(&v, 1, 2.0, 2.0, &m.warp, &cfg).unwrap().value().sqrt();
        let omega = m.sphere_volume().sqrt();
        assert!(rel(man, omega * (a + b)) < 1e-9);
    }

    #[test]
    fn counterexample_norm_is_infinite() {
        let cfg = QuadConfig::default();
        let m = ManifoldSpec::new(WarpSpec::new(WarpKind::TanhCap, 2.0).unwrap(), 2).unwrap();
        let n = sobolev_norm_manifold(&RadialFunction::linear(), 3, 2.0, &m, &cfg).unwrap();
        assert_eq!(n, NormValue::Infinite);
        let one_d = sobolev_norm_1d(&RadialFunction::linear(), 3, 2.0, 2, &m.warp, &cfg).unwrap();
        assert!(one_d.is_finite());
    }

    #[test]
    fn unbounded_higher_rank_is_refused() {
        let m = ManifoldSpec::new(WarpSpec::hyperbolic(), 3).unwrap();
        let err = sobolev_norm_manifold(&RadialFunction::gaussian(1.0), 2, 2.0, &m, &QuadConfig::default());
        assert_eq!(err.unwrap_err(), FuncError::UncertifiedTail(2));
    }

    #[test]
    fn critical_exponents() {
        assert_eq!(critical_exponent(1.0, 4, 1, 2.0), Some(5.0));
        assert_eq!(critical_exponent(0.0, 3, 1, 2.0), Some(6.0));
        assert_eq!(critical_exponent(0.0, 2, 1, 2.0), None);
    }

    #[test]
    fn family_tags_round_trip() {
        let f = Family::from_tag("polynomial_bump", &[0.2, 0.8, 1.0, 2.0]).unwrap();
        assert_eq!(Family::from_tag(f.tag(), &f.params()).unwrap(), f);
        assert!(Family::from_tag("gaussian", &[]).is_err());
        assert!(Family::from_tag("gaussian", &[-1.0]).is_err());
        assert!(Family::from_tag("spline", &[1.0]).is_err());
    }
}

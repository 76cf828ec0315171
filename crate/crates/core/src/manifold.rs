//! Warping functions and the polar-coordinate metric of a spherically
//! symmetric manifold `g = dr² + φ(r)² g̃`.
//!
//! The round metric `g̃` of the unit sphere is realised with nested-sine
//! coordinates: for the angular coordinate `a` (1-based among angles)
//! `g̃_aa = ∏_{b<a} sin²θ_b`, all off-diagonal entries vanish.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::jets::{BasePoint, Jet, JetError, UnivariateFn, MAX_ORDER, MAX_VARS};
use crate::quadrature::Envelope;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ManifoldError {
    #[error("r = {r} lies outside (0, {radius})")]
    Domain { r: f64, radius: f64 },
    #[error("invalid warping function: {0}")]
    InvalidWarp(String),
    #[error("dimension N = {0} is not supported (need 2 ≤ N ≤ {MAX_VARS})")]
    Dimension(usize),
    #[error("expected {expected} coordinates, got {got}")]
    PointLength { expected: usize, got: usize },
    #[error("chart singularity: sin θ_{coord} = 0 at θ = {angle}")]
    ChartSingularity { coord: usize, angle: f64 },
    #[error("jet order {0} exceeds the supported maximum")]
    Order(usize),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// The family a warping function belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum WarpKind {
    /// `φ(r) = r`
    Euclidean,
    /// `φ(r) = sinh r`
    Hyperbolic,
    /// `φ(r) = sin r`
    Spherical,
    /// `φ(r) = tanh r`
    TanhCap,
    /// `φ(r) = Σ_m c_m r^{2m+1}`; the list holds `c_0, c_1, ...` and `c_0`
    /// must equal 1. Only odd powers are representable, so the parity
    /// condition at the origin holds by construction.
    CustomOdd(Vec<f64>),
}

impl WarpKind {
    pub fn tag(&self) -> &'static str {
        match self {
            WarpKind::Euclidean => "euclidean",
            WarpKind::Hyperbolic => "hyperbolic",
            WarpKind::Spherical => "spherical",
            WarpKind::TanhCap => "tanh_cap",
            WarpKind::CustomOdd(_) => "custom_odd_series",
        }
    }

    pub fn from_tag(tag: &str) -> Option<WarpKind> {
        match tag {
            "euclidean" => Some(WarpKind::Euclidean),
            "hyperbolic" => Some(WarpKind::Hyperbolic),
            "spherical" => Some(WarpKind::Spherical),
            "tanh_cap" => Some(WarpKind::TanhCap),
            _ => None,
        }
    }

    /// Natural maximal radius of the model space.
    pub fn default_radius(&self) -> f64 {
        match self {
            WarpKind::Spherical => PI,
            _ => f64::INFINITY,
        }
    }
}

/// A validated warping function together with the radius of the ball.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpSpec {
    kind: WarpKind,
    radius: f64,
}

impl fmt::Display for WarpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radius.is_finite() {
            write!(f, "{}(R={})", self.kind.tag(), self.radius)
        } else {
            write!(f, "{}(R=inf)", self.kind.tag())
        }
    }
}

/// Result of [`WarpSpec::c_phi`].
#[derive(Debug, Clone, PartialEq)]
pub struct CPhiEstimate {
    pub value: f64,
    /// Set when `R = ∞`: the sampled range was `(0, tail_cutoff]`.
    pub tail_cutoff: Option<f64>,
    pub monotone: bool,
    pub grid_size: usize,
}

const VALIDATION_GRID: usize = 512;

impl WarpSpec {
    pub fn new(kind: WarpKind, radius: f64) -> Result<Self, ManifoldError> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(ManifoldError::InvalidWarp(format!("radius must be positive, got {radius}")));
        }
        if let WarpKind::CustomOdd(c) = &kind {
            if c.is_empty() || (c[0] - 1.0).abs() > 1e-14 {
                return Err(ManifoldError::InvalidWarp(
                    "custom odd series must start with coefficient 1 (φ'(0) = 1)".into(),
                ));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(ManifoldError::InvalidWarp("non-finite coefficient".into()));
            }
        }
        let spec = WarpSpec { kind, radius };
        spec.validate()?;
        Ok(spec)
    }

    /// The model space with its natural radius.
    pub fn builtin(kind: WarpKind) -> Result<Self, ManifoldError> {
        let r = kind.default_radius();
        Self::new(kind, r)
    }

    pub fn euclidean() -> Self {
        Self::builtin(WarpKind::Euclidean).expect("builtin warp")
    }

    pub fn hyperbolic() -> Self {
        Self::builtin(WarpKind::Hyperbolic).expect("builtin warp")
    }

    pub fn kind(&self) -> &WarpKind {
        &self.kind
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_bounded(&self) -> bool {
        self.radius.is_finite()
    }

    /// Same warp on a ball of a different radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self, ManifoldError> {
        Self::new(self.kind.clone(), radius)
    }

    fn validate(&self) -> Result<(), ManifoldError> {
        // origin conditions: φ(0) = 0, φ'(0) = 1, even derivatives vanish
        let base: BasePoint = Arc::from(vec![0.0]);
        let jet = self.lift(&Jet::variable(base, 0, MAX_ORDER)?)?;
        let d = jet.univariate_derivatives();
        for (i, di) in d.iter().enumerate() {
            let want = if i == 1 { 1.0 } else if i % 2 == 0 { 0.0 } else { *di };
            if (di - want).abs() > 1e-12 {
                return Err(ManifoldError::InvalidWarp(format!(
                    "derivative {i} at the origin is {di}, expected {want}"
                )));
            }
        }
        let upper = self.radius.min(64.0);
        for i in 1..VALIDATION_GRID {
            let t = upper * i as f64 / VALIDATION_GRID as f64;
            let v = self.eval(t);
            if !(v > 0.0) || !v.is_finite() {
                return Err(ManifoldError::InvalidWarp(format!("φ({t}) = {v} is not positive")));
            }
        }
        Ok(())
    }

    /// `φ(r)` as a plain number (no domain check).
    pub fn eval(&self, r: f64) -> f64 {
        match &self.kind {
            WarpKind::Euclidean => r,
            WarpKind::Hyperbolic => r.sinh(),
            WarpKind::Spherical => r.sin(),
            WarpKind::TanhCap => r.tanh(),
            WarpKind::CustomOdd(c) => {
                let r2 = r * r;
                r * c.iter().rev().fold(0.0, |acc, &ci| acc * r2 + ci)
            }
        }
    }

    /// `φ ∘ r` for an arbitrary jet `r`.
    pub fn lift(&self, r: &Jet) -> Result<Jet, JetError> {
        match &self.kind {
            WarpKind::Euclidean => Ok(r.clone()),
            WarpKind::Hyperbolic => r.compose(UnivariateFn::Sinh),
            WarpKind::Spherical => r.compose(UnivariateFn::Sin),
            WarpKind::TanhCap => r.compose(UnivariateFn::Tanh),
            WarpKind::CustomOdd(c) => {
                let r2 = r.try_mul(r)?;
                let mut acc = Jet::constant(r.base().clone(), r.order(), 0.0)?;
                for &ci in c.iter().rev() {
                    acc = acc.try_mul(&r2)?.add_scalar(ci);
                }
                acc.try_mul(r)
            }
        }
    }

    pub fn check_domain(&self, r: f64) -> Result<(), ManifoldError> {
        if r > 0.0 && r < self.radius {
            Ok(())
        } else {
            Err(ManifoldError::Domain { r, radius: self.radius })
        }
    }

    /// One-variable jet of `φ` at `r`.
    pub fn warp_eval(&self, r: f64, order: usize) -> Result<Jet, ManifoldError> {
        self.check_domain(r)?;
        if order > MAX_ORDER {
            return Err(ManifoldError::Order(order));
        }
        let base: BasePoint = Arc::from(vec![r]);
        Ok(self.lift(&Jet::variable(base, 0, order)?)?)
    }

    /// `[φ(r), φ'(r), ...]` up to `order`.
    pub fn derivatives(&self, r: f64, order: usize) -> Result<Vec<f64>, ManifoldError> {
        Ok(self.warp_eval(r, order)?.univariate_derivatives())
    }

    /// Bound `φ(t)^θ ≤ envelope(t)` valid for `t ≥ 1`, when one is known.
    pub fn power_envelope(&self, theta: f64) -> Option<Envelope> {
        if theta == 0.0 {
            return Some(Envelope::power(1.0, 0.0, 1.0));
        }
        match &self.kind {
            WarpKind::Euclidean => Some(Envelope::power(1.0, theta, 1.0)),
            WarpKind::Hyperbolic => {
                // (1 - e^{-2}) e^t / 2 ≤ sinh t ≤ e^t / 2 on t ≥ 1
                let c = if theta > 0.0 { 0.5 } else { 0.5 * (1.0 - (-2.0f64).exp()) };
                Some(Envelope::new(c.powf(theta), 0.0, -theta, 0.0, 1.0))
            }
            WarpKind::TanhCap => {
                let c = if theta > 0.0 { 1.0 } else { 1.0f64.tanh().powf(theta) };
                Some(Envelope::power(c, 0.0, 1.0))
            }
            WarpKind::CustomOdd(c) if theta > 0.0 => {
                let degree = 2.0 * (c.len() as f64 - 1.0) + 1.0;
                let sum: f64 = c.iter().map(|x| x.abs()).sum();
                Some(Envelope::power(sum.powf(theta), degree * theta, 1.0))
            }
            _ => None,
        }
    }

    /// Whether `φ` stays bounded away from 0 and ∞ as `r → R` (finite `R`).
    pub fn bounded_near_boundary(&self) -> bool {
        if !self.is_bounded() {
            return false;
        }
        let v = self.eval(self.radius * (1.0 - 1e-12));
        v.is_finite() && v > 1e-8
    }

    /// Grid estimate of `C_φ = inf_{0<r≤t} φ(t)/φ(r)`.
    ///
    /// The grid is logarithmically graded towards 0 and, for finite `R`,
    /// towards `R`. For `R = ∞` the grid stops at a tail cutoff `T*`, the
    /// first `T = 4·2^m` with `φ ≥ φ(T)` on sampled points of `[T, 2T]`.
    /// Returns exactly 1 when `φ` is nondecreasing on the grid.
    pub fn c_phi(&self, grid_size: usize) -> CPhiEstimate {
        let grid_size = grid_size.max(64);
        let (upper, tail_cutoff) = if self.is_bounded() {
            (self.radius, None)
        } else {
            let t = self.tail_cutoff();
            (t, Some(t))
        };
        let grid = self.c_phi_grid(upper, grid_size);
        let values: Vec<f64> = grid.iter().map(|&t| self.eval(t)).collect();
        let monotone = values.windows(2).all(|w| w[1] >= w[0]);
        let value = if monotone {
            1.0
        } else {
            let mut running_max = 0.0f64;
            let mut inf = f64::INFINITY;
            for &v in &values {
                running_max = running_max.max(v);
                inf = inf.min(v / running_max);
            }
            if inf.is_finite() { inf.max(0.0) } else { 0.0 }
        };
        CPhiEstimate {
            value,
            tail_cutoff,
            monotone,
            grid_size,
        }
    }

    /// Sorted sample points used by [`WarpSpec::c_phi`].
    pub fn c_phi_grid(&self, upper: f64, grid_size: usize) -> Vec<f64> {
        let n = grid_size as f64;
        let lo = upper / (n * n);
        if self.is_bounded() {
            let half = grid_size / 2;
            let mut pts = log_spaced(lo, upper / 2.0, half);
            let mut near_end: Vec<f64> = log_spaced(lo, upper / 2.0, grid_size - half)
                .into_iter()
                .map(|d| upper - d)
                .collect();
            near_end.reverse();
            pts.extend(near_end.into_iter().filter(|&t| t > upper / 2.0));
            pts
        } else {
            log_spaced(lo, upper, grid_size)
        }
    }

    fn tail_cutoff(&self) -> f64 {
        let mut t = 4.0;
        while t < 256.0 {
            let ft = self.eval(t);
            let tail_ok = (0..=64).all(|i| self.eval(t * (1.0 + i as f64 / 64.0)) >= ft);
            if tail_ok {
                return t;
            }
            t *= 2.0;
        }
        t
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Volume `ω_{N−1}` of the unit sphere `S^{N−1} ⊂ ℝ^N`.
pub fn sphere_volume(dim: usize) -> Result<f64, ManifoldError> {
    if dim < 2 {
        return Err(ManifoldError::Dimension(dim));
    }
    // ω_1 = 2π, ω_2 = 4π, ω_{n} = 2π ω_{n-2} / (n - 1)
    let (mut omega, mut n) = if dim % 2 == 0 { (2.0 * PI, 1) } else { (4.0 * PI, 2) };
    while n < dim - 1 {
        n += 2;
        omega *= 2.0 * PI / (n - 1) as f64;
    }
    Ok(omega)
}

/// Diagonal metric in polar coordinates, as jets in all `N` coordinates.
#[derive(Debug, Clone)]
pub struct DiagonalMetric {
    pub base: BasePoint,
    /// `g_ii`
    pub g: Vec<Jet>,
    /// `g^ii`
    pub g_inv: Vec<Jet>,
}

impl DiagonalMetric {
    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn order(&self) -> usize {
        self.g[0].order()
    }
}

/// A spherically symmetric manifold: warp, radius and dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    pub warp: WarpSpec,
    dim: usize,
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} N={}", self.warp, self.dim)
    }
}

impl ManifoldSpec {
    pub fn new(warp: WarpSpec, dim: usize) -> Result<Self, ManifoldError> {
        if !(2..=MAX_VARS).contains(&dim) {
            return Err(ManifoldError::Dimension(dim));
        }
        Ok(ManifoldSpec { warp, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sphere_volume(&self) -> f64 {
        sphere_volume(self.dim).expect("dimension validated")
    }

    /// `(r, π/2, ..., π/2)`, where all nested-sine factors equal one.
    pub fn default_point(&self, r: f64) -> Vec<f64> {
        let mut p = vec![FRAC_PI_2; self.dim];
        p[0] = r;
        p
    }

    /// Metric jets `g_ii`, `g^ii` of the given order at `point`.
    pub fn metric_at(&self, point: &[f64], order: usize) -> Result<DiagonalMetric, ManifoldError> {
        if point.len() != self.dim {
            return Err(ManifoldError::PointLength {
                expected: self.dim,
                got: point.len(),
            });
        }
        self.warp.check_domain(point[0])?;
        if order > MAX_ORDER {
            return Err(ManifoldError::Order(order));
        }
        // the last angle never appears in a metric factor
        for (coord, &angle) in point.iter().enumerate().take(self.dim - 1).skip(1) {
            if angle.sin().abs() < 1e-12 {
                return Err(ManifoldError::ChartSingularity { coord, angle });
            }
        }
        let base: BasePoint = Arc::from(point.to_vec());
        let r = Jet::variable(base.clone(), 0, order)?;
        let phi = self.warp.lift(&r)?;
        let mut factor = phi.try_mul(&phi)?;

        let mut g = Vec::with_capacity(self.dim);
        g.push(Jet::constant(base.clone(), order, 1.0)?);
        for a in 1..self.dim {
            g.push(factor.clone());
            if a + 1 < self.dim {
                let s = Jet::variable(base.clone(), a, order)?.compose(UnivariateFn::Sin)?;
                factor = factor.try_mul(&s.try_mul(&s)?)?;
            }
        }
        let mut g_inv = Vec::with_capacity(self.dim);
        g_inv.push(g[0].clone());
        for gi in &g[1..] {
            g_inv.push(gi.recip()?);
        }
        Ok(DiagonalMetric { base, g, g_inv })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn warp_eval_examples() {
        let h = WarpSpec::hyperbolic();
        let d = h.derivatives(1e-8, 3).unwrap();
        assert!(d[0].abs() < 1e-7 && (d[1] - 1.0).abs() < 1e-12);
        assert!(d[2].abs() < 1e-7 && (d[3] - 1.0).abs() < 1e-12);

        let e = WarpSpec::euclidean();
        assert_eq!(e.derivatives(2.0, 2).unwrap(), vec![2.0, 1.0, 0.0]);

        let s = WarpSpec::builtin(WarpKind::Spherical).unwrap();
        let d = s.derivatives(FRAC_PI_2, 2).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-15 && d[1].abs() < 1e-15 && (d[2] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn warp_eval_domain() {
        let s = WarpSpec::builtin(WarpKind::Spherical).unwrap();
        assert!(matches!(s.warp_eval(4.0, 1), Err(ManifoldError::Domain { .. })));
        assert!(matches!(s.warp_eval(0.0, 1), Err(ManifoldError::Domain { .. })));
        assert!(matches!(s.warp_eval(1.0, 7), Err(ManifoldError::Order(7))));
    }

    #[test]
    fn finite_differences_agree_with_jets() {
        let kinds = [
            WarpKind::Euclidean,
            WarpKind::Hyperbolic,
            WarpKind::Spherical,
            WarpKind::TanhCap,
            WarpKind::CustomOdd(vec![1.0, 0.1, 0.01]),
        ];
        let h = 1e-5;
        for kind in kinds {
            let w = WarpSpec::new(kind, 3.0).unwrap();
            for &r in &[0.3, 1.0, 2.2] {
                let d = w.derivatives(r, 3).unwrap();
                for order in 1..=3 {
                    let lo = w.derivatives(r - h, 3).unwrap()[order - 1];
                    let hi = w.derivatives(r + h, 3).unwrap()[order - 1];
                    let fd = (hi - lo) / (2.0 * h);
                    let scale = d[order].abs().max(1.0);
                    assert!((fd - d[order]).abs() / scale < 1e-7, "{w} r={r} order={order}");
                }
            }
        }
    }

    #[test]
    fn invalid_warps_rejected() {
        assert!(WarpSpec::new(WarpKind::CustomOdd(vec![2.0]), 1.0).is_err());
        assert!(WarpSpec::new(WarpKind::CustomOdd(vec![]), 1.0).is_err());
        // sin goes negative past π
        assert!(WarpSpec::new(WarpKind::Spherical, 4.0).is_err());
        // r - r³/6 has a root at √6
        assert!(WarpSpec::new(WarpKind::CustomOdd(vec![1.0, -1.0 / 6.0]), 3.0).is_err());
        assert!(WarpSpec::new(WarpKind::Euclidean, -1.0).is_err());
    }

    #[test]
    fn c_phi_examples() {
        assert_eq!(WarpSpec::hyperbolic().c_phi(256).value, 1.0);
        assert_eq!(WarpSpec::euclidean().c_phi(256).value, 1.0);
        assert!(WarpSpec::hyperbolic().c_phi(64).tail_cutoff.is_some());
        let s = WarpSpec::builtin(WarpKind::Spherical).unwrap();
        let coarse = s.c_phi(64).value;
        let fine = s.c_phi(4096).value;
        assert!(fine <= 1e-3, "spherical C_φ estimate {fine}");
        assert!(fine <= coarse);
    }

    #[test]
    fn c_phi_is_a_lower_bound_on_grid_pairs() {
        let s = WarpSpec::new(WarpKind::Spherical, 3.0).unwrap();
        let est = s.c_phi(128);
        let grid = s.c_phi_grid(3.0, 128);
        for (i, &r) in grid.iter().enumerate() {
            for &t in &grid[i..] {
                assert!(est.value <= s.eval(t) / s.eval(r) + 1e-15);
            }
        }
    }

    #[test]
    fn sphere_volumes() {
        assert!(rel(sphere_volume(2).unwrap(), 2.0 * PI) < 1e-15);
        assert!(rel(sphere_volume(3).unwrap(), 4.0 * PI) < 1e-15);
        assert!(rel(sphere_volume(4).unwrap(), 2.0 * PI * PI) < 1e-15);
        assert!(rel(sphere_volume(5).unwrap(), 8.0 * PI * PI / 3.0) < 1e-15);
        assert!(sphere_volume(1).is_err());
    }

    #[test]
    fn metric_examples() {
        let m = ManifoldSpec::new(WarpSpec::hyperbolic(), 3).unwrap();
        let g = m.metric_at(&[1.0, FRAC_PI_2, 1.0], 2).unwrap();
        assert_eq!(g.g[0].coeffs()[0], 1.0);
        assert!(g.g[0].coeffs()[1..].iter().all(|&c| c == 0.0));
        let s2 = 1.0f64.sinh().powi(2);
        assert!(rel(g.g[1].value(), s2) < 1e-15);
        assert!(rel(g.g[2].value(), s2) < 1e-15);
        assert!(rel(g.g_inv[2].value(), 1.0 / s2) < 1e-15);

        let e = ManifoldSpec::new(WarpSpec::euclidean(), 2).unwrap();
        let g = e.metric_at(&[2.0, 0.3], 1).unwrap();
        assert_eq!(g.g[1].value(), 4.0);
    }

    #[test]
    fn metric_nested_sines_and_singularity() {
        let m = ManifoldSpec::new(WarpSpec::euclidean(), 4).unwrap();
        let g = m.metric_at(&[2.0, 0.5, 1.2, 0.0], 1).unwrap();
        let s1 = 0.5f64.sin().powi(2);
        let s2 = 1.2f64.sin().powi(2);
        assert!(rel(g.g[2].value(), 4.0 * s1) < 1e-15);
        assert!(rel(g.g[3].value(), 4.0 * s1 * s2) < 1e-15);
        assert!(matches!(
            m.metric_at(&[2.0, 0.0, 1.0, 1.0], 1),
            Err(ManifoldError::ChartSingularity { coord: 1, .. })
        ));
        assert!(m.metric_at(&[2.0, 1.0], 1).is_err());
        let d = m.metric_at(&m.default_point(1.5), 2).unwrap();
        for a in 1..4 {
            assert!(rel(d.g[a].value(), 2.25) < 1e-15);
        }
    }
}

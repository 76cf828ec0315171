//! Christoffel symbols of the warped metric and covariant derivatives of
//! radial functions `u(x) = v(r)`.
//!
//! Coordinates are 0-based: index 0 is `r`, indices `1..N` are the angles
//! of the nested-sine chart. Tensor components are stored densely with
//! the first index most significant.

use std::sync::Arc;

use thiserror::Error;

use crate::funcspace::{FuncError, RadialFunction};
use crate::jets::{BasePoint, Jet, JetAccumulator, JetError, MAX_ORDER};
use crate::manifold::{DiagonalMetric, ManifoldError, ManifoldSpec};

/// Closest approach to the origin at which geometry is evaluated.
pub const MIN_RADIUS: f64 = 1e-6;

/// Highest covariant-derivative rank supported.
pub const MAX_RANK: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("r = {0} is closer to the origin than {MIN_RADIUS}")]
    Proximity(f64),
    #[error("rank {0} exceeds the supported maximum {MAX_RANK}")]
    Rank(usize),
    #[error("metric jets must have order ≥ 1 to differentiate")]
    MetricOrder,
    #[error("singular metric: g_{index}{index} = 0")]
    SingularMetric { index: usize },
    #[error("need {needed} derivatives of the profile, got {got}")]
    ProfileLength { needed: usize, got: usize },
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Function(#[from] FuncError),
}

/// `Γ^k_ij` at one base point, jet-valued.
#[derive(Debug, Clone)]
pub struct ChristoffelTable {
    dim: usize,
    entries: Vec<Jet>,
    /// for each `(i, j)`: the upper indices `k` with `Γ^k_ij` not identically zero
    support: Vec<Vec<usize>>,
}

impl ChristoffelTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_ij`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> &Jet {
        &self.entries[(k * self.dim + i) * self.dim + j]
    }

    /// Upper indices `k` for which `Γ^k_ij` has a nonzero coefficient.
    pub fn support(&self, i: usize, j: usize) -> &[usize] {
        &self.support[i * self.dim + j]
    }
}

/// Christoffel symbols from a diagonal metric via
/// `Γ^k_ij = ½ g^kk (∂_i g_jk + ∂_j g_ik − ∂_k g_ij)`.
pub fn christoffel_at(metric: &DiagonalMetric) -> Result<ChristoffelTable, GeometryError> {
    let n = metric.dim();
    let order = metric.order();
    if order == 0 {
        return Err(GeometryError::MetricOrder);
    }
    for (index, g) in metric.g.iter().enumerate() {
        if g.value() == 0.0 {
            return Err(GeometryError::SingularMetric { index });
        }
    }
    // dg[a][m] = ∂_m g_aa
    let mut dg = Vec::with_capacity(n);
    for g in &metric.g {
        let row: Result<Vec<Jet>, JetError> = (0..n).map(|m| g.partial(m)).collect();
        dg.push(row?);
    }
    let half_inv: Vec<Jet> = metric.g_inv.iter().map(|g| g.truncate(order - 1).scale(0.5)).collect();

    let mut entries = Vec::with_capacity(n * n * n);
    let mut support = vec![Vec::new(); n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = JetAccumulator::new(metric.base.clone(), order - 1)?;
                if j == k {
                    acc.add(&dg[k][i], 1.0)?;
                }
                if i == k {
                    acc.add(&dg[k][j], 1.0)?;
                }
                if i == j {
                    acc.add(&dg[i][k], -1.0)?;
                }
                let gamma = half_inv[k].try_mul(&acc.finish())?;
                if !gamma.is_zero() {
                    support[i * n + j].push(k);
                }
                entries.push(gamma);
            }
        }
    }
    Ok(ChristoffelTable { dim: n, entries, support })
}

/// The components of `∇^j u` at a point; each entry is a jet of order `k − j`.
#[derive(Debug, Clone)]
pub struct CovTensor {
    rank: usize,
    dim: usize,
    components: Vec<Jet>,
}

impl CovTensor {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Jet] {
        &self.components
    }

    pub fn base(&self) -> &BasePoint {
        self.components[0].base()
    }

    fn flat(&self, indices: &[usize]) -> usize {
        indices.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    /// Component jet for the index tuple `(i_1, ..., i_rank)`.
    pub fn component(&self, indices: &[usize]) -> &Jet {
        assert_eq!(indices.len(), self.rank, "index tuple length must equal the rank");
        &self.components[self.flat(indices)]
    }

    /// Value of the component `(i_1, ..., i_rank)` at the base point.
    pub fn value(&self, indices: &[usize]) -> f64 {
        self.component(indices).value()
    }

    /// The purely radial component `(0, ..., 0)`.
    pub fn radial_value(&self) -> f64 {
        self.components[0].value()
    }
}

/// Metric, connection and covariant derivatives `∇^0 u, ..., ∇^k u` at one point.
#[derive(Debug, Clone)]
pub struct CovariantFrame {
    pub metric: DiagonalMetric,
    pub christoffel: Option<ChristoffelTable>,
    pub tensors: Vec<CovTensor>,
}

impl CovariantFrame {
    /// `|∇^j u|_g` for `j = 0..=k`.
    pub fn norms(&self) -> Vec<f64> {
        self.tensors.iter().map(|t| pointwise_norm(t, &self.metric)).collect()
    }
}

fn check_point(point: &[f64], k: usize) -> Result<(), GeometryError> {
    if k > MAX_RANK {
        return Err(GeometryError::Rank(k));
    }
    if let Some(&r) = point.first() {
        if r < MIN_RADIUS {
            return Err(GeometryError::Proximity(r));
        }
    }
    Ok(())
}

/// Runs the covariant-derivative recursion for `u = v(r)` given
/// `profile = [v(r), v'(r), ..., v^{(k)}(r)]`, `r = point[0]`.
pub fn covariant_frame(
    m: &ManifoldSpec,
    point: &[f64],
    profile: &[f64],
    k: usize,
) -> Result<CovariantFrame, GeometryError> {
    check_point(point, k)?;
    if profile.len() < k + 1 {
        return Err(GeometryError::ProfileLength {
            needed: k + 1,
            got: profile.len(),
        });
    }
    let metric = m.metric_at(point, k)?;
    let n = m.dim();
    let base = metric.base.clone();

    let mut taylor = Vec::with_capacity(k + 1);
    let mut fact = 1.0;
    for (i, d) in profile.iter().take(k + 1).enumerate() {
        if i > 0 {
            fact *= i as f64;
        }
        taylor.push(d / fact);
    }
    let u = Jet::from_univariate(base.clone(), 0, k, &taylor)?;
    let mut tensors = vec![CovTensor {
        rank: 0,
        dim: n,
        components: vec![u],
    }];
    if k == 0 {
        return Ok(CovariantFrame {
            metric,
            christoffel: None,
            tensors,
        });
    }
    let gamma = christoffel_at(&metric)?;
    for _ in 0..k {
        let next = covariant_step(tensors.last().expect("rank 0 present"), &gamma, &base)?;
        tensors.push(next);
    }
    Ok(CovariantFrame {
        metric,
        christoffel: Some(gamma),
        tensors,
    })
}

/// `(∇T)_{i_1 i_2 ...} = ∂_{i_1} T_{i_2 ...} − Σ_ℓ Σ_α Γ^α_{i_1 i_ℓ} T_{i_2 .. α .. }`.
fn covariant_step(t: &CovTensor, gamma: &ChristoffelTable, base: &BasePoint) -> Result<CovTensor, GeometryError> {
    let n = t.dim;
    let rank = t.rank;
    let order = t.components[0].order() - 1;
    let block = n.pow(rank as u32);
    let mut components = Vec::with_capacity(n * block);
    let mut idx = vec![0usize; rank];
    for i1 in 0..n {
        for flat in 0..block {
            unflatten(flat, n, &mut idx);
            let mut acc = JetAccumulator::new(base.clone(), order)?;
            acc.add(&t.components[flat].partial(i1)?, 1.0)?;
            for pos in 0..rank {
                let il = idx[pos];
                let stride = n.pow((rank - 1 - pos) as u32);
                let cleared = flat - il * stride;
                for &alpha in gamma.support(i1, il) {
                    let comp = &t.components[cleared + alpha * stride];
                    if comp.is_zero() {
                        continue;
                    }
                    let term = gamma.get(alpha, i1, il).try_mul(comp)?;
                    acc.add(&term, -1.0)?;
                }
            }
            components.push(acc.finish());
        }
    }
    Ok(CovTensor {
        rank: rank + 1,
        dim: n,
        components,
    })
}

fn unflatten(mut flat: usize, n: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

/// `∇^0 u, ..., ∇^k u` for `u = v(r)` at `point`.
pub fn covariant_derivatives(
    v: &RadialFunction,
    m: &ManifoldSpec,
    point: &[f64],
    k: usize,
) -> Result<Vec<CovTensor>, GeometryError> {
    check_point(point, k)?;
    let profile = v.derivatives(point[0], k)?;
    Ok(covariant_frame(m, point, &profile, k)?.tensors)
}

/// `|T|_g = (Σ g^{i_1 i_1}⋯g^{i_j i_j} T_{i_1..i_j}²)^{1/2}` for diagonal `g`.
pub fn pointwise_norm(t: &CovTensor, metric: &DiagonalMetric) -> f64 {
    let n = t.dim;
    let g_inv: Vec<f64> = metric.g_inv.iter().map(Jet::value).collect();
    let mut idx = vec![0usize; t.rank];
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (flat, c) in t.components.iter().enumerate() {
        let value = c.value();
        if value == 0.0 {
            continue;
        }
        unflatten(flat, n, &mut idx);
        let weight: f64 = idx.iter().map(|&i| g_inv[i]).product();
        let x = weight * value * value;
        let s = sum + x;
        comp += if sum >= x { (sum - s) + x } else { (x - s) + sum };
        sum = s;
    }
    (sum + comp).sqrt()
}

/// `|(∇^k u)_{0..0} − v^{(k)}(r)|` at the default angles.
pub fn radial_identity_gap(v: &RadialFunction, m: &ManifoldSpec, r: f64, k: usize) -> Result<f64, GeometryError> {
    check_point(&[r], k)?;
    let profile = v.derivatives(r, k)?;
    let frame = covariant_frame(m, &m.default_point(r), &profile, k)?;
    Ok((frame.tensors[k].radial_value() - profile[k]).abs())
}

/// `(∇^k u)_{0..011} φ^{k−3} / (φ'^{k−1} g̃_11)` for `u = r`, which tends to
/// `(−1)^k (k−2)!` as `r → 0`.
pub fn asymptotic_leading_ratio(m: &ManifoldSpec, k: usize, r: f64) -> Result<f64, GeometryError> {
    if !(2..=MAX_RANK).contains(&k) {
        return Err(GeometryError::Rank(k));
    }
    let profile = [r, 1.0, 0.0, 0.0, 0.0];
    let frame = covariant_frame(m, &m.default_point(r), &profile, k)?;
    let mut idx = vec![0usize; k];
    idx[k - 2] = 1;
    idx[k - 1] = 1;
    let comp = frame.tensors[k].value(&idx);
    let d = m.warp.derivatives(r, 1)?;
    // g̃_11 = 1 in the nested-sine chart
    Ok(comp * d[0].powi(k as i32 - 3) / d[1].powi(k as i32 - 1))
}

/// The point `(r, θ_1, ..., θ_{N−1})` with all angles equal to `theta`.
pub fn uniform_point(m: &ManifoldSpec, r: f64, theta: f64) -> Vec<f64> {
    let mut p = vec![theta; m.dim()];
    p[0] = r;
    p
}

/// Base point helper shared with tests.
pub fn base_point(point: &[f64]) -> BasePoint {
    Arc::from(point.to_vec())
}

const _: () = assert!(MAX_RANK <= MAX_ORDER);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{WarpKind, WarpSpec};
    use std::f64::consts::FRAC_PI_2;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn hyperbolic(n: usize) -> ManifoldSpec {
        ManifoldSpec::new(WarpSpec::hyperbolic(), n).unwrap()
    }

    fn euclidean(n: usize) -> ManifoldSpec {
        ManifoldSpec::new(WarpSpec::euclidean(), n).unwrap()
    }

    #[test]
    fn christoffel_examples() {
        let m = euclidean(2);
        let g = m.metric_at(&[2.0, 0.7], 1).unwrap();
        let t = christoffel_at(&g).unwrap();
        assert!(rel(t.get(1, 0, 1).value(), 0.5) < 1e-15);
        assert_eq!(t.get(0, 0, 0).value(), 0.0);

        let m = hyperbolic(2);
        let g = m.metric_at(&[1.0, 0.3], 1).unwrap();
        let t = christoffel_at(&g).unwrap();
        let want = -(1.0f64.sinh() * 1.0f64.cosh());
        assert!(rel(t.get(0, 1, 1).value(), want) < 1e-14);
        assert!((want + 1.81343).abs() < 1e-5);
    }

    #[test]
    fn christoffel_matches_finite_difference_of_metric() {
        let m = hyperbolic(2);
        let h = 1e-5;
        let g = |r: f64| r.sinh().powi(2);
        let fd = (g(1.0 + h) - g(1.0 - h)) / (2.0 * h);
        let t = christoffel_at(&m.metric_at(&[1.0, 0.3], 1).unwrap()).unwrap();
        assert!(rel(t.get(0, 1, 1).value(), -0.5 * fd) < 1e-8);
    }

    #[test]
    fn christoffel_needs_order() {
        let g = euclidean(3).metric_at(&[1.0, 1.0, 1.0], 0).unwrap();
        assert_eq!(christoffel_at(&g).unwrap_err(), GeometryError::MetricOrder);
    }

    #[test]
    fn gradient_of_square() {
        let m = hyperbolic(4);
        let r = 1.3;
        let frame = covariant_frame(&m, &m.default_point(r), &[r * r, 2.0 * r, 2.0], 1).unwrap();
        let t = &frame.tensors[1];
        assert!(rel(t.value(&[0]), 2.0 * r) < 1e-15);
        for a in 1..4 {
            assert_eq!(t.value(&[a]), 0.0);
        }
        assert!(rel(frame.norms()[1], 2.0 * r) < 1e-15);
    }

    #[test]
    fn hessian_angular_block() {
        let m = hyperbolic(3);
        let (r, th): (f64, f64) = (0.8, 1.1);
        let point = [r, th, 0.4];
        let profile = [r.cos(), -r.sin(), -r.cos()];
        let frame = covariant_frame(&m, &point, &profile, 2).unwrap();
        let t = &frame.tensors[2];
        let pp = r.sinh() * r.cosh();
        assert!(rel(t.value(&[1, 1]), pp * profile[1]) < 1e-13);
        assert!(rel(t.value(&[2, 2]), pp * th.sin().powi(2) * profile[1]) < 1e-13);
        assert!(t.value(&[1, 2]).abs() < 1e-14);
        assert!(t.value(&[0, 1]).abs() < 1e-14);
        assert!(rel(t.value(&[0, 0]), profile[2]) < 1e-14);
    }

    #[test]
    fn euclidean_hessian_norm() {
        for n in 2..=5 {
            let m = euclidean(n);
            let r = 1.7;
            let frame = covariant_frame(&m, &m.default_point(r), &[r * r / 2.0, r, 1.0], 2).unwrap();
            assert!(rel(frame.norms()[2], (n as f64).sqrt()) < 1e-12);
        }
    }

    #[test]
    fn rank_limits_and_proximity() {
        let m = euclidean(2);
        let p = [0.0; 6];
        assert_eq!(covariant_frame(&m, &[1.0, 1.0], &p, 5).unwrap_err(), GeometryError::Rank(5));
        assert_eq!(
            covariant_frame(&m, &[1e-7, 1.0], &p, 2).unwrap_err(),
            GeometryError::Proximity(1e-7)
        );
        assert!(matches!(
            covariant_frame(&m, &[1.0, 1.0], &p[..2], 3),
            Err(GeometryError::ProfileLength { .. })
        ));
    }

    #[test]
    fn radial_component_is_profile_derivative() {
        let m = ManifoldSpec::new(WarpSpec::builtin(WarpKind::TanhCap).unwrap(), 4).unwrap();
        let r: f64 = 0.9;
        let e = (-r * r).exp();
        let profile = [
            e,
            -2.0 * r * e,
            (4.0 * r * r - 2.0) * e,
            (12.0 * r - 8.0 * r.powi(3)) * e,
            (16.0 * r.powi(4) - 48.0 * r * r + 12.0) * e,
        ];
        let frame = covariant_frame(&m, &m.default_point(r), &profile, 4).unwrap();
        for (j, t) in frame.tensors.iter().enumerate() {
            assert!((t.radial_value() - profile[j]).abs() < 1e-12, "rank {j}");
        }
    }

    #[test]
    fn asymptotic_ratio_examples() {
        for m in [euclidean(3), hyperbolic(2)] {
            for &r in &[1e-3, 0.5, 2.0] {
                assert!(rel(asymptotic_leading_ratio(&m, 2, r).unwrap(), 1.0) < 1e-14);
            }
        }
        let e = euclidean(3);
        assert!(rel(asymptotic_leading_ratio(&e, 3, 0.5).unwrap(), -1.0) < 1e-12);
        assert!(rel(asymptotic_leading_ratio(&e, 4, 0.5).unwrap(), 2.0) < 1e-12);
        // hyperbolic rank 3: tanh²r − 1
        let h = hyperbolic(3);
        let r = 0.7;
        assert!(rel(asymptotic_leading_ratio(&h, 3, r).unwrap(), r.tanh().powi(2) - 1.0) < 1e-12);
        assert!(rel(asymptotic_leading_ratio(&h, 3, 1e-3).unwrap(), -1.0) < 1e-2);
        assert!(asymptotic_leading_ratio(&h, 1, 0.5).is_err());
    }

    #[test]
    fn uniform_point_layout() {
        let m = euclidean(3);
        assert_eq!(uniform_point(&m, 2.0, FRAC_PI_2), m.default_point(2.0));
    }
}

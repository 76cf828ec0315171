//! Truncated multivariate Taylor series ("jets").
//!
//! A [`Jet`] stores the Taylor coefficients of a smooth function of
//! `nvars` variables about a base point, up to a maximum total degree
//! `order`. Coefficients are raw Taylor coefficients, i.e. the coefficient
//! of the monomial `x^α` is `∂^α f / α!`. Every extraction helper that hands
//! back derivatives ([`Jet::derivative`], [`Jet::univariate_derivatives`])
//! multiplies the factorials back in.
//!
//! Storage is dense. Monomials are enumerated in graded order (by total
//! degree, then lexicographically), so the monomials of degree `≤ d` form a
//! prefix of the monomials of degree `≤ d + 1` and truncation is a slice.
//!
//! Variables are indexed from 0. In the geometry code variable 0 is the
//! radial coordinate `r` and variables `1..N` are the angles.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

/// Largest supported number of variables.
pub const MAX_VARS: usize = 8;
/// Largest supported truncation order.
pub const MAX_ORDER: usize = 6;

/// Shared base point of a family of jets.
pub type BasePoint = Arc<[f64]>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("jet dimension mismatch: {0} vs {1} variables")]
    Dimension(usize, usize),
    #[error("jets expanded about different base points")]
    BaseMismatch,
    #[error("variable index {index} out of range for {nvars} variables")]
    VarIndex { index: usize, nvars: usize },
    #[error("jet of order 0 cannot be differentiated")]
    OrderExhausted,
    #[error("unsupported jet size: {nvars} variables, order {order}")]
    Unsupported { nvars: usize, order: usize },
    #[error("singular composition: {func} at {at}")]
    SingularComposition { func: &'static str, at: f64 },
    #[error("{func} is not defined at {at}")]
    Domain { func: &'static str, at: f64 },
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
}

/// Monomial bookkeeping for a fixed `(nvars, order)`.
struct Layout {
    exps: Vec<Vec<u8>>,
    degree: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// `(a, b, c)` with `x^a · x^b = x^c` and `deg c ≤ order`.
    mul: Vec<(u32, u32, u32)>,
    /// Per variable: `(source, destination, factor)` for the formal partial.
    partial: Vec<Vec<(u32, u32, f64)>>,
}

fn graded_monomials(nvars: usize, order: usize) -> Vec<Vec<u8>> {
    fn rec(nvars: usize, remaining: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == nvars - 1 {
            prefix.push(remaining as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e as u8);
            rec(nvars, remaining - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for d in 0..=order {
        rec(nvars, d, &mut Vec::with_capacity(nvars), &mut out);
    }
    out
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Self {
        let exps = graded_monomials(nvars, order);
        let degree: Vec<usize> = exps
            .iter()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .collect();
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();

        let mut mul = Vec::new();
        for (a, ea) in exps.iter().enumerate() {
            for (b, eb) in exps.iter().enumerate() {
                if degree[a] + degree[b] > order {
                    continue;
                }
                let ec: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                mul.push((a as u32, b as u32, index[&ec] as u32));
            }
        }

        let partial = (0..nvars)
            .map(|var| {
                let mut table = Vec::new();
                for (src, e) in exps.iter().enumerate() {
                    if e[var] == 0 {
                        continue;
                    }
                    let mut lowered = e.clone();
                    lowered[var] -= 1;
                    table.push((src as u32, index[&lowered] as u32, e[var] as f64));
                }
                table
            })
            .collect();

        Layout {
            exps,
            degree,
            index,
            mul,
            partial,
        }
    }

    fn len(&self) -> usize {
        self.exps.len()
    }
}

fn layout(nvars: usize, order: usize) -> &'static Layout {
    static LAYOUTS: [[OnceLock<Layout>; MAX_ORDER + 1]; MAX_VARS + 1] =
        [const { [const { OnceLock::new() }; MAX_ORDER + 1] }; MAX_VARS + 1];
    LAYOUTS[nvars][order].get_or_init(|| Layout::build(nvars, order))
}

/// Number of monomials of total degree `≤ order` in `nvars` variables.
pub fn monomial_count(nvars: usize, order: usize) -> usize {
    // C(nvars + order, order)
    let mut c = 1usize;
    for i in 1..=order {
        c = c * (nvars + i) / i;
    }
    c
}

fn check_size(nvars: usize, order: usize) -> Result<(), JetError> {
    if nvars == 0 || nvars > MAX_VARS || order > MAX_ORDER {
        Err(JetError::Unsupported { nvars, order })
    } else {
        Ok(())
    }
}

/// Scalar functions that can be lifted onto jets with [`Jet::compose`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnivariateFn {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Pow(f64),
    Recip,
}

impl UnivariateFn {
    fn name(&self) -> &'static str {
        match self {
            UnivariateFn::Sin => "sin",
            UnivariateFn::Cos => "cos",
            UnivariateFn::Sinh => "sinh",
            UnivariateFn::Cosh => "cosh",
            UnivariateFn::Tanh => "tanh",
            UnivariateFn::Exp => "exp",
            UnivariateFn::Log => "log",
            UnivariateFn::Pow(_) => "pow",
            UnivariateFn::Recip => "recip",
        }
    }

    /// Taylor coefficients `f^{(m)}(a) / m!` for `m = 0..=order`.
    pub fn taylor_coeffs(&self, a: f64, order: usize) -> Result<Vec<f64>, JetError> {
        let n = order + 1;
        let mut fact = 1.0;
        let mut out = Vec::with_capacity(n);
        match *self {
            UnivariateFn::Sin | UnivariateFn::Cos => {
                let (s, c) = a.sin_cos();
                // derivative cycle of sin: sin, cos, -sin, -cos
                let cycle = [s, c, -s, -c];
                let shift = if *self == UnivariateFn::Sin { 0 } else { 1 };
                for m in 0..n {
                    if m > 0 {
                        fact *= m as f64;
                    }
                    out.push(cycle[(m + shift) % 4] / fact);
                }
            }
            UnivariateFn::Sinh | UnivariateFn::Cosh => {
                let (s, c) = (a.sinh(), a.cosh());
                for m in 0..n {
                    if m > 0 {
                        fact *= m as f64;
                    }
                    let even = (m % 2 == 0) == (*self == UnivariateFn::Sinh);
                    out.push(if even { s } else { c } / fact);
                }
            }
            UnivariateFn::Tanh => {
                let num = UnivariateFn::Sinh.taylor_coeffs(a, order)?;
                let den = UnivariateFn::Cosh.taylor_coeffs(a, order)?;
                for m in 0..n {
                    let mut acc = num[m];
                    for i in 1..=m {
                        acc -= den[i] * out[m - i];
                    }
                    out.push(acc / den[0]);
                }
            }
            UnivariateFn::Exp => {
                let e = a.exp();
                for m in 0..n {
                    if m > 0 {
                        fact *= m as f64;
                    }
                    out.push(e / fact);
                }
            }
            UnivariateFn::Log => {
                if a == 0.0 {
                    return Err(JetError::SingularComposition { func: "log", at: a });
                }
                if a < 0.0 || !a.is_finite() {
                    return Err(JetError::Domain { func: "log", at: a });
                }
                out.push(a.ln());
                for m in 1..n {
                    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                    out.push(sign / (m as f64 * a.powi(m as i32)));
                }
            }
            UnivariateFn::Recip => {
                if a == 0.0 {
                    return Err(JetError::SingularComposition { func: "recip", at: a });
                }
                let inv = 1.0 / a;
                let mut term = inv;
                for _ in 0..n {
                    out.push(term);
                    term *= -inv;
                }
            }
            UnivariateFn::Pow(alpha) => {
                let integral = alpha.fract() == 0.0;
                if a == 0.0 {
                    if !(integral && alpha >= 0.0) {
                        return Err(JetError::SingularComposition { func: "pow", at: a });
                    }
                    let k = alpha as usize;
                    for m in 0..n {
                        out.push(if m == k { 1.0 } else { 0.0 });
                    }
                } else if a < 0.0 && !integral {
                    return Err(JetError::Domain { func: "pow", at: a });
                } else {
                    // binom(alpha, m) a^(alpha - m)
                    let mut binom = 1.0;
                    for m in 0..n {
                        if m > 0 {
                            binom *= (alpha - (m as f64 - 1.0)) / m as f64;
                        }
                        let p = if integral {
                            a.powi((alpha - m as f64) as i32)
                        } else {
                            a.powf(alpha - m as f64)
                        };
                        out.push(binom * p);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// A truncated Taylor expansion about a base point.
#[derive(Clone, Debug)]
pub struct Jet {
    order: usize,
    base: BasePoint,
    coeffs: Vec<f64>,
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && same_base(&self.base, &other.base) && self.coeffs == other.coeffs
    }
}

fn same_base(a: &BasePoint, b: &BasePoint) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

impl Jet {
    /// Jet from raw Taylor coefficients in graded monomial order.
    pub fn from_coeffs(base: BasePoint, order: usize, coeffs: Vec<f64>) -> Result<Self, JetError> {
        check_size(base.len(), order)?;
        let expected = monomial_count(base.len(), order);
        if coeffs.len() != expected {
            return Err(JetError::CoefficientCount {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(Jet { order, base, coeffs })
    }

    pub fn zero(base: BasePoint, order: usize) -> Result<Self, JetError> {
        Self::constant(base, order, 0.0)
    }

    pub fn constant(base: BasePoint, order: usize, value: f64) -> Result<Self, JetError> {
        check_size(base.len(), order)?;
        let mut coeffs = vec![0.0; monomial_count(base.len(), order)];
        coeffs[0] = value;
        Ok(Jet { order, base, coeffs })
    }

    /// The coordinate function `x_var`, expanded about the base point.
    pub fn variable(base: BasePoint, var: usize, order: usize) -> Result<Self, JetError> {
        let nvars = base.len();
        if var >= nvars {
            return Err(JetError::VarIndex { index: var, nvars });
        }
        let mut jet = Self::constant(base.clone(), order, base[var])?;
        if order >= 1 {
            // degree-one monomials follow the constant, var 0 first
            jet.coeffs[1 + var] = 1.0;
        }
        Ok(jet)
    }

    /// Embeds a one-variable Taylor series `Σ c_m (x_var − base_var)^m`.
    pub fn from_univariate(
        base: BasePoint,
        var: usize,
        order: usize,
        taylor: &[f64],
    ) -> Result<Self, JetError> {
        let nvars = base.len();
        if var >= nvars {
            return Err(JetError::VarIndex { index: var, nvars });
        }
        let mut jet = Self::zero(base, order)?;
        let lay = layout(nvars, order);
        let mut e = vec![0u8; nvars];
        for (m, &c) in taylor.iter().enumerate().take(order + 1) {
            e[var] = m as u8;
            jet.coeffs[lay.index[&e]] = c;
        }
        Ok(jet)
    }

    pub fn nvars(&self) -> usize {
        self.base.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn base(&self) -> &BasePoint {
        &self.base
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Constant term, i.e. the function value at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Raw Taylor coefficient of `x^multi_index` (zero beyond the order).
    pub fn coeff(&self, multi_index: &[u8]) -> f64 {
        let lay = layout(self.nvars(), self.order);
        lay.index.get(multi_index).map_or(0.0, |&i| self.coeffs[i])
    }

    /// The partial derivative `∂^α f` at the base point.
    pub fn derivative(&self, multi_index: &[u8]) -> f64 {
        let fact: f64 = multi_index
            .iter()
            .map(|&m| (1..=m as u64).product::<u64>() as f64)
            .product();
        self.coeff(multi_index) * fact
    }

    /// `[f, f', f'', ...]` for a one-variable jet.
    pub fn univariate_derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| {
                if m > 0 {
                    fact *= m as f64;
                }
                c * fact
            })
            .collect()
    }

    /// Exponent vectors of the stored monomials, in storage order.
    pub fn monomials(&self) -> &'static [Vec<u8>] {
        &layout(self.nvars(), self.order).exps
    }

    fn compatible(&self, other: &Jet) -> Result<(), JetError> {
        if self.nvars() != other.nvars() {
            return Err(JetError::Dimension(self.nvars(), other.nvars()));
        }
        if !same_base(&self.base, &other.base) {
            return Err(JetError::BaseMismatch);
        }
        Ok(())
    }

    /// Drops all monomials of degree above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        let len = monomial_count(self.nvars(), order);
        Jet {
            order,
            base: self.base.clone(),
            coeffs: self.coeffs[..len].to_vec(),
        }
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.combine(other, 1.0)
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Jet, sign: f64) -> Result<Jet, JetError> {
        self.compatible(other)?;
        let order = self.order.min(other.order);
        let len = monomial_count(self.nvars(), order);
        let coeffs = self.coeffs[..len]
            .iter()
            .zip(&other.coeffs[..len])
            .map(|(a, b)| a + sign * b)
            .collect();
        Ok(Jet {
            order,
            base: self.base.clone(),
            coeffs,
        })
    }

    /// Truncated Cauchy product, to order `min(self.order, other.order)`.
    pub fn try_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.compatible(other)?;
        let order = self.order.min(other.order);
        let lay = layout(self.nvars(), order);
        let mut coeffs = vec![0.0; lay.len()];
        for &(a, b, c) in &lay.mul {
            coeffs[c as usize] += self.coeffs[a as usize] * other.coeffs[b as usize];
        }
        Ok(Jet {
            order,
            base: self.base.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, factor: f64) -> Jet {
        Jet {
            order: self.order,
            base: self.base.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add_scalar(&self, value: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += value;
        out
    }

    pub fn powi(&self, n: u32) -> Result<Jet, JetError> {
        let mut acc = Jet::constant(self.base.clone(), self.order, 1.0)?;
        for _ in 0..n {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    /// Formal partial derivative in variable `var`; the order drops by one.
    pub fn partial(&self, var: usize) -> Result<Jet, JetError> {
        let nvars = self.nvars();
        if var >= nvars {
            return Err(JetError::VarIndex { index: var, nvars });
        }
        if self.order == 0 {
            return Err(JetError::OrderExhausted);
        }
        let lay = layout(nvars, self.order);
        let mut coeffs = vec![0.0; monomial_count(nvars, self.order - 1)];
        for &(src, dst, factor) in &lay.partial[var] {
            coeffs[dst as usize] = factor * self.coeffs[src as usize];
        }
        Ok(Jet {
            order: self.order - 1,
            base: self.base.clone(),
            coeffs,
        })
    }

    /// `f ∘ self`, via Horner's scheme on the series of `f` about the
    /// constant term of `self`.
    pub fn compose(&self, f: UnivariateFn) -> Result<Jet, JetError> {
        let a0 = self.value();
        let series = f.taylor_coeffs(a0, self.order).map_err(|e| match e {
            JetError::SingularComposition { .. } => JetError::SingularComposition { func: f.name(), at: a0 },
            other => other,
        })?;
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut acc = Jet::constant(self.base.clone(), self.order, series[self.order])?;
        for m in (0..self.order).rev() {
            acc = acc.try_mul(&h)?;
            acc.coeffs[0] += series[m];
        }
        Ok(acc)
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        self.compose(UnivariateFn::Recip)
    }

    pub fn max_abs_diff(&self, other: &Jet) -> Result<f64, JetError> {
        self.compatible(other)?;
        let len = monomial_count(self.nvars(), self.order.min(other.order));
        Ok(self.coeffs[..len]
            .iter()
            .zip(&other.coeffs[..len])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Total degree of each stored monomial.
    pub fn degrees(&self) -> &'static [usize] {
        &layout(self.nvars(), self.order).degree
    }
}

/// Compensated (Neumaier) coefficient-wise accumulation of jets.
///
/// Used where large terms cancel, e.g. the covariant-derivative recursion
/// close to the origin.
#[derive(Debug, Clone)]
pub struct JetAccumulator {
    order: usize,
    base: BasePoint,
    sum: Vec<f64>,
    comp: Vec<f64>,
}

impl JetAccumulator {
    pub fn new(base: BasePoint, order: usize) -> Result<Self, JetError> {
        check_size(base.len(), order)?;
        let len = monomial_count(base.len(), order);
        Ok(JetAccumulator {
            order,
            base,
            sum: vec![0.0; len],
            comp: vec![0.0; len],
        })
    }

    fn push(&mut self, i: usize, x: f64) {
        let s = self.sum[i];
        let t = s + x;
        if s.abs() >= x.abs() {
            self.comp[i] += (s - t) + x;
        } else {
            self.comp[i] += (x - t) + s;
        }
        self.sum[i] = t;
    }

    /// Adds `sign · jet`, truncated to the accumulator order.
    pub fn add(&mut self, jet: &Jet, sign: f64) -> Result<(), JetError> {
        if jet.nvars() != self.base.len() {
            return Err(JetError::Dimension(self.base.len(), jet.nvars()));
        }
        if !same_base(&self.base, &jet.base) {
            return Err(JetError::BaseMismatch);
        }
        if jet.order < self.order {
            return Err(JetError::OrderExhausted);
        }
        for i in 0..self.sum.len() {
            let c = jet.coeffs[i];
            if c != 0.0 {
                self.push(i, sign * c);
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Jet {
        Jet {
            order: self.order,
            base: self.base,
            coeffs: self.sum.iter().zip(&self.comp).map(|(s, c)| s + c).collect(),
        }
    }
}

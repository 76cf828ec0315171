//! Jet-exact covariant derivatives and weighted Sobolev norms of radial
//! functions on spherically symmetric Riemannian manifolds.
//!
//! A manifold is described by its warping function `φ` (metric
//! `dr² + φ(r)² g̃` in geodesic polar coordinates). Radial functions
//! `u(x) = v(r)` are evaluated through truncated Taylor jets, so every
//! covariant derivative `∇^j u` and every tensor norm is computed from
//! exact derivatives rather than finite differences. On top of that the
//! [`verify`] module turns the radial-reduction identities, radial lemmas,
//! decay estimates and embedding inequalities into quantified checks.
//!
//! Module map:
//!
//! * [`jets`]: multivariate truncated Taylor arithmetic
//! * [`manifold`]: warping functions, `C_φ`, sphere volumes, the polar metric
//! * [`geometry`]: Christoffel symbols, the covariant-derivative recursion
//! * [`quadrature`]: graded Gauss–Kronrod integration on `(0, R)`
//! * [`funcspace`]: radial test families and weighted norms
//! * [`verify`]: the certification checks and their report entries
//! * [`cli`]: configuration parsing, JSON reports and CSV curves

pub mod cli;
pub mod funcspace;
pub mod geometry;
pub mod jets;
pub mod manifold;
pub mod quadrature;
pub mod verify;

pub use funcspace::{Family, NormValue, RadialFunction};
pub use geometry::{ChristoffelTable, CovTensor};
pub use jets::{Jet, JetError, UnivariateFn};
pub use manifold::{ManifoldSpec, WarpKind, WarpSpec};
pub use quadrature::{Integrand, QuadConfig, QuadResult};

//! Inexact Riemannian gradient descent on embedded matrix manifolds.
//!
//! The crate provides
//!
//! * a manifold contract ([`manifold::Manifold`]) with three geometries:
//!   the unit sphere, the Grassmannian and the fixed-rank manifold;
//! * gradient oracles with certified error bounds: exact, absolute and
//!   relative noise, zeroth-order, sharpness-aware and extragradient;
//! * one descent loop `x_{k+1} = R_{x_k}(−t_k g_k)` with diminishing, constant,
//!   capped-constant and Armijo stepsizes, specialised as RGD, IRGD, IRGDr,
//!   RSAM and REG;
//! * the benchmark problems (matrix completion, PCA, sphere Rayleigh quotient)
//!   and an MNIST IDX reader.

// `!(a >= b)` is deliberate: NaN has to fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod idx;
pub mod linalg;
pub mod manifold;
pub mod manifolds;
pub mod oracle;
pub mod problems;
pub mod solver;

pub use error::GeometryError;
pub use manifold::{Manifold, ManifoldKind, Point, PointId, PointOf, Tangent, TangentOf, TangentRepr};

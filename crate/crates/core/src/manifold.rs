//! The manifold contract shared by every geometry, oracle and solver.
//!
//! Points and tangent vectors are opaque wrappers around a geometry-specific
//! representation. Every point receives a fresh identity token when it is
//! created; tangent vectors remember the token of their base point, and any
//! operation that combines two tangents (or a tangent with a point) compares
//! tokens rather than floating-point data. Mixing tangents from different
//! iterates is therefore a hard error even when the iterates happen to be
//! numerically equal.
//!
//! All geometries here are embedded submanifolds of a matrix space with the
//! induced (Frobenius) metric. Ambient quantities are always `DMatrix<f64>`;
//! the sphere uses `n x 1` columns.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{GeometryError, Result};

static NEXT_POINT_ID: AtomicU64 = AtomicU64::new(1);

/// Identity token of a manifold point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PointId(u64);

impl PointId {
    fn fresh() -> Self {
        PointId(NEXT_POINT_ID.fetch_add(1, Ordering::Relaxed))
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

/// Which geometry a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    Sphere,
    Grassmann,
    FixedRank,
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ManifoldKind::Sphere => "sphere",
            ManifoldKind::Grassmann => "grassmann",
            ManifoldKind::FixedRank => "fixed-rank",
        };
        f.write_str(name)
    }
}

/// A point on a manifold. Cloning keeps the identity token.
#[derive(Debug, Clone)]
pub struct Point<R> {
    id: PointId,
    kind: ManifoldKind,
    repr: R,
}

impl<R> Point<R> {
    /// Wraps a representation under a fresh identity. Feasibility is the
    /// caller's responsibility; geometries only build points from
    /// constructions that are feasible by design.
    pub(crate) fn new(kind: ManifoldKind, repr: R) -> Self {
        Point {
            id: PointId::fresh(),
            kind,
            repr,
        }
    }

    pub fn id(&self) -> PointId {
        self.id
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn repr(&self) -> &R {
        &self.repr
    }
}

/// Vector-space operations needed on a tangent representation.
///
/// `dot` must be the ambient Frobenius inner product of the represented
/// tangent vectors.
pub trait TangentRepr: Clone + fmt::Debug + Send + Sync {
    fn dot(&self, other: &Self) -> f64;
    fn scaled(&self, alpha: f64) -> Self;
    /// `alpha * self + beta * other`
    fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self;
    fn is_zero(&self) -> bool;
}

impl TangentRepr for DMatrix<f64> {
    fn dot(&self, other: &Self) -> f64 {
        self.dot(other)
    }

    fn scaled(&self, alpha: f64) -> Self {
        self * alpha
    }

    fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        self * alpha + other * beta
    }

    fn is_zero(&self) -> bool {
        self.iter().all(|v| *v == 0.0)
    }
}

/// A tangent vector attached to a specific base point.
#[derive(Debug, Clone)]
pub struct Tangent<T> {
    base: PointId,
    kind: ManifoldKind,
    repr: T,
}

impl<T: TangentRepr> Tangent<T> {
    pub(crate) fn new<R>(base: &Point<R>, repr: T) -> Self {
        Tangent {
            base: base.id,
            kind: base.kind,
            repr,
        }
    }

    pub fn base(&self) -> PointId {
        self.base
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn repr(&self) -> &T {
        &self.repr
    }

    pub fn is_zero(&self) -> bool {
        self.repr.is_zero()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Tangent {
            base: self.base,
            kind: self.kind,
            repr: self.repr.scaled(alpha),
        }
    }

    fn same_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(GeometryError::BaseMismatch {
                left: self.base.0,
                right: other.base.0,
            });
        }
        Ok(())
    }

    /// `alpha * self + beta * other`; both must share a base point.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        self.same_base(other)?;
        Ok(Tangent {
            base: self.base,
            kind: self.kind,
            repr: self.repr.combine(alpha, &other.repr, beta),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.same_base(other)?;
        Ok(self.repr.dot(&other.repr))
    }

    pub fn norm(&self) -> f64 {
        self.repr.dot(&self.repr).max(0.0).sqrt()
    }
}

pub type PointOf<M> = Point<<M as Manifold>::PointRepr>;
pub type TangentOf<M> = Tangent<<M as Manifold>::TangentRepr>;

/// Embedded Riemannian submanifold with the induced metric, a retraction and
/// a vector transport.
pub trait Manifold: Send + Sync {
    type PointRepr: Clone + fmt::Debug + Send + Sync;
    type TangentRepr: TangentRepr;

    fn kind(&self) -> ManifoldKind;

    /// Shape of ambient matrices (points, Euclidean gradients).
    fn ambient_shape(&self) -> (usize, usize);

    /// Distance of `x` from satisfying the defining equations
    /// (unit norm, orthonormal columns, ...).
    fn feasibility_error(&self, x: &PointOf<Self>) -> f64;

    /// Orthogonal projection of an ambient matrix onto `T_x M`.
    fn project(&self, x: &PointOf<Self>, a: &DMatrix<f64>) -> Result<TangentOf<Self>>;

    /// `R_x(eta)`. A zero tangent returns `x` itself, bit for bit.
    fn retract(&self, x: &PointOf<Self>, eta: &TangentOf<Self>) -> Result<PointOf<Self>>;

    /// Projection transport: the ambient form of `xi` (tangent at `from`)
    /// projected onto `T_to M`.
    fn transport_between(
        &self,
        from: &PointOf<Self>,
        to: &PointOf<Self>,
        xi: &TangentOf<Self>,
    ) -> Result<TangentOf<Self>>;

    fn point_to_ambient(&self, x: &PointOf<Self>) -> DMatrix<f64>;

    fn tangent_to_ambient(&self, x: &PointOf<Self>, u: &TangentOf<Self>) -> Result<DMatrix<f64>>;

    fn zero_tangent(&self, x: &PointOf<Self>) -> TangentOf<Self>;

    /// Wraps an ambient matrix that is already tangent at `x`. Fails when the
    /// projection residual exceeds `1e-10 * (1 + ‖a‖_F)`.
    fn tangent_from_ambient(&self, x: &PointOf<Self>, a: &DMatrix<f64>) -> Result<TangentOf<Self>>;

    fn random_point<G: Rng + ?Sized>(&self, rng: &mut G) -> PointOf<Self>;

    /// Ambient matrix with i.i.d. standard normal entries.
    fn random_ambient<G: Rng + ?Sized>(&self, rng: &mut G) -> DMatrix<f64> {
        let (r, c) = self.ambient_shape();
        crate::linalg::gaussian_matrix(r, c, rng)
    }

    /// Set when the point was produced by an ambiguous construction
    /// (a near-tie in a truncated SVD).
    fn point_warning(&self, _x: &PointOf<Self>) -> bool {
        false
    }

    fn check_ambient(&self, a: &DMatrix<f64>) -> Result<()> {
        let expected = self.ambient_shape();
        let got = a.shape();
        if expected != got {
            return Err(GeometryError::ShapeMismatch { expected, got });
        }
        Ok(())
    }

    fn check_base(&self, x: &PointOf<Self>, u: &TangentOf<Self>) -> Result<()> {
        if u.base() != x.id() {
            return Err(GeometryError::BaseMismatch {
                left: x.id().raw(),
                right: u.base().raw(),
            });
        }
        Ok(())
    }

    fn inner(&self, x: &PointOf<Self>, u: &TangentOf<Self>, v: &TangentOf<Self>) -> Result<f64> {
        self.check_base(x, u)?;
        self.check_base(x, v)?;
        Ok(u.repr().dot(v.repr()))
    }

    fn norm(&self, x: &PointOf<Self>, u: &TangentOf<Self>) -> Result<f64> {
        self.check_base(x, u)?;
        Ok(u.norm())
    }

    /// `T_eta(xi)`: tangent at `R_x(eta)`. The result is based at a freshly
    /// retracted point; use [`Manifold::transport_to`] to attach it to a
    /// target the caller already holds.
    fn transport(&self, x: &PointOf<Self>, eta: &TangentOf<Self>, xi: &TangentOf<Self>) -> Result<TangentOf<Self>> {
        self.check_base(x, eta)?;
        self.check_base(x, xi)?;
        if eta.is_zero() {
            return Ok(xi.clone());
        }
        let y = self.retract(x, eta)?;
        self.transport_between(x, &y, xi)
    }

    /// Transport to an already computed target point `y = R_x(eta)`.
    fn transport_to(&self, x: &PointOf<Self>, y: &PointOf<Self>, xi: &TangentOf<Self>) -> Result<TangentOf<Self>> {
        self.check_base(x, xi)?;
        self.transport_between(x, y, xi)
    }

    /// Riemannian gradient from a Euclidean one (induced metric).
    fn egrad_to_rgrad(&self, x: &PointOf<Self>, egrad: &DMatrix<f64>) -> Result<TangentOf<Self>> {
        self.project(x, egrad)
    }
}

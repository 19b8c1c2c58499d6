use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{GeometryError, Result};
use crate::linalg::gaussian_matrix;
use crate::manifold::{Manifold, ManifoldKind, Point, PointOf, Tangent, TangentOf};

/// Unit sphere `S^{n-1}` in `R^n`, points stored as `n x 1` columns.
#[derive(Debug, Clone)]
pub struct Sphere {
    n: usize,
}

impl Sphere {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(GeometryError::InvalidDimensions(format!(
                "sphere needs n >= 2, got {n}"
            )));
        }
        Ok(Sphere { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Accepts `v` as a point if `|‖v‖ − 1| ≤ 1e-12`.
    pub fn point(&self, v: &[f64]) -> Result<PointOf<Self>> {
        let col = DMatrix::from_column_slice(v.len(), 1, v);
        self.check_ambient(&col)?;
        let err = (col.norm() - 1.0).abs();
        if err > 1e-12 {
            return Err(GeometryError::Infeasible(err));
        }
        Ok(Point::new(ManifoldKind::Sphere, col))
    }

    /// Normalizes `v` onto the sphere.
    pub fn normalized_point(&self, v: &[f64]) -> Result<PointOf<Self>> {
        let col = DMatrix::from_column_slice(v.len(), 1, v);
        self.check_ambient(&col)?;
        let nrm = col.norm();
        if nrm == 0.0 {
            return Err(GeometryError::Infeasible(1.0));
        }
        Ok(Point::new(ManifoldKind::Sphere, col / nrm))
    }

    fn project_raw(x: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
        let c = x.dot(a);
        a - x * c
    }
}

impl Manifold for Sphere {
    type PointRepr = DMatrix<f64>;
    type TangentRepr = DMatrix<f64>;

    fn kind(&self) -> ManifoldKind {
        ManifoldKind::Sphere
    }

    fn ambient_shape(&self) -> (usize, usize) {
        (self.n, 1)
    }

    fn feasibility_error(&self, x: &PointOf<Self>) -> f64 {
        (x.repr().norm() - 1.0).abs()
    }

    fn project(&self, x: &PointOf<Self>, a: &DMatrix<f64>) -> Result<TangentOf<Self>> {
        self.check_ambient(a)?;
        Ok(Tangent::new(x, Self::project_raw(x.repr(), a)))
    }

    fn retract(&self, x: &PointOf<Self>, eta: &TangentOf<Self>) -> Result<PointOf<Self>> {
        self.check_base(x, eta)?;
        if eta.is_zero() {
            return Ok(x.clone());
        }
        // ⟨x, η⟩ = 0 gives ‖x + η‖ ≥ 1, so the division is always safe.
        let y = x.repr() + eta.repr();
        let nrm = y.norm();
        Ok(Point::new(ManifoldKind::Sphere, y / nrm))
    }

    fn transport_between(
        &self,
        _from: &PointOf<Self>,
        to: &PointOf<Self>,
        xi: &TangentOf<Self>,
    ) -> Result<TangentOf<Self>> {
        Ok(Tangent::new(to, Self::project_raw(to.repr(), xi.repr())))
    }

    fn point_to_ambient(&self, x: &PointOf<Self>) -> DMatrix<f64> {
        x.repr().clone()
    }

    fn tangent_to_ambient(&self, x: &PointOf<Self>, u: &TangentOf<Self>) -> Result<DMatrix<f64>> {
        self.check_base(x, u)?;
        Ok(u.repr().clone())
    }

    fn zero_tangent(&self, x: &PointOf<Self>) -> TangentOf<Self> {
        Tangent::new(x, DMatrix::zeros(self.n, 1))
    }

    fn tangent_from_ambient(&self, x: &PointOf<Self>, a: &DMatrix<f64>) -> Result<TangentOf<Self>> {
        self.check_ambient(a)?;
        let resid = (Self::project_raw(x.repr(), a) - a).norm();
        if resid > 1e-10 * (1.0 + a.norm()) {
            return Err(GeometryError::NotTangent(resid));
        }
        Ok(Tangent::new(x, a.clone()))
    }

    fn random_point<G: Rng + ?Sized>(&self, rng: &mut G) -> PointOf<Self> {
        loop {
            let g = gaussian_matrix(self.n, 1, rng);
            let nrm = g.norm();
            if nrm > 0.0 {
                return Point::new(ManifoldKind::Sphere, g / nrm);
            }
        }
    }
}

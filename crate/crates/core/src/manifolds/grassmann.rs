use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{GeometryError, Result};
use crate::linalg::{canonical_qf, gaussian_matrix, orthonormality_error};
use crate::manifold::{Manifold, ManifoldKind, Point, PointOf, Tangent, TangentOf};

/// Grassmannian `Gr(n, p)` of `p`-dimensional subspaces of `R^n`, represented
/// by `n x p` matrices with orthonormal columns.
///
/// Tangent vectors are horizontal lifts: `n x p` matrices `η` with `Xᵀη = 0`.
/// The retraction is the sign-canonical Q factor of `X + η`.
#[derive(Debug, Clone)]
pub struct Grassmann {
    n: usize,
    p: usize,
}

impl Grassmann {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if p == 0 || p >= n {
            return Err(GeometryError::InvalidDimensions(format!(
                "grassmann needs 1 <= p < n, got n={n}, p={p}"
            )));
        }
        Ok(Grassmann { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Accepts `basis` if `‖basisᵀbasis − I‖_F ≤ 1e-10`.
    pub fn point(&self, basis: DMatrix<f64>) -> Result<PointOf<Self>> {
        self.check_ambient(&basis)?;
        let err = orthonormality_error(&basis);
        if err > 1e-10 {
            return Err(GeometryError::Infeasible(err));
        }
        Ok(Point::new(ManifoldKind::Grassmann, basis))
    }

    fn project_raw(x: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
        a - x * (x.transpose() * a)
    }
}

impl Manifold for Grassmann {
    type PointRepr = DMatrix<f64>;
    type TangentRepr = DMatrix<f64>;

    fn kind(&self) -> ManifoldKind {
        ManifoldKind::Grassmann
    }

    fn ambient_shape(&self) -> (usize, usize) {
        (self.n, self.p)
    }

    fn feasibility_error(&self, x: &PointOf<Self>) -> f64 {
        orthonormality_error(x.repr())
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
        let q = canonical_qf(&(x.repr() + eta.repr()))?;
        Ok(Point::new(ManifoldKind::Grassmann, q))
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
        Tangent::new(x, DMatrix::zeros(self.n, self.p))
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
            if let Ok(q) = canonical_qf(&gaussian_matrix(self.n, self.p, rng)) {
                return Point::new(ManifoldKind::Grassmann, q);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_retraction_returns_the_basis() {
        let g = Grassmann::new(4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = g.random_point(&mut rng);
        let y = g.retract(&x, &g.zero_tangent(&x)).unwrap();
        assert_eq!(y.repr(), x.repr());
        // sign-canonical QR of an already orthonormal basis is the identity map
        let q = canonical_qf(x.repr()).unwrap();
        assert!((q - x.repr()).norm() < 1e-14);
    }

    #[test]
    fn vertical_directions_are_annihilated() {
        let g = Grassmann::new(6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = g.random_point(&mut rng);
        let b = gaussian_matrix(3, 3, &mut rng);
        let t = g.project(&x, &(x.repr() * b)).unwrap();
        assert!(t.repr().norm() < 1e-13);
    }

    #[test]
    fn inner_matches_dense_trace() {
        let g = Grassmann::new(4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = g.random_point(&mut rng);
        let u = g.project(&x, &g.random_ambient(&mut rng)).unwrap();
        let v = g.project(&x, &g.random_ambient(&mut rng)).unwrap();
        let (a, b) = (u.repr(), v.repr());
        let mut trace = 0.0;
        for j in 0..2 {
            for i in 0..4 {
                trace += a[(i, j)] * b[(i, j)];
            }
        }
        assert!((g.inner(&x, &u, &v).unwrap() - trace).abs() < 1e-14);
    }

    #[test]
    fn projected_retractions_stay_orthonormal() {
        let g = Grassmann::new(8, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let x = g.random_point(&mut rng);
            let eta = g.project(&x, &g.random_ambient(&mut rng)).unwrap();
            let y = g.retract(&x, &eta).unwrap();
            assert!(g.feasibility_error(&y) < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(Grassmann::new(3, 3).is_err());
        assert!(Grassmann::new(3, 0).is_err());
    }
}

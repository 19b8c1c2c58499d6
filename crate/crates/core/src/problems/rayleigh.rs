use nalgebra::DMatrix;

use super::{Problem, ProblemError, POWER_ITERATIONS};
use crate::linalg::{power_iteration_max_eig, sorted_eigenvalues_desc};
use crate::manifold::PointOf;
use crate::manifolds::Sphere;

/// `f(x) = −xᵀHx` on the unit sphere; minimized by a top eigenvector of `H`.
#[derive(Debug, Clone)]
pub struct SphereRayleigh {
    h: DMatrix<f64>,
    manifold: Sphere,
    lipschitz: f64,
}

impl SphereRayleigh {
    pub fn new(h: DMatrix<f64>) -> Result<Self, ProblemError> {
        let n = h.nrows();
        if h.ncols() != n {
            return Err(ProblemError::BadData("square".into()));
        }
        if (&h - h.transpose()).norm() > 1e-10 {
            return Err(ProblemError::BadData("symmetric".into()));
        }
        let manifold = Sphere::new(n)?;
        // The cost changes by a constant under H -> H - cI, so an indefinite H
        // is measured by its spread.
        let ev = sorted_eigenvalues_desc(&h);
        let (top, bottom) = (ev[0], ev[n - 1]);
        let lipschitz = if bottom >= 0.0 {
            2.0 * power_iteration_max_eig(&h, POWER_ITERATIONS)
        } else {
            2.0 * (top - bottom)
        };
        Ok(SphereRayleigh { h, manifold, lipschitz })
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self, ProblemError> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }
}

impl Problem for SphereRayleigh {
    type Geometry = Sphere;

    fn manifold(&self) -> &Sphere {
        &self.manifold
    }

    fn cost(&self, x: &PointOf<Sphere>) -> f64 {
        let x = x.repr();
        -x.dot(&(&self.h * x))
    }

    fn egrad(&self, x: &PointOf<Sphere>) -> DMatrix<f64> {
        -(&self.h * x.repr()) * 2.0
    }

    /// `2 λ_max(H)` from power iteration.
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn optimal_value(&self) -> Option<f64> {
        sorted_eigenvalues_desc(&self.h).first().map(|l| -l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indefinite_matrix_uses_spread() {
        let prob = SphereRayleigh::from_diagonal(&[1.0, -3.0, 0.5]).unwrap();
        assert_eq!(prob.lipschitz(), 8.0);
        let psd = SphereRayleigh::from_diagonal(&[3.0, 1.0, 1.0]).unwrap();
        assert!((psd.lipschitz() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn top_eigenvector_is_stationary() {
        let prob = SphereRayleigh::from_diagonal(&[3.0, 1.0, 1.0]).unwrap();
        let x = prob.manifold().point(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(prob.cost(&x), -3.0);
        assert!(prob.rgrad(&x).unwrap().is_zero());
        assert_eq!(prob.optimal_value(), Some(-3.0));
        assert!((prob.lipschitz() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_gradient_projects_to_zero_at_eigenvector() {
        let prob = SphereRayleigh::from_diagonal(&[3.0, 1.0]).unwrap();
        let x = prob.manifold().point(&[1.0, 0.0]).unwrap();
        assert_eq!(prob.egrad(&x), DMatrix::from_column_slice(2, 1, &[-6.0, 0.0]));
        assert!(prob.rgrad(&x).unwrap().is_zero());
    }
}

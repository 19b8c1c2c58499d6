//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{GeometryError, Result};

/// Matrix with i.i.d. standard normal entries, filled column-major.
pub fn gaussian_matrix<G: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut G) -> DMatrix<f64> {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DMatrix::from_vec(rows, cols, data)
}

/// Thin QR with the sign convention `diag(R) > 0`, returning only `Q`.
///
/// Fails when a diagonal entry of `R` is negligible relative to the largest
/// one, i.e. when `a` is numerically rank deficient.
pub fn canonical_qf(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (rows, cols) = a.shape();
    if cols > rows {
        return Err(GeometryError::InvalidDimensions(format!(
            "thin QR needs rows >= cols, got {rows}x{cols}"
        )));
    }
    let qr = a.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    let scale = (0..cols).map(|i| r[(i, i)].abs()).fold(0.0_f64, f64::max);
    for j in 0..cols {
        let d = r[(j, j)];
        if !(d.abs() > 1e-14 * scale.max(f64::MIN_POSITIVE)) {
            return Err(GeometryError::Singular(format!(
                "QR diagonal entry {j} is {d:e} (scale {scale:e})"
            )));
        }
        if d < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}

/// `‖QᵀQ − I‖_F`
pub fn orthonormality_error(q: &DMatrix<f64>) -> f64 {
    let p = q.ncols();
    (q.transpose() * q - DMatrix::<f64>::identity(p, p)).norm()
}

/// Largest eigenvalue estimate of a symmetric positive semidefinite matrix:
/// Rayleigh quotient after `iters` power-iteration steps from a fixed,
/// non-symmetric start vector.
pub fn power_iteration_max_eig(h: &DMatrix<f64>, iters: usize) -> f64 {
    let n = h.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v = DVector::from_fn(n, |i, _| 1.0 + i as f64 / n as f64);
    v /= v.norm();
    for _ in 0..iters {
        let w = h * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        v = w / nw;
    }
    v.dot(&(h * &v))
}

/// Eigenvalues of a symmetric matrix in descending order.
pub fn sorted_eigenvalues_desc(h: &DMatrix<f64>) -> Vec<f64> {
    let mut vals: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

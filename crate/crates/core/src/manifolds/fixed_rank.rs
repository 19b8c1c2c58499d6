//! The embedded manifold of `m x n` real matrices of rank exactly `k`.
//!
//! A point `X = U diag(s) Vᵀ` is kept in thin-SVD form. A tangent vector at
//! `X` is stored as the triple `(M, U_p, V_p)` with `UᵀU_p = 0`, `VᵀV_p = 0`,
//! representing
//!
//! ```text
//! η = U M Vᵀ + U_p Vᵀ + U V_pᵀ
//! ```
//!
//! The three terms are mutually orthogonal in the Frobenius inner product, so
//! `⟨η, ζ⟩ = ⟨M, M'⟩ + ⟨U_p, U_p'⟩ + ⟨V_p, V_p'⟩`.
//!
//! Retraction is the metric projection (rank-`k` truncated SVD) of `X + η`,
//! computed from a `2k x 2k` core without forming the `m x n` sum.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{GeometryError, Result};
use crate::linalg::{canonical_qf, gaussian_matrix, orthonormality_error};
use crate::manifold::{Manifold, ManifoldKind, Point, PointOf, Tangent, TangentOf, TangentRepr};

/// Gap below which the `k`-th and `(k+1)`-th singular values count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Smallest admissible `k`-th singular value after a retraction.
pub const RANK_COLLAPSE_TOLERANCE: f64 = 1e-14;

/// Thin-SVD factors of a rank-`k` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedRankFactors {
    pub u: DMatrix<f64>,
    pub s: DVector<f64>,
    pub v: DMatrix<f64>,
    /// The truncation that produced this point hit a singular-value tie.
    pub ambiguous_truncation: bool,
}

impl FixedRankFactors {
    pub fn to_dense(&self) -> DMatrix<f64> {
        &self.u * DMatrix::from_diagonal(&self.s) * self.v.transpose()
    }

    /// `X_ij` without forming the dense matrix.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        (0..self.s.len())
            .map(|l| self.u[(i, l)] * self.s[l] * self.v[(j, l)])
            .sum()
    }
}

/// Factored tangent `(M, U_p, V_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedRankTangent {
    pub m: DMatrix<f64>,
    pub up: DMatrix<f64>,
    pub vp: DMatrix<f64>,
}

impl TangentRepr for FixedRankTangent {
    fn dot(&self, other: &Self) -> f64 {
        self.m.dot(&other.m) + self.up.dot(&other.up) + self.vp.dot(&other.vp)
    }

    fn scaled(&self, alpha: f64) -> Self {
        FixedRankTangent {
            m: &self.m * alpha,
            up: &self.up * alpha,
            vp: &self.vp * alpha,
        }
    }

    fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        FixedRankTangent {
            m: &self.m * alpha + &other.m * beta,
            up: &self.up * alpha + &other.up * beta,
            vp: &self.vp * alpha + &other.vp * beta,
        }
    }

    fn is_zero(&self) -> bool {
        self.m
            .iter()
            .chain(self.up.iter())
            .chain(self.vp.iter())
            .all(|v| *v == 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct FixedRank {
    m: usize,
    n: usize,
    k: usize,
}

/// Horizontal concatenation `[a | b]`.
fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

impl FixedRank {
    pub fn new(m: usize, n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > m.min(n) {
            return Err(GeometryError::InvalidDimensions(format!(
                "fixed-rank needs 1 <= k <= min(m, n), got m={m}, n={n}, k={k}"
            )));
        }
        Ok(FixedRank { m, n, k })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.k)
    }

    /// Builds a point from factors, checking orthonormality and positivity.
    pub fn point(&self, u: DMatrix<f64>, s: DVector<f64>, v: DMatrix<f64>) -> Result<PointOf<Self>> {
        if u.shape() != (self.m, self.k) {
            return Err(GeometryError::ShapeMismatch {
                expected: (self.m, self.k),
                got: u.shape(),
            });
        }
        if v.shape() != (self.n, self.k) {
            return Err(GeometryError::ShapeMismatch {
                expected: (self.n, self.k),
                got: v.shape(),
            });
        }
        if s.len() != self.k {
            return Err(GeometryError::ShapeMismatch {
                expected: (self.k, 1),
                got: (s.len(), 1),
            });
        }
        let err = orthonormality_error(&u).max(orthonormality_error(&v));
        if err > 1e-10 {
            return Err(GeometryError::Infeasible(err));
        }
        if let Some(bad) = s.iter().find(|v| !(**v > 0.0)) {
            return Err(GeometryError::Infeasible(bad.abs()));
        }
        Ok(Point::new(
            ManifoldKind::FixedRank,
            FixedRankFactors {
                u,
                s,
                v,
                ambiguous_truncation: false,
            },
        ))
    }

    /// Rank-`k` truncated SVD of a dense matrix.
    pub fn point_from_dense(&self, a: &DMatrix<f64>) -> Result<PointOf<Self>> {
        self.check_ambient(a)?;
        let factors = self.truncate(
            a,
            &DMatrix::identity(self.m, self.m),
            &DMatrix::identity(self.n, self.n),
        )?;
        Ok(Point::new(ManifoldKind::FixedRank, factors))
    }

    /// Tangent projection of the low-rank ambient matrix `L Rᵀ`.
    fn project_lowrank(x: &FixedRankFactors, l: &DMatrix<f64>, r: &DMatrix<f64>) -> FixedRankTangent {
        let av = l * (r.transpose() * &x.v);
        let atu = r * (l.transpose() * &x.u);
        Self::project_from_products(x, &av, &atu)
    }

    /// `M = UᵀAV`, `U_p = AV − UM`, `V_p = AᵀU − VMᵀ` from `AV` and `AᵀU`.
    fn project_from_products(x: &FixedRankFactors, av: &DMatrix<f64>, atu: &DMatrix<f64>) -> FixedRankTangent {
        let m = x.u.transpose() * av;
        let up = av - &x.u * &m;
        let vp = atu - &x.v * m.transpose();
        FixedRankTangent { m, up, vp }
    }

    /// Ambient tangent in low-rank form: `η = [UM + U_p | U] [V | V_p]ᵀ`.
    fn tangent_lowrank(x: &FixedRankFactors, t: &FixedRankTangent) -> (DMatrix<f64>, DMatrix<f64>) {
        let left = hcat(&(&x.u * &t.m + &t.up), &x.u);
        let right = hcat(&x.v, &t.vp);
        (left, right)
    }

    /// Best rank-`k` approximation of `Ql · core · Qrᵀ` where `Ql`, `Qr` have
    /// orthonormal columns.
    fn truncate(&self, core: &DMatrix<f64>, ql: &DMatrix<f64>, qr: &DMatrix<f64>) -> Result<FixedRankFactors> {
        let k = self.k;
        let svd = faer::Mat::<f64>::from_fn(core.nrows(), core.ncols(), |i, j| core[(i, j)])
            .thin_svd()
            .map_err(|e| GeometryError::Singular(format!("SVD did not converge: {e:?}")))?;
        let uc = DMatrix::from_fn(core.nrows(), svd.U().ncols(), |i, j| svd.U()[(i, j)]);
        let vc = DMatrix::from_fn(core.ncols(), svd.V().ncols(), |i, j| svd.V()[(i, j)]);
        let sigma = DVector::from_iterator(svd.S().dim(), svd.S().column_vector().iter().copied());
        if sigma.len() < k {
            return Err(GeometryError::Singular(format!(
                "core has only {} singular values, need {k}",
                sigma.len()
            )));
        }
        let sk = sigma[k - 1];
        if !(sk >= RANK_COLLAPSE_TOLERANCE) {
            return Err(GeometryError::Singular(format!(
                "rank collapse: singular value {k} is {sk:e}"
            )));
        }
        let ambiguous = sigma.len() > k && (sk - sigma[k]).abs() <= TIE_TOLERANCE;
        let u = ql * uc.columns(0, k);
        let v = qr * vc.columns(0, k);
        let s = DVector::from_iterator(k, sigma.iter().take(k).copied());
        Ok(FixedRankFactors {
            u,
            s,
            v,
            ambiguous_truncation: ambiguous,
        })
    }

    /// Dense reference projection `P_U A P_V + P_U^⊥ A P_V + P_U A P_V^⊥`.
    pub fn dense_projection(x: &FixedRankFactors, a: &DMatrix<f64>) -> DMatrix<f64> {
        let pu = &x.u * x.u.transpose();
        let pv = &x.v * x.v.transpose();
        let iu = DMatrix::<f64>::identity(pu.nrows(), pu.nrows()) - &pu;
        let iv = DMatrix::<f64>::identity(pv.nrows(), pv.nrows()) - &pv;
        &pu * a * &pv + iu * a * &pv + &pu * a * iv
    }
}

impl Manifold for FixedRank {
    type PointRepr = FixedRankFactors;
    type TangentRepr = FixedRankTangent;

    fn kind(&self) -> ManifoldKind {
        ManifoldKind::FixedRank
    }

    fn ambient_shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn feasibility_error(&self, x: &PointOf<Self>) -> f64 {
        let f = x.repr();
        let orth = orthonormality_error(&f.u).max(orthonormality_error(&f.v));
        let min_s = f.s.iter().copied().fold(f64::INFINITY, f64::min);
        if min_s > 0.0 {
            orth
        } else {
            f64::INFINITY
        }
    }

    fn project(&self, x: &PointOf<Self>, a: &DMatrix<f64>) -> Result<TangentOf<Self>> {
        self.check_ambient(a)?;
        let f = x.repr();
        let av = a * &f.v;
        let atu = a.transpose() * &f.u;
        Ok(Tangent::new(x, Self::project_from_products(f, &av, &atu)))
    }

    fn retract(&self, x: &PointOf<Self>, eta: &TangentOf<Self>) -> Result<PointOf<Self>> {
        self.check_base(x, eta)?;
        if eta.is_zero() {
            return Ok(x.clone());
        }
        let f = x.repr();
        let t = eta.repr();
        // X + η = [U(S + M) + U_p | U] [V | V_p]ᵀ
        let s_plus_m = DMatrix::from_diagonal(&f.s) + &t.m;
        let left = hcat(&(&f.u * s_plus_m + &t.up), &f.u);
        let right = hcat(&f.v, &t.vp);
        let ql = left.clone().qr();
        let qr = right.clone().qr();
        let core = ql.r() * qr.r().transpose();
        let factors = self.truncate(&core, &ql.q(), &qr.q())?;
        Ok(Point::new(ManifoldKind::FixedRank, factors))
    }

    fn transport_between(
        &self,
        from: &PointOf<Self>,
        to: &PointOf<Self>,
        xi: &TangentOf<Self>,
    ) -> Result<TangentOf<Self>> {
        let (l, r) = Self::tangent_lowrank(from.repr(), xi.repr());
        Ok(Tangent::new(to, Self::project_lowrank(to.repr(), &l, &r)))
    }

    fn point_to_ambient(&self, x: &PointOf<Self>) -> DMatrix<f64> {
        x.repr().to_dense()
    }

    fn tangent_to_ambient(&self, x: &PointOf<Self>, u: &TangentOf<Self>) -> Result<DMatrix<f64>> {
        self.check_base(x, u)?;
        let (l, r) = Self::tangent_lowrank(x.repr(), u.repr());
        Ok(l * r.transpose())
    }

    fn zero_tangent(&self, x: &PointOf<Self>) -> TangentOf<Self> {
        Tangent::new(
            x,
            FixedRankTangent {
                m: DMatrix::zeros(self.k, self.k),
                up: DMatrix::zeros(self.m, self.k),
                vp: DMatrix::zeros(self.n, self.k),
            },
        )
    }

    fn tangent_from_ambient(&self, x: &PointOf<Self>, a: &DMatrix<f64>) -> Result<TangentOf<Self>> {
        let t = self.project(x, a)?;
        let resid = (self.tangent_to_ambient(x, &t)? - a).norm();
        if resid > 1e-10 * (1.0 + a.norm()) {
            return Err(GeometryError::NotTangent(resid));
        }
        Ok(t)
    }

    /// Orthonormal factors from Gaussian QR; singular values uniform on
    /// `(0, 1)`, sorted descending.
    fn random_point<G: Rng + ?Sized>(&self, rng: &mut G) -> PointOf<Self> {
        loop {
            let u = canonical_qf(&gaussian_matrix(self.m, self.k, rng));
            let v = canonical_qf(&gaussian_matrix(self.n, self.k, rng));
            let mut s: Vec<f64> = (0..self.k).map(|_| rng.random::<f64>()).collect();
            s.sort_by(|a, b| b.total_cmp(a));
            if let (Ok(u), Ok(v)) = (u, v) {
                if s.iter().all(|x| *x > 0.0) {
                    return Point::new(
                        ManifoldKind::FixedRank,
                        FixedRankFactors {
                            u,
                            s: DVector::from_vec(s),
                            v,
                            ambiguous_truncation: false,
                        },
                    );
                }
            }
        }
    }

    fn point_warning(&self, x: &PointOf<Self>) -> bool {
        x.repr().ambiguous_truncation
    }
}

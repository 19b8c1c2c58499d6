use nalgebra::DMatrix;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ContentHasher, DataSource, DatasetManifest, Problem, ProblemError, POWER_ITERATIONS};
use crate::linalg::{gaussian_matrix, power_iteration_max_eig, sorted_eigenvalues_desc};
use crate::manifold::PointOf;
use crate::manifolds::Grassmann;

/// PCA as Rayleigh-quotient minimization: `min −½ tr(XᵀHX)` over `Gr(n, p)`.
#[derive(Debug, Clone)]
pub struct PcaInstance {
    h: DMatrix<f64>,
    p: usize,
}

impl PcaInstance {
    /// Checks `‖H − Hᵀ‖_F ≤ 1e-10` and `λ_min(H) ≥ −1e-10`.
    pub fn new(h: DMatrix<f64>, p: usize) -> Result<Self, ProblemError> {
        let n = h.nrows();
        if h.ncols() != n {
            return Err(ProblemError::BadData("square".into()));
        }
        if p == 0 || p >= n {
            return Err(ProblemError::InvalidParameter(format!(
                "need 1 <= p < n, got n={n}, p={p}"
            )));
        }
        if (&h - h.transpose()).norm() > 1e-10 {
            return Err(ProblemError::BadData("symmetric".into()));
        }
        let min_eig = sorted_eigenvalues_desc(&h).last().copied().unwrap_or(0.0);
        if min_eig < -1e-10 {
            return Err(ProblemError::BadData(format!(
                "positive semidefinite (λ_min = {min_eig:e})"
            )));
        }
        Ok(PcaInstance { h, p })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.h.nrows(), self.p)
    }

    /// `−½ Σ` of the `p` largest eigenvalues (dense eigensolver).
    pub fn optimal_value(&self) -> f64 {
        -0.5 * sorted_eigenvalues_desc(&self.h).iter().take(self.p).sum::<f64>()
    }

    pub fn digest(&self) -> String {
        let mut h = ContentHasher::new("pca");
        h.dims(&[self.p]).matrix(&self.h);
        h.finish()
    }
}

/// `H = AAᵀ` with Gaussian `A ∈ R^{n x p}`.
pub fn gen_pca_instance(n: usize, p: usize, seed: u64) -> Result<(PcaInstance, DatasetManifest), ProblemError> {
    if p == 0 || p >= n {
        return Err(ProblemError::InvalidParameter(format!(
            "need 1 <= p < n, got n={n}, p={p}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian_matrix(n, p, &mut rng);
    let h = symmetrized(&a * a.transpose());
    let inst = PcaInstance::new(h, p)?;
    let manifest = DatasetManifest {
        source: DataSource::SyntheticGaussian { seed },
        params: vec![
            ("problem".into(), "pca".into()),
            ("n".into(), n.to_string()),
            ("p".into(), p.to_string()),
        ],
        digest: inst.digest(),
    };
    Ok((inst, manifest))
}

/// `H = DᵀD / count` over `samples` rows of `data` (one observation per row),
/// chosen by `seed` and used in ascending index order. All rows are used when
/// `samples >= data.nrows()`.
pub fn pca_instance_from_data(
    data: &DMatrix<f64>,
    p: usize,
    samples: usize,
    seed: u64,
) -> Result<PcaInstance, ProblemError> {
    let total = data.nrows();
    if total == 0 || samples == 0 {
        return Err(ProblemError::InvalidParameter("no samples".into()));
    }
    let rows: Vec<usize> = if samples >= total {
        (0..total).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = index::sample(&mut rng, total, samples).into_vec();
        picked.sort_unstable();
        picked
    };
    let sub = data.select_rows(rows.iter());
    let h = symmetrized(sub.transpose() * &sub / rows.len() as f64);
    PcaInstance::new(h, p)
}

fn symmetrized(h: DMatrix<f64>) -> DMatrix<f64> {
    (&h + h.transpose()) * 0.5
}

#[derive(Debug, Clone)]
pub struct PcaProblem {
    inst: PcaInstance,
    manifold: Grassmann,
    lipschitz: f64,
}

impl PcaProblem {
    pub fn new(inst: PcaInstance) -> Result<Self, ProblemError> {
        let (n, p) = inst.dims();
        let manifold = Grassmann::new(n, p)?;
        let lipschitz = 2.0 * power_iteration_max_eig(&inst.h, POWER_ITERATIONS);
        Ok(PcaProblem {
            inst,
            manifold,
            lipschitz,
        })
    }

    pub fn instance(&self) -> &PcaInstance {
        &self.inst
    }
}

impl Problem for PcaProblem {
    type Geometry = Grassmann;

    fn manifold(&self) -> &Grassmann {
        &self.manifold
    }

    fn cost(&self, x: &PointOf<Grassmann>) -> f64 {
        let x = x.repr();
        -0.5 * x.dot(&(&self.inst.h * x))
    }

    fn egrad(&self, x: &PointOf<Grassmann>) -> DMatrix<f64> {
        -(&self.inst.h * x.repr())
    }

    /// `2 λ_max(H)` from power iteration.
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(self.inst.optimal_value())
    }
}

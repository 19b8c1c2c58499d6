use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ContentHasher, DataSource, DatasetManifest, Problem, ProblemError};
use crate::linalg::gaussian_matrix;
use crate::manifold::PointOf;
use crate::manifolds::FixedRank;

const MASK_ATTEMPTS: usize = 10;

/// Low-rank matrix completion data: `min ‖P_Ω(X − A)‖_F²` over rank-`k` `X`.
#[derive(Debug, Clone)]
pub struct McInstance {
    a: DMatrix<f64>,
    mask: DMatrix<bool>,
    observed: Vec<(usize, usize)>,
    rank: usize,
}

impl McInstance {
    pub fn new(a: DMatrix<f64>, mask: DMatrix<bool>, rank: usize) -> Result<Self, ProblemError> {
        if a.shape() != mask.shape() {
            return Err(ProblemError::InvalidParameter(format!(
                "data is {:?} but mask is {:?}",
                a.shape(),
                mask.shape()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::BadData("finite".into()));
        }
        let (m, n) = a.shape();
        if rank == 0 || rank > m.min(n) {
            return Err(ProblemError::InvalidParameter(format!("rank {rank} for {m}x{n} data")));
        }
        // Row-major order of observed entries.
        let observed: Vec<(usize, usize)> = (0..m)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| mask[(i, j)])
            .collect();
        if observed.is_empty() {
            return Err(ProblemError::EmptyMask(0));
        }
        Ok(McInstance {
            a,
            mask,
            observed,
            rank,
        })
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn mask(&self) -> &DMatrix<bool> {
        &self.mask
    }

    pub fn observed(&self) -> &[(usize, usize)] {
        &self.observed
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.a.nrows(), self.a.ncols(), self.rank)
    }

    pub fn digest(&self) -> String {
        let mut h = ContentHasher::new("mc");
        h.dims(&[self.rank]).matrix(&self.a);
        let bits: Vec<u8> = self.mask.iter().map(|b| *b as u8).collect();
        h.bytes(&bits);
        h.finish()
    }
}

/// `A = G₁G₂ᵀ` with Gaussian `m x k` and `n x k` factors, and a Bernoulli
/// mask. If the mask comes out empty it is redrawn from the next sub-stream,
/// up to ten times.
pub fn gen_mc_instance(
    m: usize,
    n: usize,
    k: usize,
    mask_prob: f64,
    seed: u64,
) -> Result<(McInstance, DatasetManifest), ProblemError> {
    if !(mask_prob > 0.0 && mask_prob <= 1.0) {
        return Err(ProblemError::InvalidParameter(format!(
            "mask probability {mask_prob} not in (0, 1]"
        )));
    }
    if k == 0 || k > m.min(n) {
        return Err(ProblemError::InvalidParameter(format!("rank {k} for {m}x{n} data")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g1 = gaussian_matrix(m, k, &mut rng);
    let g2 = gaussian_matrix(n, k, &mut rng);
    let a = g1 * g2.transpose();

    for attempt in 0..MASK_ATTEMPTS {
        let mut mask_rng = ChaCha8Rng::seed_from_u64(seed);
        mask_rng.set_stream(1 + attempt as u64);
        let mask = DMatrix::from_fn(m, n, |_, _| mask_rng.random::<f64>() < mask_prob);
        match McInstance::new(a.clone(), mask, k) {
            Ok(inst) => {
                let manifest = DatasetManifest {
                    source: DataSource::SyntheticGaussian { seed },
                    params: vec![
                        ("problem".into(), "mc".into()),
                        ("m".into(), m.to_string()),
                        ("n".into(), n.to_string()),
                        ("k".into(), k.to_string()),
                        ("mask_prob".into(), mask_prob.to_string()),
                        ("mask_attempt".into(), attempt.to_string()),
                    ],
                    digest: inst.digest(),
                };
                return Ok((inst, manifest));
            }
            Err(ProblemError::EmptyMask(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(ProblemError::EmptyMask(MASK_ATTEMPTS))
}

/// Matrix completion on the fixed-rank manifold.
#[derive(Debug, Clone)]
pub struct McProblem {
    inst: McInstance,
    manifold: FixedRank,
}

impl McProblem {
    pub fn new(inst: McInstance) -> Result<Self, ProblemError> {
        let (m, n, k) = inst.dims();
        let manifold = FixedRank::new(m, n, k)?;
        Ok(McProblem { inst, manifold })
    }

    pub fn instance(&self) -> &McInstance {
        &self.inst
    }
}

impl Problem for McProblem {
    type Geometry = FixedRank;

    fn manifold(&self) -> &FixedRank {
        &self.manifold
    }

    /// `Σ_{(i,j)∈Ω} (X_ij − A_ij)²`, evaluating `X` only on `Ω`.
    fn cost(&self, x: &PointOf<FixedRank>) -> f64 {
        let f = x.repr();
        self.inst
            .observed
            .iter()
            .map(|&(i, j)| {
                let r = f.entry(i, j) - self.inst.a[(i, j)];
                r * r
            })
            .sum()
    }

    /// `2 P_Ω(X − A)`
    fn egrad(&self, x: &PointOf<FixedRank>) -> DMatrix<f64> {
        let f = x.repr();
        let (m, n, _) = self.inst.dims();
        let mut g = DMatrix::zeros(m, n);
        for &(i, j) in &self.inst.observed {
            g[(i, j)] = 2.0 * (f.entry(i, j) - self.inst.a[(i, j)]);
        }
        g
    }

    /// `P_Ω` is a 0/1 mask, so the ambient Hessian `2 P_Ω` has norm at most 2.
    fn lipschitz(&self) -> f64 {
        2.0
    }
}

//! Cost functions with Euclidean gradients, and seeded instance generators.

mod mc;
mod pca;
mod rayleigh;

use std::fmt;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::error::GeometryError;
use crate::manifold::{Manifold, PointOf, TangentOf};

pub use mc::{gen_mc_instance, McInstance, McProblem};
pub use pca::{gen_pca_instance, pca_instance_from_data, PcaInstance, PcaProblem};
pub use rayleigh::SphereRayleigh;

/// Power-iteration steps used when estimating `λ_max(H)` for Lipschitz bounds.
pub const POWER_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("invalid problem parameter: {0}")]
    InvalidParameter(String),

    #[error("observation mask stayed empty after {0} regeneration attempts")]
    EmptyMask(usize),

    #[error("data matrix is not {0}")]
    BadData(String),

    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A smooth cost on a manifold, given through its Euclidean gradient.
pub trait Problem: Send + Sync {
    type Geometry: Manifold;

    fn manifold(&self) -> &Self::Geometry;

    fn cost(&self, x: &PointOf<Self::Geometry>) -> f64;

    fn egrad(&self, x: &PointOf<Self::Geometry>) -> DMatrix<f64>;

    /// Riemannian gradient: the tangent projection of [`Problem::egrad`].
    fn rgrad(&self, x: &PointOf<Self::Geometry>) -> Result<TangentOf<Self::Geometry>, GeometryError> {
        self.manifold().egrad_to_rgrad(x, &self.egrad(x))
    }

    /// Default Lipschitz constant used for oracle bounds and stepsize caps.
    fn lipschitz(&self) -> f64;

    /// Known global minimum, when a dense oracle can provide it.
    fn optimal_value(&self) -> Option<f64> {
        None
    }
}

/// Where a problem's data came from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    SyntheticGaussian { seed: u64 },
    MnistIdx { path: String },
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSource::SyntheticGaussian { seed } => write!(f, "synthetic-gaussian(seed={seed})"),
            DataSource::MnistIdx { path } => write!(f, "mnist-idx({path})"),
        }
    }
}

/// Provenance record for generated or loaded data.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub source: DataSource,
    /// Generation parameters as `key=value` pairs.
    pub params: Vec<(String, String)>,
    /// Hex SHA-256 of the instance content.
    pub digest: String,
}

/// Incremental SHA-256 over dimensions and little-endian `f64` data.
pub(crate) struct ContentHasher(Sha256);

impl ContentHasher {
    pub(crate) fn new(tag: &str) -> Self {
        let mut h = Sha256::new();
        h.update(tag.as_bytes());
        ContentHasher(h)
    }

    pub(crate) fn dims(&mut self, dims: &[usize]) -> &mut Self {
        for d in dims {
            self.0.update((*d as u64).to_le_bytes());
        }
        self
    }

    pub(crate) fn matrix(&mut self, m: &DMatrix<f64>) -> &mut Self {
        self.dims(&[m.nrows(), m.ncols()]);
        for v in m.iter() {
            self.0.update(v.to_le_bytes());
        }
        self
    }

    pub(crate) fn bytes(&mut self, b: &[u8]) -> &mut Self {
        self.0.update(b);
        self
    }

    pub(crate) fn finish(self) -> String {
        self.0.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

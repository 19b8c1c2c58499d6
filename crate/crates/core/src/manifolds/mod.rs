//! Concrete geometries.

mod fixed_rank;
mod grassmann;
mod sphere;

pub use fixed_rank::{FixedRank, FixedRankFactors, FixedRankTangent, RANK_COLLAPSE_TOLERANCE, TIE_TOLERANCE};
pub use grassmann::Grassmann;
pub use sphere::Sphere;

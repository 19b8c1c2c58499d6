use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riemann_inexact::manifolds::{FixedRank, Grassmann, Sphere};
use riemann_inexact::{Manifold, PointOf, TangentOf};

fn tangent<M: Manifold>(m: &M, x: &PointOf<M>, rng: &mut ChaCha8Rng) -> TangentOf<M> {
    m.project(x, &m.random_ambient(rng)).unwrap()
}

fn ambient<M: Manifold>(m: &M, x: &PointOf<M>, u: &TangentOf<M>) -> DMatrix<f64> {
    m.tangent_to_ambient(x, u).unwrap()
}

fn feasibility<M: Manifold>(m: &M, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = m.random_point(&mut rng);
    assert!(m.feasibility_error(&x) <= 1e-10);
    let eta = tangent(m, &x, &mut rng);
    let y = m.retract(&x, &eta).unwrap();
    assert!(m.feasibility_error(&y) <= 1e-10);
}

fn projection_idempotent<M: Manifold>(m: &M, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = m.random_point(&mut rng);
    let a = m.random_ambient(&mut rng);
    let p1 = ambient(m, &x, &m.project(&x, &a).unwrap());
    let p2 = ambient(m, &x, &m.project(&x, &p1).unwrap());
    assert!((&p1 - &p2).norm() <= 1e-12 * (1.0 + p1.norm()));
}

fn projection_is_orthogonal<M: Manifold>(m: &M, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = m.random_point(&mut rng);
    let a = m.random_ambient(&mut rng);
    let pa = ambient(m, &x, &m.project(&x, &a).unwrap());
    let v = ambient(m, &x, &tangent(m, &x, &mut rng));
    let resid = &a - &pa;
    assert!(resid.dot(&v).abs() <= 1e-10 * a.norm() * v.norm());
}

fn transport_lands_in_target_tangent_space<M: Manifold>(m: &M, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = m.random_point(&mut rng);
    let eta = tangent(m, &x, &mut rng);
    let xi = tangent(m, &x, &mut rng);
    let y = m.retract(&x, &eta).unwrap();
    let moved = m.transport_to(&x, &y, &xi).unwrap();
    let a = ambient(m, &y, &moved);
    assert!(m.tangent_from_ambient(&y, &a).is_ok());
    // linear in xi
    let xi2 = tangent(m, &x, &mut rng);
    let sum = m.transport_to(&x, &y, &xi.combine(2.0, &xi2, -0.5).unwrap()).unwrap();
    let parts = m
        .transport_to(&x, &y, &xi)
        .unwrap()
        .combine(2.0, &m.transport_to(&x, &y, &xi2).unwrap(), -0.5)
        .unwrap();
    assert!(sum.sub(&parts).unwrap().norm() <= 1e-10 * (1.0 + sum.norm()));
}

fn zero_step_is_identity<M: Manifold>(m: &M, seed: u64)
where
    M::PointRepr: PartialEq,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = m.random_point(&mut rng);
    let y = m.retract(&x, &m.zero_tangent(&x)).unwrap();
    assert_eq!(y.repr(), x.repr());
    assert_eq!(y.id(), x.id());
}

fn inner_is_symmetric_and_linear<M: Manifold>(m: &M, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = m.random_point(&mut rng);
    let u = tangent(m, &x, &mut rng);
    let v = tangent(m, &x, &mut rng);
    let w = tangent(m, &x, &mut rng);
    let uv = m.inner(&x, &u, &v).unwrap();
    assert!((uv - m.inner(&x, &v, &u).unwrap()).abs() <= 1e-12 * (1.0 + uv.abs()));
    let lhs = m.inner(&x, &u.combine(3.0, &w, -2.0).unwrap(), &v).unwrap();
    let rhs = 3.0 * uv - 2.0 * m.inner(&x, &w, &v).unwrap();
    assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    // induced metric
    let dense = ambient(m, &x, &u).dot(&ambient(m, &x, &v));
    assert!((uv - dense).abs() <= 1e-10 * (1.0 + uv.abs()));
}

fn retraction_is_second_order_accurate<M: Manifold>(m: &M, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = m.random_point(&mut rng);
    let eta = tangent(m, &x, &mut rng);
    let eta = eta.scaled(1.0 / eta.norm());
    let x_amb = m.point_to_ambient(&x);
    let e_amb = ambient(m, &x, &eta);
    let rem = |h: f64| {
        let y = m.point_to_ambient(&m.retract(&x, &eta.scaled(h)).unwrap());
        (&y - &x_amb - &e_amb * h).norm()
    };
    let (r1, r2) = (rem(1e-4), rem(1e-5));
    // either quadratic decay, or already at round-off
    assert!(r1 / r2 >= 10f64.powf(1.9) || r2 < 1e-13, "remainders {r1} {r2}");
}

fn mixed_bases_rejected<M: Manifold>(m: &M, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = m.random_point(&mut rng);
    let y = m.random_point(&mut rng);
    let u = tangent(m, &x, &mut rng);
    let v = tangent(m, &y, &mut rng);
    assert!(u.add(&v).is_err());
    assert!(m.inner(&x, &u, &v).is_err());
    assert!(m.retract(&y, &u).is_err());
}

macro_rules! axiom_suite {
    ($name:ident, $make:expr) => {
        mod $name {
            use super::*;

            proptest! {
                #![proptest_config(ProptestConfig::with_cases(64))]

                #[test]
                fn feasible(seed in any::<u64>()) { feasibility(&$make, seed) }

                #[test]
                fn idempotent(seed in any::<u64>()) { projection_idempotent(&$make, seed) }

                #[test]
                fn orthogonal(seed in any::<u64>()) { projection_is_orthogonal(&$make, seed) }

                #[test]
                fn transport(seed in any::<u64>()) { transport_lands_in_target_tangent_space(&$make, seed) }

                #[test]
                fn zero_step(seed in any::<u64>()) { zero_step_is_identity(&$make, seed) }

                #[test]
                fn metric(seed in any::<u64>()) { inner_is_symmetric_and_linear(&$make, seed) }

                #[test]
                fn first_order(seed in any::<u64>()) { retraction_is_second_order_accurate(&$make, seed) }

                #[test]
                fn bases(seed in any::<u64>()) { mixed_bases_rejected(&$make, seed) }
            }
        }
    };
}

axiom_suite!(sphere, Sphere::new(10).unwrap());
axiom_suite!(grassmann, Grassmann::new(8, 3).unwrap());
axiom_suite!(fixed_rank, FixedRank::new(10, 12, 3).unwrap());
axiom_suite!(fixed_rank_tall, FixedRank::new(7, 4, 2).unwrap());

proptest! {
    #[test]
    fn grassmann_cost_of_subspace_ignores_basis(seed in any::<u64>()) {
        let m = Grassmann::new(6, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = m.random_point(&mut rng);
        let eta = tangent(&m, &x, &mut rng);
        // retraction output is the canonical basis of span(X + η)
        let y = m.retract(&x, &eta).unwrap();
        let q = y.repr().transpose() * (x.repr() + eta.repr());
        let back = y.repr() * q;
        prop_assert!((back - (x.repr() + eta.repr())).norm() < 1e-10);
    }
}

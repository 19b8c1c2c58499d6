//! Inexact gradient oracles.
//!
//! Each oracle returns an approximation `g_k ∈ T_{x_k}M` together with the
//! error bound it certifies:
//!
//! * [`ErrorBound::Absolute`]`(ε_k)`: `‖g_k − grad f(x_k)‖ ≤ ε_k`;
//! * [`ErrorBound::Relative`]`(ν)`: `‖g_k − grad f(x_k)‖ ≤ ν‖grad f(x_k)‖`;
//! * [`ErrorBound::Unbounded`]: no certificate (biased estimators).
//!
//! The sharpness-aware and extragradient oracles evaluate the gradient at a
//! perturbed point `x_adv` and bring it back to `T_x M` by projection, which
//! is the inverse-direction projection transport.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GeometryError, ParameterError};
use crate::manifold::{Manifold, PointOf, TangentOf};
use crate::problems::Problem;

/// Attempts at drawing a nonzero projected Gaussian before giving up.
pub const MAX_DIRECTION_DRAWS: usize = 10;
/// Gradient norms below this count as exactly stationary in the SAM guard.
pub const SAM_ZERO_GRADIENT: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorBound {
    Absolute(f64),
    Relative(f64),
    Unbounded,
}

impl ErrorBound {
    /// The implied absolute bound on `‖g − grad f‖` given `‖grad f‖`.
    pub fn absolute(&self, grad_norm: f64) -> Option<f64> {
        match *self {
            ErrorBound::Absolute(eps) => Some(eps),
            ErrorBound::Relative(nu) => Some(nu * grad_norm),
            ErrorBound::Unbounded => None,
        }
    }

    /// Whether an observed error satisfies the bound, with a relative
    /// round-off allowance `slack`.
    pub fn holds(&self, error: f64, grad_norm: f64, slack: f64) -> bool {
        match self.absolute(grad_norm) {
            Some(b) => error <= b + slack * (b + grad_norm).max(f64::MIN_POSITIVE),
            None => true,
        }
    }

    pub fn kind_label(&self) -> &'static str {
        match self {
            ErrorBound::Absolute(_) => "absolute",
            ErrorBound::Relative(_) => "relative",
            ErrorBound::Unbounded => "none",
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            ErrorBound::Absolute(v) | ErrorBound::Relative(v) => v,
            ErrorBound::Unbounded => f64::NAN,
        }
    }
}

/// An approximate gradient with its certificate.
#[derive(Debug, Clone)]
pub struct OracleOutput<T> {
    pub g: T,
    pub bound: ErrorBound,
    /// Cost and gradient evaluations consumed.
    pub evals: usize,
}

pub type OutputOf<P> = OracleOutput<TangentOf<<P as Problem>::Geometry>>;

/// `δ_k` for the additive-noise oracle; the injected error is `ν δ_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorSchedule {
    /// `δ_k = (k + 1)^{−p}` with 0-based `k`, `p ≥ 1`.
    PowerDecay { power: f64 },
    /// `δ_k = δ`.
    Constant(f64),
}

impl ErrorSchedule {
    pub fn power_decay(power: f64) -> Result<Self, ParameterError> {
        if !(power >= 1.0) || !power.is_finite() {
            return Err(ParameterError(format!("noise decay power must be >= 1, got {power}")));
        }
        Ok(ErrorSchedule::PowerDecay { power })
    }

    pub fn constant(delta: f64) -> Result<Self, ParameterError> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(ParameterError(format!("constant error must be >= 0, got {delta}")));
        }
        Ok(ErrorSchedule::Constant(delta))
    }

    pub fn delta(&self, k: usize) -> f64 {
        match *self {
            ErrorSchedule::PowerDecay { power } => ((k + 1) as f64).powf(-power),
            ErrorSchedule::Constant(d) => d,
        }
    }
}

/// Perturbation radius `ρ_k` for SAM and extragradient steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoSchedule {
    Constant(f64),
    /// `ρ_k = ρ₀ / (k + 1)^power`, 0-based `k`.
    PowerDecay {
        rho0: f64,
        power: f64,
    },
}

impl RhoSchedule {
    pub fn rho(&self, k: usize) -> f64 {
        match *self {
            RhoSchedule::Constant(r) => r,
            RhoSchedule::PowerDecay { rho0, power } => rho0 / ((k + 1) as f64).powf(power),
        }
    }

    pub fn max_rho(&self) -> f64 {
        match *self {
            RhoSchedule::Constant(r) => r,
            RhoSchedule::PowerDecay { rho0, .. } => rho0,
        }
    }
}

/// Uniformly distributed unit tangent at `x`: a projected, normalized
/// ambient Gaussian. Redraws on a zero projection.
pub fn random_unit_tangent<M: Manifold>(
    manifold: &M,
    x: &PointOf<M>,
    rng: &mut ChaCha8Rng,
) -> Result<TangentOf<M>, GeometryError> {
    for _ in 0..MAX_DIRECTION_DRAWS {
        let u = manifold.project(x, &manifold.random_ambient(rng))?;
        let nrm = u.norm();
        if nrm > 0.0 && nrm.is_finite() {
            return Ok(u.scaled(1.0 / nrm));
        }
    }
    Err(GeometryError::DegenerateSample(MAX_DIRECTION_DRAWS))
}

/// `g = grad f(x)`, certified with `ε = 0`.
pub fn exact_oracle<P: Problem>(problem: &P, x: &PointOf<P::Geometry>) -> Result<OutputOf<P>, GeometryError> {
    Ok(OracleOutput {
        g: problem.rgrad(x)?,
        bound: ErrorBound::Absolute(0.0),
        evals: 1,
    })
}

/// `g = grad f(x) + ν δ_k u` for a random unit tangent `u`; the declared bound
/// `ν δ_k` holds with equality.
pub fn additive_noise_oracle<P: Problem>(
    problem: &P,
    x: &PointOf<P::Geometry>,
    k: usize,
    nu: f64,
    schedule: &ErrorSchedule,
    rng: &mut ChaCha8Rng,
) -> Result<OutputOf<P>, GeometryError> {
    let grad = problem.rgrad(x)?;
    let eps = nu * schedule.delta(k);
    if eps == 0.0 {
        return Ok(OracleOutput {
            g: grad,
            bound: ErrorBound::Absolute(0.0),
            evals: 1,
        });
    }
    let u = random_unit_tangent(problem.manifold(), x, rng)?;
    Ok(OracleOutput {
        g: grad.combine(1.0, &u, eps)?,
        bound: ErrorBound::Absolute(eps),
        evals: 1,
    })
}

/// `g = grad f(x) + ν‖grad f(x)‖ u`; the relative bound holds with equality.
pub fn relative_noise_oracle<P: Problem>(
    problem: &P,
    x: &PointOf<P::Geometry>,
    nu: f64,
    rng: &mut ChaCha8Rng,
) -> Result<OutputOf<P>, GeometryError> {
    let grad = problem.rgrad(x)?;
    if nu == 0.0 {
        return Ok(OracleOutput {
            g: grad,
            bound: ErrorBound::Relative(0.0),
            evals: 1,
        });
    }
    let u = random_unit_tangent(problem.manifold(), x, rng)?;
    let scale = nu * grad.norm();
    Ok(OracleOutput {
        g: grad.combine(1.0, &u, scale)?,
        bound: ErrorBound::Relative(nu),
        evals: 1,
    })
}

/// Default smoothing radius `1e-5 (1 + ‖x‖_F)`.
pub fn default_smoothing<M: Manifold>(manifold: &M, x: &PointOf<M>) -> f64 {
    1e-5 * (1.0 + manifold.point_to_ambient(x).norm())
}

/// Forward-difference estimator along a projected Gaussian direction:
/// `g = [f(R_x(μu)) − f(x)] / μ · u`. Biased, so no bound is certified.
pub fn zeroth_order_oracle<P: Problem>(
    problem: &P,
    x: &PointOf<P::Geometry>,
    mu: f64,
    rng: &mut ChaCha8Rng,
) -> Result<OutputOf<P>, GeometryError> {
    let man = problem.manifold();
    let u = man.project(x, &man.random_ambient(rng))?;
    let fx = problem.cost(x);
    let moved = man.retract(x, &u.scaled(mu))?;
    let slope = (problem.cost(&moved) - fx) / mu;
    Ok(OracleOutput {
        g: u.scaled(slope),
        bound: ErrorBound::Unbounded,
        evals: 2,
    })
}

/// Sharpness-aware gradient: the gradient at
/// `x_adv = R_x(ρ grad f(x)/‖grad f(x)‖)`, projected back onto `T_x M`.
/// Certifies `Absolute(Lρ)`. With `ρ = 0` this is the exact oracle, bit for
/// bit.
pub fn sam_oracle<P: Problem>(
    problem: &P,
    x: &PointOf<P::Geometry>,
    rho: f64,
    lipschitz: f64,
) -> Result<OutputOf<P>, GeometryError> {
    let man = problem.manifold();
    let grad = problem.rgrad(x)?;
    if rho == 0.0 {
        return Ok(OracleOutput {
            g: grad,
            bound: ErrorBound::Absolute(0.0),
            evals: 1,
        });
    }
    let gn = grad.norm();
    if gn < SAM_ZERO_GRADIENT {
        return Ok(OracleOutput {
            g: man.zero_tangent(x),
            bound: ErrorBound::Absolute(lipschitz * rho),
            evals: 1,
        });
    }
    let adv = man.retract(x, &grad.scaled(rho / gn))?;
    let adv_grad = problem.rgrad(&adv)?;
    Ok(OracleOutput {
        g: man.transport_between(&adv, x, &adv_grad)?,
        bound: ErrorBound::Absolute(lipschitz * rho),
        evals: 2,
    })
}

/// Extragradient: the gradient at `x_adv = R_x(−ρ grad f(x))`, projected back
/// onto `T_x M`. Certifies `Relative(ν)`, valid while `ρ ≤ ν/L`. With `ρ = 0`
/// this is the exact oracle, bit for bit.
pub fn extragrad_oracle<P: Problem>(
    problem: &P,
    x: &PointOf<P::Geometry>,
    rho: f64,
    nu: f64,
) -> Result<OutputOf<P>, GeometryError> {
    let man = problem.manifold();
    let grad = problem.rgrad(x)?;
    if rho == 0.0 {
        return Ok(OracleOutput {
            g: grad,
            bound: ErrorBound::Absolute(0.0),
            evals: 1,
        });
    }
    if grad.is_zero() {
        return Ok(OracleOutput {
            g: grad,
            bound: ErrorBound::Relative(nu),
            evals: 1,
        });
    }
    let adv = man.retract(x, &grad.scaled(-rho))?;
    let adv_grad = problem.rgrad(&adv)?;
    Ok(OracleOutput {
        g: man.transport_between(&adv, x, &adv_grad)?,
        bound: ErrorBound::Relative(nu),
        evals: 2,
    })
}

/// A stateful oracle driven by the descent loop.
pub trait GradientOracle<P: Problem> {
    fn label(&self) -> String;

    fn evaluate(&mut self, problem: &P, x: &PointOf<P::Geometry>, k: usize) -> Result<OutputOf<P>, GeometryError>;
}

/// RNG stream for a run: ChaCha8 keyed by `seed`, on stream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Default)]
pub struct Exact;

impl<P: Problem> GradientOracle<P> for Exact {
    fn label(&self) -> String {
        "exact".into()
    }

    fn evaluate(&mut self, problem: &P, x: &PointOf<P::Geometry>, _k: usize) -> Result<OutputOf<P>, GeometryError> {
        exact_oracle(problem, x)
    }
}

#[derive(Debug, Clone)]
pub struct AdditiveNoise {
    pub nu: f64,
    pub schedule: ErrorSchedule,
    rng: ChaCha8Rng,
}

impl AdditiveNoise {
    pub fn new(nu: f64, schedule: ErrorSchedule, rng: ChaCha8Rng) -> Result<Self, ParameterError> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(ParameterError(format!("noise level must be >= 0, got {nu}")));
        }
        Ok(AdditiveNoise { nu, schedule, rng })
    }

    pub fn epsilon(&self, k: usize) -> f64 {
        self.nu * self.schedule.delta(k)
    }
}

impl<P: Problem> GradientOracle<P> for AdditiveNoise {
    fn label(&self) -> String {
        format!("additive-noise(nu={})", self.nu)
    }

    fn evaluate(&mut self, problem: &P, x: &PointOf<P::Geometry>, k: usize) -> Result<OutputOf<P>, GeometryError> {
        additive_noise_oracle(problem, x, k, self.nu, &self.schedule, &mut self.rng)
    }
}

#[derive(Debug, Clone)]
pub struct RelativeNoise {
    pub nu: f64,
    rng: ChaCha8Rng,
}

impl RelativeNoise {
    pub fn new(nu: f64, rng: ChaCha8Rng) -> Result<Self, ParameterError> {
        if !(0.0..1.0).contains(&nu) {
            return Err(ParameterError(format!("relative error must lie in [0, 1), got {nu}")));
        }
        Ok(RelativeNoise { nu, rng })
    }
}

impl<P: Problem> GradientOracle<P> for RelativeNoise {
    fn label(&self) -> String {
        format!("relative-noise(nu={})", self.nu)
    }

    fn evaluate(&mut self, problem: &P, x: &PointOf<P::Geometry>, _k: usize) -> Result<OutputOf<P>, GeometryError> {
        relative_noise_oracle(problem, x, self.nu, &mut self.rng)
    }
}

#[derive(Debug, Clone)]
pub struct ZerothOrder {
    /// `None` selects [`default_smoothing`] at every point.
    pub mu: Option<f64>,
    rng: ChaCha8Rng,
}

impl ZerothOrder {
    pub fn new(mu: Option<f64>, rng: ChaCha8Rng) -> Result<Self, ParameterError> {
        if let Some(m) = mu {
            if !(m > 0.0) || !m.is_finite() {
                return Err(ParameterError(format!("smoothing radius must be > 0, got {m}")));
            }
        }
        Ok(ZerothOrder { mu, rng })
    }
}

impl<P: Problem> GradientOracle<P> for ZerothOrder {
    fn label(&self) -> String {
        "zeroth-order".into()
    }

    fn evaluate(&mut self, problem: &P, x: &PointOf<P::Geometry>, _k: usize) -> Result<OutputOf<P>, GeometryError> {
        let mu = self.mu.unwrap_or_else(|| default_smoothing(problem.manifold(), x));
        zeroth_order_oracle(problem, x, mu, &mut self.rng)
    }
}

#[derive(Debug, Clone)]
pub struct Sam {
    pub rho: RhoSchedule,
    pub lipschitz: f64,
}

impl Sam {
    pub fn new(rho: RhoSchedule, lipschitz: f64) -> Result<Self, ParameterError> {
        if !(rho.max_rho() >= 0.0) {
            return Err(ParameterError(format!(
                "SAM radius must be >= 0, got {}",
                rho.max_rho()
            )));
        }
        Ok(Sam { rho, lipschitz })
    }
}

impl<P: Problem> GradientOracle<P> for Sam {
    fn label(&self) -> String {
        "sam".into()
    }

    fn evaluate(&mut self, problem: &P, x: &PointOf<P::Geometry>, k: usize) -> Result<OutputOf<P>, GeometryError> {
        sam_oracle(problem, x, self.rho.rho(k), self.lipschitz)
    }
}

#[derive(Debug, Clone)]
pub struct Extragradient {
    pub rho: RhoSchedule,
    /// Declared relative error.
    pub nu: f64,
}

impl Extragradient {
    pub fn new(rho: RhoSchedule, nu: f64) -> Result<Self, ParameterError> {
        if !(rho.max_rho() >= 0.0) {
            return Err(ParameterError(format!(
                "extragradient radius must be >= 0, got {}",
                rho.max_rho()
            )));
        }
        if !(nu >= 0.0) {
            return Err(ParameterError(format!(
                "declared relative error must be >= 0, got {nu}"
            )));
        }
        Ok(Extragradient { rho, nu })
    }
}

impl<P: Problem> GradientOracle<P> for Extragradient {
    fn label(&self) -> String {
        "extragradient".into()
    }

    fn evaluate(&mut self, problem: &P, x: &PointOf<P::Geometry>, k: usize) -> Result<OutputOf<P>, GeometryError> {
        extragrad_oracle(problem, x, self.rho.rho(k), self.nu)
    }
}

/// Oracle output checked against the exact gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSample {
    pub grad_norm: f64,
    pub g_norm: f64,
    /// `‖g − grad f(x)‖`
    pub error: f64,
    pub bound: ErrorBound,
}

impl AuditSample {
    pub fn bound_holds(&self, slack: f64) -> bool {
        self.bound.holds(self.error, self.grad_norm, slack)
    }

    /// `(1 − ν)‖grad‖ ≤ ‖g‖ ≤ (1 + ν)‖grad‖` for relative bounds; vacuous otherwise.
    pub fn two_sided_holds(&self, slack: f64) -> bool {
        match self.bound {
            ErrorBound::Relative(nu) => {
                let tol = slack * self.grad_norm.max(f64::MIN_POSITIVE);
                self.g_norm >= (1.0 - nu) * self.grad_norm - tol && self.g_norm <= (1.0 + nu) * self.grad_norm + tol
            }
            _ => true,
        }
    }
}

/// Compares an oracle output against the exact gradient at `x`.
pub fn audit<P: Problem>(
    problem: &P,
    x: &PointOf<P::Geometry>,
    out: &OutputOf<P>,
) -> Result<AuditSample, GeometryError> {
    let grad = problem.rgrad(x)?;
    let diff = out.g.sub(&grad)?;
    Ok(AuditSample {
        grad_norm: grad.norm(),
        g_norm: out.g.norm(),
        error: diff.norm(),
        bound: out.bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_pca_instance, PcaProblem, SphereRayleigh};
    use nalgebra::DMatrix;

    fn rayleigh10() -> SphereRayleigh {
        let mut rng = stream_rng(11, 0);
        let a = crate::linalg::gaussian_matrix(10, 10, &mut rng);
        SphereRayleigh::new(&a * a.transpose() * 0.5 + (&a * a.transpose()).transpose() * 0.5).unwrap()
    }

    #[test]
    fn additive_noise_examples() {
        let prob = rayleigh10();
        let mut rng = stream_rng(1, 2);
        let x = prob.manifold().random_point(&mut rng);
        let grad = prob.rgrad(&x).unwrap();
        let sched = ErrorSchedule::power_decay(2.1).unwrap();
        let out = additive_noise_oracle(&prob, &x, 0, 0.0, &sched, &mut rng).unwrap();
        assert_eq!(out.g.repr(), grad.repr());
        let out = additive_noise_oracle(&prob, &x, 0, 1e-3, &sched, &mut rng).unwrap();
        let err = out.g.sub(&grad).unwrap().norm();
        assert!((err - 1e-3).abs() < 1e-15);
        assert_eq!(out.bound, ErrorBound::Absolute(1e-3));
    }

    #[test]
    fn additive_noise_error_is_exactly_declared() {
        let prob = SphereRayleigh::from_diagonal(&[3.0, 1.0, 1.0]).unwrap();
        let mut rng = stream_rng(2, 2);
        let sched = ErrorSchedule::power_decay(2.1).unwrap();
        for _ in 0..1000 {
            let x = prob.manifold().random_point(&mut rng);
            let out = additive_noise_oracle(&prob, &x, 0, 1e-3, &sched, &mut rng).unwrap();
            let s = audit(&prob, &x, &out).unwrap();
            let ratio = s.error / 1e-3;
            assert!((ratio - 1.0).abs() <= 1e-12, "ratio {ratio}");
        }
        // later iterates: the subtraction g − grad loses digits in proportion to ‖grad‖/ε
        for k in 1..200 {
            let x = prob.manifold().random_point(&mut rng);
            let out = additive_noise_oracle(&prob, &x, k, 1e-3, &sched, &mut rng).unwrap();
            let s = audit(&prob, &x, &out).unwrap();
            let eps = 1e-3 * sched.delta(k);
            assert!((s.error - eps).abs() <= 1e-12 * eps + 1e-14 * s.grad_norm);
        }
    }

    #[test]
    fn relative_noise_two_sided_and_inner_product() {
        let prob = rayleigh10();
        let mut rng = stream_rng(3, 2);
        let nu = 0.5;
        for _ in 0..1000 {
            let x = prob.manifold().random_point(&mut rng);
            let out = relative_noise_oracle(&prob, &x, nu, &mut rng).unwrap();
            let s = audit(&prob, &x, &out).unwrap();
            assert!(s.bound_holds(1e-12));
            assert!(s.two_sided_holds(1e-12));
            let grad = prob.rgrad(&x).unwrap();
            let ip = out.g.dot(&grad).unwrap();
            assert!(ip >= (1.0 - nu) * s.grad_norm.powi(2) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn relative_noise_at_stationary_point_is_zero() {
        let prob = SphereRayleigh::from_diagonal(&[3.0, 1.0, 1.0]).unwrap();
        let x = prob.manifold().point(&[1.0, 0.0, 0.0]).unwrap();
        let out = relative_noise_oracle(&prob, &x, 0.5, &mut stream_rng(0, 2)).unwrap();
        assert!(out.g.is_zero());
    }

    #[test]
    fn zeroth_order_constant_cost_gives_zero() {
        let prob = PcaProblem::new(crate::problems::PcaInstance::new(DMatrix::identity(5, 5), 2).unwrap()).unwrap();
        let mut rng = stream_rng(4, 2);
        let x = prob.manifold().random_point(&mut rng);
        let out = zeroth_order_oracle(&prob, &x, 1e-5, &mut rng).unwrap();
        assert!(out.g.norm() < 1e-9);
        assert_eq!(out.evals, 2);
        assert_eq!(out.bound, ErrorBound::Unbounded);
    }

    #[test]
    fn zeroth_order_mean_aligns_with_gradient() {
        let prob = rayleigh10();
        let mut rng = stream_rng(5, 2);
        let x = prob.manifold().random_point(&mut rng);
        let grad = prob.rgrad(&x).unwrap();
        let mut mean = prob.manifold().zero_tangent(&x);
        let samples = 10_000;
        for _ in 0..samples {
            let out = zeroth_order_oracle(&prob, &x, 1e-5, &mut rng).unwrap();
            mean = mean.add(&out.g).unwrap();
        }
        let cos = mean.dot(&grad).unwrap() / (mean.norm() * grad.norm());
        assert!(cos >= 0.9, "cosine {cos}");
    }

    #[test]
    fn sam_small_radius_and_stationary_guard() {
        let prob = rayleigh10();
        let mut rng = stream_rng(6, 2);
        let x = prob.manifold().random_point(&mut rng);
        let grad = prob.rgrad(&x).unwrap();
        let out = sam_oracle(&prob, &x, 1e-8, prob.lipschitz()).unwrap();
        assert!(out.g.sub(&grad).unwrap().norm() < 1e-6);

        let p3 = SphereRayleigh::from_diagonal(&[3.0, 1.0, 1.0]).unwrap();
        let e1 = p3.manifold().point(&[1.0, 0.0, 0.0]).unwrap();
        assert!(sam_oracle(&p3, &e1, 0.1, 6.0).unwrap().g.is_zero());
    }

    #[test]
    fn sam_error_within_l_rho() {
        let prob = rayleigh10();
        let l = prob.lipschitz();
        let mut rng = stream_rng(7, 2);
        for i in 0..1000 {
            let rho = if i % 2 == 0 { 1e-3 } else { 1e-2 };
            let x = prob.manifold().random_point(&mut rng);
            let out = sam_oracle(&prob, &x, rho, l).unwrap();
            let s = audit(&prob, &x, &out).unwrap();
            assert!(s.bound_holds(1e-12), "error {} bound {}", s.error, l * rho);
        }
    }

    #[test]
    fn extragradient_examples() {
        let prob = rayleigh10();
        let l = prob.lipschitz();
        let mut rng = stream_rng(8, 2);
        let x = prob.manifold().random_point(&mut rng);
        let grad = prob.rgrad(&x).unwrap();
        assert_eq!(extragrad_oracle(&prob, &x, 0.0, 0.5).unwrap().g.repr(), grad.repr());
        for _ in 0..1000 {
            let x = prob.manifold().random_point(&mut rng);
            let out = extragrad_oracle(&prob, &x, 0.5 / l, 0.5).unwrap();
            let s = audit(&prob, &x, &out).unwrap();
            assert!(s.bound_holds(1e-12), "error {} vs {}", s.error, 0.5 * s.grad_norm);
        }
    }

    #[test]
    fn outputs_are_tangent() {
        let (inst, _) = gen_pca_instance(8, 3, 1).unwrap();
        let prob = PcaProblem::new(inst).unwrap();
        let m = prob.manifold();
        let mut rng = stream_rng(9, 2);
        let sched = ErrorSchedule::power_decay(2.1).unwrap();
        for k in 0..50 {
            let x = m.random_point(&mut rng);
            let outs = [
                additive_noise_oracle(&prob, &x, k, 0.1, &sched, &mut rng).unwrap(),
                relative_noise_oracle(&prob, &x, 0.3, &mut rng).unwrap(),
                zeroth_order_oracle(&prob, &x, 1e-5, &mut rng).unwrap(),
                sam_oracle(&prob, &x, 1e-2, prob.lipschitz()).unwrap(),
                extragrad_oracle(&prob, &x, 1e-2, 0.5).unwrap(),
            ];
            for out in outs {
                let a = m.tangent_to_ambient(&x, &out.g).unwrap();
                assert!(m.tangent_from_ambient(&x, &a).is_ok());
            }
        }
    }

    #[test]
    fn seeded_oracles_are_deterministic() {
        let prob = rayleigh10();
        let x = prob.manifold().random_point(&mut stream_rng(10, 1));
        let draw = || {
            let mut o = RelativeNoise::new(0.4, stream_rng(10, 2)).unwrap();
            (0..5)
                .map(|k| {
                    GradientOracle::<SphereRayleigh>::evaluate(&mut o, &prob, &x, k)
                        .unwrap()
                        .g
                        .repr()
                        .clone()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn schedules() {
        let s = ErrorSchedule::power_decay(2.1).unwrap();
        assert_eq!(s.delta(0), 1.0);
        assert!((s.delta(1) - 2f64.powf(-2.1)).abs() < 1e-15);
        assert!(ErrorSchedule::power_decay(0.5).is_err());
        let r = RhoSchedule::PowerDecay { rho0: 0.1, power: 1.5 };
        assert_eq!(r.rho(0), 0.1);
        assert_eq!(r.max_rho(), 0.1);
    }
}

//! The descent loop `x_{k+1} = R_{x_k}(−t_k g_k)` and its specializations.
//!
//! Every runner goes through [`run`]; they differ only in the oracle plugged
//! in and the parameter-regime checks attached to the trace.

mod armijo;
mod schedule;
mod trace;

use std::time::Instant;

use crate::error::{GeometryError, ParameterError};
use crate::manifold::{Manifold, PointOf, TangentOf};
use crate::oracle::{self, AdditiveNoise, ErrorBound, Exact, Extragradient, GradientOracle, RhoSchedule, Sam};
use crate::problems::Problem;

pub use armijo::{armijo_search, ArmijoOutcome};
pub use schedule::{
    capped_step, validate_irgd, validate_irgdr, validate_reg, validate_rsam, ArmijoParams, ParamWarning, StepSchedule,
    StopRule,
};
pub use trace::{
    absolute_descent_violations, relative_descent_violations, AuditRecord, DescentViolation, IterRecord, Termination,
    Trace,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Compute the exact gradient each iteration, record it, and stop on it.
    pub audit: bool,
    /// Record wall-clock seconds; when off every record has `wall_s = 0`.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            audit: false,
            timing: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult<X> {
    pub trace: Trace,
    pub x: X,
}

pub type ResultOf<P> = RunResult<PointOf<<P as Problem>::Geometry>>;

/// `R_x(−t g)`.
pub fn step<M: Manifold>(manifold: &M, x: &PointOf<M>, g: &TangentOf<M>, t: f64) -> Result<PointOf<M>, GeometryError> {
    manifold.retract(x, &g.scaled(-t))
}

/// `‖g‖ + declared bound`, an upper bound on `‖grad f‖` without auditing.
fn surrogate_grad_norm(g_norm: f64, bound: ErrorBound) -> f64 {
    match bound {
        ErrorBound::Absolute(eps) => g_norm + eps,
        ErrorBound::Relative(nu) if nu < 1.0 => g_norm / (1.0 - nu),
        _ => g_norm,
    }
}

/// The generic loop. Solver failures end the run with
/// [`Termination::SingularityError`]; they are not returned as errors.
pub fn run<P, O>(
    problem: &P,
    x0: PointOf<P::Geometry>,
    oracle: &mut O,
    schedule: &StepSchedule,
    stop: &StopRule,
    opts: RunOptions,
) -> ResultOf<P>
where
    P: Problem,
    O: GradientOracle<P> + ?Sized,
{
    let manifold = problem.manifold();
    let start = Instant::now();
    let clock = |now: &Instant| if opts.timing { now.elapsed().as_secs_f64() } else { 0.0 };

    let mut x = x0;
    let mut records = Vec::new();
    let mut audits = Vec::new();
    let mut warnings = Vec::new();
    let mut evals = 0usize;
    let mut cached_f: Option<f64> = None;
    let mut armijo_t0: Option<f64> = None;
    let termination;

    let mut k = 0usize;
    loop {
        let f = match cached_f.take() {
            Some(f) => f,
            None => {
                evals += 1;
                problem.cost(&x)
            }
        };
        if manifold.point_warning(&x) {
            warnings.push(format!("k={k}: ambiguous rank truncation"));
        }

        let out = match oracle.evaluate(problem, &x, k) {
            Ok(out) => out,
            Err(e) => {
                records.push(IterRecord {
                    k,
                    t: 0.0,
                    f,
                    grad_norm: f64::NAN,
                    err_bound: f64::NAN,
                    evals,
                    wall_s: clock(&start),
                });
                termination = Termination::SingularityError(e.to_string());
                break;
            }
        };
        evals += out.evals;
        let g_norm = out.g.norm();

        let grad_norm = if opts.audit {
            match oracle::audit(problem, &x, &out) {
                Ok(s) => {
                    audits.push(AuditRecord {
                        k,
                        grad_norm: s.grad_norm,
                        g_norm: s.g_norm,
                        error: s.error,
                        bound: s.bound,
                    });
                    s.grad_norm
                }
                Err(e) => {
                    termination = Termination::SingularityError(e.to_string());
                    break;
                }
            }
        } else {
            surrogate_grad_norm(g_norm, out.bound)
        };
        let err_bound = match out.bound {
            ErrorBound::Relative(nu) if !opts.audit => nu * grad_norm,
            b => b.absolute(grad_norm).unwrap_or(f64::NAN),
        };

        let mut record = IterRecord {
            k,
            t: 0.0,
            f,
            grad_norm,
            err_bound,
            evals,
            wall_s: clock(&start),
        };

        let stop_reason = if grad_norm < stop.grad_tol {
            Some(Termination::GradTol)
        } else if k >= stop.max_iters {
            Some(Termination::MaxIters)
        } else if stop
            .max_wall_seconds
            .is_some_and(|w| start.elapsed().as_secs_f64() >= w)
        {
            Some(Termination::WallClock)
        } else {
            None
        };
        if let Some(reason) = stop_reason {
            records.push(record);
            termination = reason;
            break;
        }

        let next = match schedule {
            StepSchedule::Armijo(params) => {
                let t0 = armijo_t0.map_or(params.initial, |t| t * params.warm_start_factor);
                match armijo_search(problem, &x, &out.g, f, t0, params) {
                    Ok(found) => {
                        evals += found.evals;
                        if !found.accepted {
                            warnings.push(format!("k={k}: line search exhausted its backtracking budget"));
                        }
                        armijo_t0 = Some(found.t);
                        cached_f = Some(found.f_new);
                        record.t = found.t;
                        Ok(found.point)
                    }
                    Err(e) => Err(e),
                }
            }
            fixed => {
                let t = fixed.fixed_step(k).expect("non-search schedule has a fixed step");
                record.t = t;
                step(manifold, &x, &out.g, t)
            }
        };
        record.evals = evals;
        records.push(record);
        match next {
            Ok(y) => x = y,
            Err(e) => {
                termination = Termination::SingularityError(e.to_string());
                break;
            }
        }
        k += 1;
    }

    RunResult {
        trace: Trace {
            records,
            termination,
            warnings,
            audit: opts.audit.then_some(audits),
        },
        x,
    }
}

fn with_warnings<X>(mut result: RunResult<X>, found: Vec<ParamWarning>) -> RunResult<X> {
    let mut w: Vec<String> = found.iter().map(ToString::to_string).collect();
    w.append(&mut result.trace.warnings);
    result.trace.warnings = w;
    result
}

/// Exact Riemannian gradient descent.
pub fn run_rgd<P: Problem>(
    problem: &P,
    x0: PointOf<P::Geometry>,
    schedule: &StepSchedule,
    stop: &StopRule,
    opts: RunOptions,
) -> ResultOf<P> {
    run(problem, x0, &mut Exact, schedule, stop, opts)
}

/// Absolute-error method with the additive-noise oracle.
pub fn run_irgd<P: Problem>(
    problem: &P,
    x0: PointOf<P::Geometry>,
    mut oracle: AdditiveNoise,
    schedule: &StepSchedule,
    stop: &StopRule,
    opts: RunOptions,
) -> ResultOf<P> {
    let warnings = validate_irgd(schedule, oracle.nu, &oracle.schedule);
    with_warnings(run(problem, x0, &mut oracle, schedule, stop, opts), warnings)
}

/// Relative-error method. `oracle` must certify `Relative(ν)`.
pub fn run_irgdr<P, O>(
    problem: &P,
    x0: PointOf<P::Geometry>,
    oracle: &mut O,
    nu: f64,
    schedule: &StepSchedule,
    stop: &StopRule,
    opts: RunOptions,
) -> Result<ResultOf<P>, ParameterError>
where
    P: Problem,
    O: GradientOracle<P> + ?Sized,
{
    if !(0.0..1.0).contains(&nu) {
        return Err(ParameterError(format!("relative error must lie in [0, 1), got {nu}")));
    }
    let lipschitz = match *schedule {
        StepSchedule::CappedConstant {
            nu: capped_nu,
            lipschitz,
            ..
        } => {
            if capped_nu != nu {
                return Err(ParameterError(format!(
                    "capped stepsize was built for ν = {capped_nu}, run uses ν = {nu}"
                )));
            }
            lipschitz
        }
        _ => problem.lipschitz(),
    };
    let warnings = validate_irgdr(schedule, nu, lipschitz);
    Ok(with_warnings(run(problem, x0, oracle, schedule, stop, opts), warnings))
}

/// Sharpness-aware minimization.
pub fn run_rsam<P: Problem>(
    problem: &P,
    x0: PointOf<P::Geometry>,
    rho: RhoSchedule,
    lipschitz: f64,
    schedule: &StepSchedule,
    stop: &StopRule,
    opts: RunOptions,
) -> ResultOf<P> {
    let warnings = validate_rsam(schedule, &rho, lipschitz);
    let mut oracle = Sam { rho, lipschitz };
    with_warnings(run(problem, x0, &mut oracle, schedule, stop, opts), warnings)
}

/// Extragradient method; `nu` is the relative error the radius is meant to
/// certify through `ρ ≤ ν/L`.
#[allow(clippy::too_many_arguments)]
pub fn run_reg<P: Problem>(
    problem: &P,
    x0: PointOf<P::Geometry>,
    rho: RhoSchedule,
    nu: f64,
    lipschitz: f64,
    schedule: &StepSchedule,
    stop: &StopRule,
    opts: RunOptions,
) -> Result<ResultOf<P>, ParameterError> {
    let mut oracle = Extragradient::new(rho, nu)?;
    let warnings = validate_reg(schedule, &rho, nu, lipschitz);
    Ok(with_warnings(
        run(problem, x0, &mut oracle, schedule, stop, opts),
        warnings,
    ))
}

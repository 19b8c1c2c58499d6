use crate::error::GeometryError;
use crate::manifold::{Manifold, PointOf, TangentOf};
use crate::problems::Problem;

use super::schedule::ArmijoParams;

#[derive(Debug, Clone)]
pub struct ArmijoOutcome<X> {
    pub t: f64,
    pub point: X,
    pub f_new: f64,
    /// False when the backtracking budget ran out; the smallest trial is used.
    pub accepted: bool,
    pub evals: usize,
}

/// Backtracking along `−g` from `t0`: accepts the first
/// `t ∈ {t0 βʲ}` with `f(R_x(−t g)) ≤ f(x) − c t ‖g‖²`.
pub fn armijo_search<P: Problem>(
    problem: &P,
    x: &PointOf<P::Geometry>,
    g: &TangentOf<P::Geometry>,
    fx: f64,
    t0: f64,
    params: &ArmijoParams,
) -> Result<ArmijoOutcome<PointOf<P::Geometry>>, GeometryError> {
    let m = problem.manifold();
    let g2 = g.norm().powi(2);
    let mut t = t0;
    let mut evals = 0;
    let mut last = None;
    for _ in 0..=params.max_backtracks {
        let y = m.retract(x, &g.scaled(-t))?;
        let fy = problem.cost(&y);
        evals += 1;
        if fy <= fx - params.sufficient_decrease * t * g2 {
            return Ok(ArmijoOutcome {
                t,
                point: y,
                f_new: fy,
                accepted: true,
                evals,
            });
        }
        last = Some((t, y, fy));
        t *= params.contraction;
    }
    let (t, point, f_new) = last.expect("at least one trial");
    Ok(ArmijoOutcome {
        t,
        point,
        f_new,
        accepted: false,
        evals,
    })
}

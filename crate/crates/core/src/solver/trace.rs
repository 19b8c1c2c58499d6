use std::fmt;

use crate::oracle::ErrorBound;

/// State at iterate `k` and the stepsize taken from it. The terminal record
/// has `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub k: usize,
    pub t: f64,
    pub f: f64,
    /// Exact `‖grad f(x_k)‖` when audited, otherwise the certified surrogate.
    pub grad_norm: f64,
    /// Absolute-equivalent error bound (`NaN` when the oracle has none).
    pub err_bound: f64,
    /// Cumulative cost and gradient evaluations.
    pub evals: usize,
    pub wall_s: f64,
}

/// Oracle output compared with the exact gradient at iterate `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRecord {
    pub k: usize,
    pub grad_norm: f64,
    pub g_norm: f64,
    pub error: f64,
    pub bound: ErrorBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    GradTol,
    MaxIters,
    WallClock,
    SingularityError(String),
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::GradTol => "grad_tol",
            Termination::MaxIters => "max_iters",
            Termination::WallClock => "wall_clock",
            Termination::SingularityError(_) => "singularity_error",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::SingularityError(msg) => write!(f, "singularity_error ({msg})"),
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub records: Vec<IterRecord>,
    pub termination: Termination,
    pub warnings: Vec<String>,
    /// Present when the run was audited; one entry per record.
    pub audit: Option<Vec<AuditRecord>>,
}

impl Trace {
    /// Index of the last iterate.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.k)
    }

    pub fn final_record(&self) -> Option<&IterRecord> {
        self.records.last()
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::GradTol
    }

    pub fn final_wall_s(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.wall_s)
    }
}

/// Descent-inequality failures along an audited trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentViolation {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Checks `f_{k+1} ≤ f_k − (δ t_k / 2)‖grad f(x_k)‖²` for `k ≥ skip`,
/// allowing `1e-10 |f_k|` of round-off.
pub fn relative_descent_violations(trace: &Trace, delta: f64, skip: usize) -> Vec<DescentViolation> {
    trace
        .records
        .windows(2)
        .filter(|w| w[0].k >= skip)
        .filter_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let rhs = a.f - 0.5 * delta * a.t * a.grad_norm * a.grad_norm;
            (b.f > rhs + 1e-10 * a.f.abs()).then_some(DescentViolation { k: a.k, lhs: b.f, rhs })
        })
        .collect()
}

/// Checks the absolute-error descent inequality
/// `f_{k+1} ≤ f_k − c₁ t_k ‖grad‖² + c₂ t_k ε_k` with
/// `c₁ = ½(2 − Lt − ε + Ltε)`, `c₂ = ½(1 − Lt) + Ltε/2`, at every `k ≥ skip`
/// where `L t_k < 1`. Returns the violations and the number of checked steps.
pub fn absolute_descent_violations(trace: &Trace, lipschitz: f64, skip: usize) -> (Vec<DescentViolation>, usize) {
    let mut checked = 0;
    let mut out = Vec::new();
    for w in trace.records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let lt = lipschitz * a.t;
        if a.k < skip || !(lt < 1.0) || !a.err_bound.is_finite() {
            continue;
        }
        checked += 1;
        let eps = a.err_bound;
        let c1 = 0.5 * (2.0 - lt - eps + lt * eps);
        let c2 = 0.5 * (1.0 - lt) + 0.5 * lt * eps;
        let rhs = a.f - c1 * a.t * a.grad_norm * a.grad_norm + c2 * a.t * eps;
        if b.f > rhs + 1e-10 * a.f.abs() {
            out.push(DescentViolation { k: a.k, lhs: b.f, rhs });
        }
    }
    (out, checked)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: usize, t: f64, f: f64, g: f64, e: f64) -> IterRecord {
        IterRecord {
            k,
            t,
            f,
            grad_norm: g,
            err_bound: e,
            evals: k,
            wall_s: 0.0,
        }
    }

    fn trace(records: Vec<IterRecord>) -> Trace {
        Trace {
            records,
            termination: Termination::MaxIters,
            warnings: vec![],
            audit: None,
        }
    }

    #[test]
    fn relative_descent_flags_increase() {
        let t = trace(vec![
            rec(0, 0.1, 1.0, 1.0, 0.0),
            rec(1, 0.1, 0.9, 1.0, 0.0),
            rec(2, 0.0, 0.95, 1.0, 0.0),
        ]);
        let v = relative_descent_violations(&t, 0.5, 0);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].k, 1);
        assert!(relative_descent_violations(&t, 0.5, 2).is_empty());
    }

    #[test]
    fn absolute_descent_skips_large_steps() {
        let t = trace(vec![
            rec(0, 1.0, 1.0, 1.0, 0.0),
            rec(1, 0.1, 2.0, 1.0, 0.0),
            rec(2, 0.0, 1.0, 0.1, 0.0),
        ]);
        let (v, checked) = absolute_descent_violations(&t, 2.0, 0);
        assert_eq!(checked, 1);
        assert!(v.is_empty());
    }

    #[test]
    fn termination_labels() {
        assert_eq!(Termination::GradTol.to_string(), "grad_tol");
        assert!(Termination::SingularityError("x".into())
            .to_string()
            .starts_with("singularity_error"));
    }
}

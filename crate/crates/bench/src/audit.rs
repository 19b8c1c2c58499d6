//! Violation counts over an audited trace.

use std::fmt;

use riemann_inexact::solver::{absolute_descent_violations, relative_descent_violations, AuditRecord, IterRecord};
use serde::Serialize;
use thiserror::Error;

/// Relative round-off allowance for the error-bound checks.
pub const BOUND_SLACK: f64 = 1e-10;

/// Which descent inequality applies to a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DescentRule {
    /// `f_{k+1} ≤ f_k − (δ t_k / 2)‖grad‖²` after the first iteration.
    Relative { delta: f64 },
    /// The absolute-error descent inequality wherever `L t_k < 1`.
    Absolute { lipschitz: f64 },
    /// No certified error, so no inequality to check.
    None,
}

#[derive(Debug, Error, PartialEq)]
pub enum AuditError {
    #[error("audit data absent: rerun with output.audit = true")]
    Unavailable,

    #[error("audit records do not line up with the trace (k = {0})")]
    Misaligned(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditFindings {
    pub descent_rule: DescentRule,
    pub descent_checked: usize,
    pub descent_violations: Vec<usize>,
    pub bound_checked: usize,
    pub bound_violations: Vec<usize>,
    pub two_sided_checked: usize,
    pub two_sided_violations: Vec<usize>,
}

impl AuditFindings {
    pub fn pass(&self) -> bool {
        self.descent_violations.is_empty() && self.bound_violations.is_empty() && self.two_sided_violations.is_empty()
    }

    pub fn violation_count(&self) -> usize {
        self.descent_violations.len() + self.bound_violations.len() + self.two_sided_violations.len()
    }
}

impl fmt::Display for AuditFindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |f: &mut fmt::Formatter<'_>, name: &str, checked: usize, bad: &[usize]| {
            let first = bad.first().map_or(String::new(), |k| format!(" (first at k={k})"));
            writeln!(f, "{name:<10} checked {checked:>6}  violations {:>6}{first}", bad.len())
        };
        line(f, "descent", self.descent_checked, &self.descent_violations)?;
        line(f, "bound", self.bound_checked, &self.bound_violations)?;
        line(f, "two-sided", self.two_sided_checked, &self.two_sided_violations)?;
        write!(f, "{}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

/// Counts violations of (a) the descent inequality in `rule`, (b) each
/// oracle's declared error bound and (c) the two-sided norm bound for
/// relative oracles.
pub fn audit_report(
    trace: &[IterRecord],
    audit: Option<&[AuditRecord]>,
    rule: DescentRule,
) -> Result<AuditFindings, AuditError> {
    let audit = audit.ok_or(AuditError::Unavailable)?;
    if audit.is_empty() && !trace.is_empty() {
        return Err(AuditError::Unavailable);
    }
    for (r, a) in trace.iter().zip(audit) {
        if r.k != a.k {
            return Err(AuditError::Misaligned(a.k));
        }
    }

    let view = riemann_inexact::solver::Trace {
        records: trace.to_vec(),
        termination: riemann_inexact::solver::Termination::MaxIters,
        warnings: vec![],
        audit: None,
    };
    let (descent_checked, descent_violations) = match rule {
        DescentRule::Relative { delta } => {
            let v = relative_descent_violations(&view, delta, 1);
            (
                trace.iter().filter(|r| r.k >= 1).count().saturating_sub(1),
                v.iter().map(|v| v.k).collect(),
            )
        }
        DescentRule::Absolute { lipschitz } => {
            let (v, checked) = absolute_descent_violations(&view, lipschitz, 0);
            (checked, v.iter().map(|v| v.k).collect())
        }
        DescentRule::None => (0, Vec::new()),
    };

    let mut bound_checked = 0;
    let mut bound_violations = Vec::new();
    let mut two_sided_checked = 0;
    let mut two_sided_violations = Vec::new();
    for a in audit {
        let sample = riemann_inexact::oracle::AuditSample {
            grad_norm: a.grad_norm,
            g_norm: a.g_norm,
            error: a.error,
            bound: a.bound,
        };
        if a.bound.absolute(a.grad_norm).is_some() {
            bound_checked += 1;
            if !sample.bound_holds(BOUND_SLACK) {
                bound_violations.push(a.k);
            }
        }
        if matches!(a.bound, riemann_inexact::oracle::ErrorBound::Relative(_)) {
            two_sided_checked += 1;
            if !sample.two_sided_holds(BOUND_SLACK) {
                two_sided_violations.push(a.k);
            }
        }
    }

    Ok(AuditFindings {
        descent_rule: rule,
        descent_checked,
        descent_violations,
        bound_checked,
        bound_violations,
        two_sided_checked,
        two_sided_violations,
    })
}

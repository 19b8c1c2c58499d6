use std::fmt;

use crate::error::ParameterError;

/// Backtracking parameters. The first trial of each search is twice the
/// previously accepted step (`initial` on the first iteration).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmijoParams {
    pub initial: f64,
    pub contraction: f64,
    pub sufficient_decrease: f64,
    pub max_backtracks: usize,
    pub warm_start_factor: f64,
}

impl Default for ArmijoParams {
    fn default() -> Self {
        ArmijoParams {
            initial: 1.0,
            contraction: 0.5,
            sufficient_decrease: 1e-4,
            max_backtracks: 50,
            warm_start_factor: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// `t_k = 1/k^α` with 1-based `k`.
    Diminishing {
        alpha: f64,
    },
    Constant(f64),
    Armijo(ArmijoParams),
    /// `t = (2 − 2ν − δ) / (L (1 + ν)²)`
    CappedConstant {
        nu: f64,
        delta: f64,
        lipschitz: f64,
    },
}

impl StepSchedule {
    pub fn diminishing(alpha: f64) -> Result<Self, ParameterError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(ParameterError(format!("diminishing exponent must be > 0, got {alpha}")));
        }
        Ok(StepSchedule::Diminishing { alpha })
    }

    pub fn constant(t: f64) -> Result<Self, ParameterError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(ParameterError(format!("constant stepsize must be > 0, got {t}")));
        }
        Ok(StepSchedule::Constant(t))
    }

    pub fn armijo() -> Self {
        StepSchedule::Armijo(ArmijoParams::default())
    }

    pub fn capped(nu: f64, delta: f64, lipschitz: f64) -> Result<Self, ParameterError> {
        if !(0.0..1.0).contains(&nu) {
            return Err(ParameterError(format!("relative error must lie in [0, 1), got {nu}")));
        }
        if !(delta > 0.0) {
            return Err(ParameterError(format!("descent margin δ must be > 0, got {delta}")));
        }
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(ParameterError(format!(
                "Lipschitz constant must be > 0, got {lipschitz}"
            )));
        }
        if !(2.0 - 2.0 * nu - delta > 0.0) {
            return Err(ParameterError(format!(
                "capped stepsize is not positive: 2 − 2ν − δ = {}",
                2.0 - 2.0 * nu - delta
            )));
        }
        Ok(StepSchedule::CappedConstant { nu, delta, lipschitz })
    }

    /// Stepsize at 0-based iteration `k`; `None` for line searches.
    pub fn fixed_step(&self, k: usize) -> Option<f64> {
        match *self {
            StepSchedule::Diminishing { alpha } => Some(((k + 1) as f64).powf(-alpha)),
            StepSchedule::Constant(t) => Some(t),
            StepSchedule::CappedConstant { nu, delta, lipschitz } => Some(capped_step(nu, delta, lipschitz)),
            StepSchedule::Armijo(_) => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            StepSchedule::Diminishing { .. } => "diminishing",
            StepSchedule::Constant(_) => "constant",
            StepSchedule::Armijo(_) => "armijo",
            StepSchedule::CappedConstant { .. } => "capped",
        }
    }
}

/// `(2 − 2ν − δ) / (L (1 + ν)²)`
pub fn capped_step(nu: f64, delta: f64, lipschitz: f64) -> f64 {
    (2.0 - 2.0 * nu - delta) / (lipschitz * (1.0 + nu) * (1.0 + nu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub grad_tol: f64,
    pub max_iters: usize,
    pub max_wall_seconds: Option<f64>,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            grad_tol: 1e-6,
            max_iters: 10_000,
            max_wall_seconds: None,
        }
    }
}

impl StopRule {
    pub fn new(grad_tol: f64, max_iters: usize, max_wall_seconds: Option<f64>) -> Result<Self, ParameterError> {
        if !(grad_tol > 0.0) {
            return Err(ParameterError(format!(
                "gradient tolerance must be > 0, got {grad_tol}"
            )));
        }
        if max_iters == 0 {
            return Err(ParameterError("max_iters must be >= 1".into()));
        }
        if let Some(w) = max_wall_seconds {
            if !(w > 0.0) {
                return Err(ParameterError(format!("wall-clock limit must be > 0, got {w}")));
            }
        }
        Ok(StopRule {
            grad_tol,
            max_iters,
            max_wall_seconds,
        })
    }
}

/// A parameter-regime condition that the configuration does not meet.
/// Runs proceed; the warning is recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamWarning {
    pub code: &'static str,
    pub message: String,
}

impl ParamWarning {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        ParamWarning {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// Checks shared by the diminishing-step regimes: `Σ t_k = ∞`, `t_k ↓ 0`.
fn diminishing_regime(prefix: &'static str, schedule: &StepSchedule, out: &mut Vec<ParamWarning>) -> Option<f64> {
    match *schedule {
        StepSchedule::Diminishing { alpha } => {
            if alpha > 1.0 {
                out.push(ParamWarning::new(prefix, format!("α = {alpha} > 1 makes Σ t_k finite")));
            } else if alpha <= 0.5 {
                out.push(ParamWarning::new(
                    "note.square-summable",
                    format!("α = {alpha} ≤ 1/2: Σ t_k² diverges; t_k ↓ 0 and Σ t_k = ∞ still hold"),
                ));
            }
            Some(alpha)
        }
        _ => {
            out.push(ParamWarning::new(
                prefix,
                format!("{} stepsizes do not certify t_k ↓ 0 with Σ t_k = ∞", schedule.label()),
            ));
            None
        }
    }
}

/// Regime for the absolute-error method: `Σ t_k = ∞`, `t_k ↓ 0`,
/// `Σ t_k ε_k < ∞`, `limsup ε_k < 2` with `ε_k = ν δ_k`.
pub fn validate_irgd(schedule: &StepSchedule, nu: f64, errors: &crate::oracle::ErrorSchedule) -> Vec<ParamWarning> {
    use crate::oracle::ErrorSchedule;
    let mut out = Vec::new();
    let alpha = diminishing_regime("irgd.stepsize-regime", schedule, &mut out);
    match *errors {
        ErrorSchedule::PowerDecay { power } => {
            if let Some(alpha) = alpha {
                if nu > 0.0 && alpha + power <= 1.0 {
                    out.push(ParamWarning::new(
                        "irgd.error-summability",
                        format!("α + p = {} ≤ 1 makes Σ t_k ε_k infinite", alpha + power),
                    ));
                }
            }
        }
        ErrorSchedule::Constant(delta) => {
            let eps = nu * delta;
            if eps > 0.0 {
                out.push(ParamWarning::new(
                    "irgd.error-summability",
                    format!("constant ε = {eps} makes Σ t_k ε_k infinite"),
                ));
            }
            if eps >= 2.0 {
                out.push(ParamWarning::new(
                    "irgd.limsup-error",
                    format!("limsup ε_k = {eps} ≥ 2"),
                ));
            }
        }
    }
    out
}

/// Regime for the relative-error method: `ν ∈ [0, 1)`, `Σ t_k = ∞` and
/// `t_k ≤ (2 − 2ν − δ)/(L(1+ν)²)` eventually.
pub fn validate_irgdr(schedule: &StepSchedule, nu: f64, lipschitz: f64) -> Vec<ParamWarning> {
    let mut out = Vec::new();
    if !(0.0..1.0).contains(&nu) {
        out.push(ParamWarning::new(
            "irgdr.relative-error",
            format!("ν = {nu} outside [0, 1)"),
        ));
    }
    match *schedule {
        StepSchedule::Diminishing { alpha } => {
            if alpha > 1.0 {
                out.push(ParamWarning::new(
                    "irgdr.stepsize-regime",
                    format!("α = {alpha} > 1 makes Σ t_k finite"),
                ));
            }
        }
        StepSchedule::Constant(t) => {
            let cap = (2.0 - 2.0 * nu) / (lipschitz * (1.0 + nu) * (1.0 + nu));
            if t >= cap {
                out.push(ParamWarning::new(
                    "irgdr.stepsize-cap",
                    format!("t = {t} ≥ (2 − 2ν)/(L(1+ν)²) = {cap}: no δ > 0 satisfies the cap"),
                ));
            }
        }
        StepSchedule::CappedConstant { .. } => {}
        StepSchedule::Armijo(_) => out.push(ParamWarning::new(
            "irgdr.stepsize-regime",
            "line-search stepsizes are not covered by the stepsize cap",
        )),
    }
    out
}

/// Regime for RSAM: `Σ t_k = ∞`, `t_k ↓ 0`, `Σ t_k ρ_k < ∞`, `limsup ρ_k < 2/L`.
pub fn validate_rsam(schedule: &StepSchedule, rho: &crate::oracle::RhoSchedule, lipschitz: f64) -> Vec<ParamWarning> {
    use crate::oracle::RhoSchedule;
    let mut out = Vec::new();
    let alpha = diminishing_regime("rsam.stepsize-regime", schedule, &mut out);
    match *rho {
        RhoSchedule::Constant(r) => {
            if r > 0.0 {
                out.push(ParamWarning::new(
                    "rsam.radius-summability",
                    format!("constant ρ = {r} makes Σ t_k ρ_k infinite"),
                ));
            }
            if r >= 2.0 / lipschitz {
                out.push(ParamWarning::new(
                    "rsam.limsup-radius",
                    format!("limsup ρ_k = {r} ≥ 2/L = {}", 2.0 / lipschitz),
                ));
            }
        }
        RhoSchedule::PowerDecay { power, .. } => {
            if let Some(alpha) = alpha {
                if alpha + power <= 1.0 {
                    out.push(ParamWarning::new(
                        "rsam.radius-summability",
                        format!("α + q = {} ≤ 1 makes Σ t_k ρ_k infinite", alpha + power),
                    ));
                }
            }
        }
    }
    out
}

/// Regime for REG: `ρ_k ≤ ν/L` for some `ν ∈ [0, 1)`, plus the IRGDr stepsize
/// conditions.
pub fn validate_reg(
    schedule: &StepSchedule,
    rho: &crate::oracle::RhoSchedule,
    nu: f64,
    lipschitz: f64,
) -> Vec<ParamWarning> {
    let mut out = Vec::new();
    let r = rho.max_rho();
    if r > nu / lipschitz {
        out.push(ParamWarning::new(
            "reg.radius-cap",
            format!("ρ = {r} exceeds ν/L = {}", nu / lipschitz),
        ));
    }
    out.extend(validate_irgdr(schedule, nu, lipschitz).into_iter().map(|w| {
        ParamWarning::new(
            if w.code == "irgdr.relative-error" {
                "reg.relative-error"
            } else {
                w.code
            },
            w.message,
        )
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{ErrorSchedule, RhoSchedule};

    #[test]
    fn diminishing_is_one_based() {
        let s = StepSchedule::diminishing(0.5).unwrap();
        assert_eq!(s.fixed_step(0), Some(1.0));
        assert_eq!(s.fixed_step(3), Some(0.5));
    }

    #[test]
    fn capped_step_formula() {
        let s = StepSchedule::capped(0.5, 0.1, 6.0).unwrap();
        let t = s.fixed_step(7).unwrap();
        assert!((t - 0.9 / (6.0 * 2.25)).abs() < 1e-15);
        assert!(StepSchedule::capped(1.0, 0.1, 1.0).is_err());
        assert!(StepSchedule::capped(0.5, 1.5, 1.0).is_err());
    }

    #[test]
    fn stop_rule_validation() {
        assert!(StopRule::new(0.0, 10, None).is_err());
        assert!(StopRule::new(1e-6, 0, None).is_err());
        assert_eq!(StopRule::default().max_iters, 10_000);
    }

    #[test]
    fn benchmark_regimes_are_clean() {
        let errs = ErrorSchedule::power_decay(2.1).unwrap();
        let w = validate_irgd(&StepSchedule::diminishing(0.75).unwrap(), 1e-3, &errs);
        assert!(w.is_empty(), "{w:?}");
        // α = 0.1 still meets the regime; only the square-summability note fires
        let w = validate_irgd(&StepSchedule::diminishing(0.1).unwrap(), 1e-3, &errs);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].code, "note.square-summable");
    }

    #[test]
    fn regime_violations_are_named() {
        let w = validate_irgd(&StepSchedule::armijo(), 1e-3, &ErrorSchedule::constant(3.0).unwrap());
        let codes: Vec<_> = w.iter().map(|w| w.code).collect();
        assert!(codes.contains(&"irgd.stepsize-regime"));
        assert!(codes.contains(&"irgd.error-summability"));
        assert!(!codes.contains(&"irgd.limsup-error"));
        let w = validate_irgd(
            &StepSchedule::diminishing(0.5).unwrap(),
            1.0,
            &ErrorSchedule::constant(3.0).unwrap(),
        );
        assert!(w.iter().any(|w| w.code == "irgd.limsup-error"));

        let w = validate_rsam(
            &StepSchedule::diminishing(0.75).unwrap(),
            &RhoSchedule::Constant(1.0),
            6.0,
        );
        let codes: Vec<_> = w.iter().map(|w| w.code).collect();
        assert!(codes.contains(&"rsam.radius-summability"));
        assert!(codes.contains(&"rsam.limsup-radius"));
        let w = validate_rsam(
            &StepSchedule::diminishing(0.75).unwrap(),
            &RhoSchedule::PowerDecay { rho0: 0.1, power: 1.5 },
            6.0,
        );
        assert!(w.is_empty());

        let w = validate_reg(
            &StepSchedule::diminishing(0.75).unwrap(),
            &RhoSchedule::Constant(0.5),
            0.5,
            6.0,
        );
        assert!(w.iter().any(|w| w.code == "reg.radius-cap"));
        let w = validate_reg(
            &StepSchedule::diminishing(0.75).unwrap(),
            &RhoSchedule::Constant(0.05),
            0.5,
            6.0,
        );
        assert!(w.is_empty());

        let w = validate_irgdr(&StepSchedule::constant(1.0).unwrap(), 0.5, 6.0);
        assert!(w.iter().any(|w| w.code == "irgdr.stepsize-cap"));
    }
}

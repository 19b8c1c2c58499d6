//! Empirical convergence-rate fits on gradient-norm traces.
//!
//! Two models are fitted by least squares after a burn-in:
//!
//! * linear: `log r_k = a + k log Q`, reporting `Q`;
//! * power law: `log r_k = a + s log k`, reporting the exponent `s`.
//!
//! The model with the larger R² is preferred.

use std::fmt;

use riemann_inexact::solver::IterRecord;
use serde::Serialize;

/// Points needed after burn-in for a conclusive report.
pub const MIN_POINTS: usize = 50;
/// Burn-in runs through the last record whose gradient norm exceeds this
/// fraction of the largest one, so a dip and re-escape near a saddle is
/// discarded with the rest of the transient.
pub const BURN_IN_LEVEL: f64 = 1e-1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub q: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RateModel {
    Linear,
    Power,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RateReport {
    Fitted {
        points: usize,
        linear: LinearFit,
        power: PowerFit,
        preferred: RateModel,
    },
    Inconclusive {
        points: usize,
        reason: String,
    },
}

impl RateReport {
    pub fn preferred(&self) -> Option<RateModel> {
        match self {
            RateReport::Fitted { preferred, .. } => Some(*preferred),
            RateReport::Inconclusive { .. } => None,
        }
    }

    pub fn linear(&self) -> Option<LinearFit> {
        match self {
            RateReport::Fitted { linear, .. } => Some(*linear),
            RateReport::Inconclusive { .. } => None,
        }
    }

    pub fn power(&self) -> Option<PowerFit> {
        match self {
            RateReport::Fitted { power, .. } => Some(*power),
            RateReport::Inconclusive { .. } => None,
        }
    }
}

impl fmt::Display for RateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateReport::Fitted {
                points,
                linear,
                power,
                preferred,
            } => {
                writeln!(f, "points: {points}")?;
                writeln!(f, "linear: Q = {:.6}, R^2 = {:.6}", linear.q, linear.r2)?;
                writeln!(f, "power:  exponent = {:.6}, R^2 = {:.6}", power.exponent, power.r2)?;
                write!(
                    f,
                    "preferred: {}",
                    match preferred {
                        RateModel::Linear => "linear",
                        RateModel::Power => "power",
                    }
                )
            }
            RateReport::Inconclusive { points, reason } => write!(f, "inconclusive ({points} points): {reason}"),
        }
    }
}

/// Slope, intercept and R² of an ordinary least-squares line.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        let sse: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let e = y - (intercept + slope * x);
                e * e
            })
            .sum();
        1.0 - sse / syy
    };
    (slope, intercept, r2)
}

/// Fits both models to `(k, ‖grad f(x_k)‖)` pairs.
pub fn fit_rate_points(points: &[(usize, f64)]) -> RateReport {
    let usable: Vec<(usize, f64)> = points
        .iter()
        .copied()
        .filter(|(k, r)| *k >= 1 && *r > 0.0 && r.is_finite())
        .collect();
    let peak = usable.iter().map(|p| p.1).fold(0.0, f64::max);
    let start = usable
        .iter()
        .rposition(|p| p.1 > BURN_IN_LEVEL * peak)
        .map_or(0, |i| i + 1);
    let tail = &usable[start..];
    if tail.len() < MIN_POINTS {
        return RateReport::Inconclusive {
            points: tail.len(),
            reason: format!("need at least {MIN_POINTS} points after burn-in"),
        };
    }
    let ks: Vec<f64> = tail.iter().map(|p| p.0 as f64).collect();
    let logk: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let logr: Vec<f64> = tail.iter().map(|p| p.1.ln()).collect();
    let (lin_slope, _, lin_r2) = least_squares(&ks, &logr);
    let (pow_slope, _, pow_r2) = least_squares(&logk, &logr);
    RateReport::Fitted {
        points: tail.len(),
        linear: LinearFit {
            q: lin_slope.exp(),
            r2: lin_r2,
        },
        power: PowerFit {
            exponent: pow_slope,
            r2: pow_r2,
        },
        preferred: if lin_r2 >= pow_r2 {
            RateModel::Linear
        } else {
            RateModel::Power
        },
    }
}

pub fn fit_rate(records: &[IterRecord]) -> RateReport {
    let pts: Vec<(usize, f64)> = records.iter().map(|r| (r.k, r.grad_norm)).collect();
    fit_rate_points(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_trace_recovers_q() {
        let pts: Vec<_> = (0..200).map(|k| (k, 0.9f64.powi(k as i32))).collect();
        let rep = fit_rate_points(&pts);
        let lin = rep.linear().unwrap();
        assert!((lin.q - 0.9).abs() < 1e-6, "{rep}");
        assert!(lin.r2 >= 0.999);
        assert_eq!(rep.preferred(), Some(RateModel::Linear));
    }

    #[test]
    fn power_trace_recovers_exponent() {
        let pts: Vec<_> = (1..400).map(|k| (k, (k as f64).powi(-2))).collect();
        let rep = fit_rate_points(&pts);
        assert!((rep.power().unwrap().exponent + 2.0).abs() < 1e-3, "{rep}");
        assert_eq!(rep.preferred(), Some(RateModel::Power));
    }

    #[test]
    fn saddle_dip_is_part_of_burn_in() {
        // dips two decades, climbs back, then decays geometrically
        let mut pts: Vec<_> = (0..10).map(|k| (k, 10f64.powf(-0.2 * k as f64))).collect();
        pts.extend((10..20).map(|k| (k, 10f64.powf(-2.0 + 0.15 * (k - 10) as f64))));
        pts.extend((20..120).map(|k| (k, 0.5 * 0.8f64.powi(k as i32 - 20))));
        let rep = fit_rate_points(&pts);
        let lin = rep.linear().unwrap();
        assert!((lin.q - 0.8).abs() < 1e-9, "{rep}");
        assert_eq!(rep.preferred(), Some(RateModel::Linear));
    }

    #[test]
    fn short_trace_is_inconclusive() {
        let pts: Vec<_> = (0..30).map(|k| (k, 0.5f64.powi(k as i32))).collect();
        assert!(matches!(fit_rate_points(&pts), RateReport::Inconclusive { .. }));
        assert!(matches!(
            fit_rate_points(&[]),
            RateReport::Inconclusive { points: 0, .. }
        ));
    }
}

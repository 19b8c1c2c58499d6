//! Experiment harness for the inexact Riemannian gradient methods in
//! `riemann_inexact`: config-driven grids, audits, rate fits and plots.

// `!(a >= b)` is deliberate: NaN has to fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod config;
pub mod experiment;
pub mod fixtures;
pub mod plot;
pub mod rate;
pub mod trace_io;

/// Environment variable naming the default output root.
pub const OUT_DIR_ENV: &str = "IRGD_OUT_DIR";

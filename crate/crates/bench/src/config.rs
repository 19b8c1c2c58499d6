//! Experiment configuration.
//!
//! A config is a TOML file with four sections:
//!
//! ```toml
//! [problem]
//! kind = "pca"                 # mc | pca | sphere | mnist
//! sizes = [[20, 10], [100, 50]] # mc: [m, n, k]; pca: [n, p]; sphere: [n]; mnist: [p]
//! seeds = [0, 1, 2]
//!
//! [solver]
//! algorithms = ["rgd", "reg"]  # rgd | irgd | irgdr | rsam | reg
//! schedules = ["diminishing"]  # diminishing | constant | armijo | capped
//! alpha = 0.75
//! rho = [1e-8, 1e-5, 1e-3]
//!
//! [stop]
//! grad_tol = 1e-6
//! max_iters = 10000
//!
//! [output]
//! audit = false
//! timing = true
//! ```
//!
//! The grid is `sizes × algorithms × schedules × parameter × seeds`, where the
//! parameter axis is `nu` for `irgd`/`irgdr`, `rho` for `rsam`/`reg` and a
//! single empty slot for `rgd`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("empty grid axis: {0}")]
    EmptyAxis(&'static str),

    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Mc,
    Pca,
    Sphere,
    Mnist,
}

impl ProblemKind {
    pub fn label(self) -> &'static str {
        match self {
            ProblemKind::Mc => "mc",
            ProblemKind::Pca => "pca",
            ProblemKind::Sphere => "sphere",
            ProblemKind::Mnist => "mnist",
        }
    }

    fn size_arity(self) -> usize {
        match self {
            ProblemKind::Mc => 3,
            ProblemKind::Pca => 2,
            ProblemKind::Sphere | ProblemKind::Mnist => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rgd,
    Irgd,
    Irgdr,
    Rsam,
    Reg,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Rgd => "rgd",
            Algorithm::Irgd => "irgd",
            Algorithm::Irgdr => "irgdr",
            Algorithm::Rsam => "rsam",
            Algorithm::Reg => "reg",
        }
    }

    /// Name of the parameter axis this algorithm sweeps.
    pub fn param_name(self) -> Option<&'static str> {
        match self {
            Algorithm::Rgd => None,
            Algorithm::Irgd | Algorithm::Irgdr => Some("nu"),
            Algorithm::Rsam | Algorithm::Reg => Some("rho"),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label().to_uppercase())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Diminishing,
    Constant,
    Armijo,
    Capped,
}

impl ScheduleKind {
    pub fn label(self) -> &'static str {
        match self {
            ScheduleKind::Diminishing => "diminishing",
            ScheduleKind::Constant => "constant",
            ScheduleKind::Armijo => "armijo",
            ScheduleKind::Capped => "capped",
        }
    }

    /// Column label used in the summary tables.
    pub fn table_label(self) -> &'static str {
        match self {
            ScheduleKind::Armijo => "line search",
            other => other.label(),
        }
    }
}

fn default_mask_prob() -> f64 {
    0.5
}

fn default_samples() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    pub sizes: Vec<Vec<usize>>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_mask_prob")]
    pub mask_prob: f64,
    /// Sphere only: use `diag(diagonal)` instead of a random matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<Vec<f64>>,
    /// MNIST only: IDX image file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// MNIST only: images drawn (by seed) to form the covariance.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_noise_power() -> f64 {
    2.1
}

fn default_delta() -> f64 {
    0.1
}

fn default_reg_nu() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub algorithms: Vec<Algorithm>,
    pub schedules: Vec<ScheduleKind>,
    /// Diminishing exponent; defaults to 0.1 for MC and 0.75 otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Constant stepsize.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default)]
    pub nu: Vec<f64>,
    #[serde(default)]
    pub rho: Vec<f64>,
    /// `ρ_k = ρ / (k+1)^rho_decay`; 0 keeps `ρ` constant.
    #[serde(default)]
    pub rho_decay: f64,
    /// `p` in the noise schedule `δ_k = (k+1)^{-p}`.
    #[serde(default = "default_noise_power")]
    pub noise_power: f64,
    /// Overrides the problem's Lipschitz estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
    /// Descent margin for the capped stepsize.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Relative error REG certifies through `ρ ≤ ν/L`.
    #[serde(default = "default_reg_nu")]
    pub reg_nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopConfig {
    pub grad_tol: f64,
    pub max_iters: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_wall_seconds: Option<f64>,
}

impl Default for StopConfig {
    fn default() -> Self {
        StopConfig {
            grad_tol: 1e-6,
            max_iters: 10_000,
            max_wall_seconds: None,
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Where artifacts go; not part of the digest.
    #[serde(default, skip_serializing)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub audit: bool,
    /// Wall-clock columns; off makes every artifact byte-reproducible.
    #[serde(default = "default_true")]
    pub timing: bool,
    /// Worker threads for the grid; 0 uses all cores. Not part of the digest.
    #[serde(default, skip_serializing)]
    pub threads: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: None,
            audit: false,
            timing: true,
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub stop: StopConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// One cell of the expanded grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub index: usize,
    pub size: Vec<usize>,
    pub algorithm: Algorithm,
    pub schedule: ScheduleKind,
    /// `ν` or `ρ`, depending on the algorithm.
    pub param: Option<f64>,
    pub seed: u64,
}

impl RunSpec {
    pub fn size_label(&self) -> String {
        size_label(&self.size)
    }

    pub fn param_label(&self) -> String {
        self.param.map_or_else(|| "-".to_string(), |p| format!("{p:e}"))
    }
}

pub fn size_label(size: &[usize]) -> String {
    size.iter().map(ToString::to_string).collect::<Vec<_>>().join("x")
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn alpha(&self) -> f64 {
        self.solver.alpha.unwrap_or(match self.problem.kind {
            ProblemKind::Mc => 0.1,
            _ => 0.75,
        })
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        hex_digest(serde_json::to_string(self).expect("config serializes").as_bytes())
    }

    /// Digest of one run: the config digest plus the cell coordinates.
    pub fn run_digest(&self, spec: &RunSpec) -> String {
        let mut h = Sha256::new();
        h.update(self.digest().as_bytes());
        h.update(serde_json::to_string(spec).expect("spec serializes").as_bytes());
        hex(&h.finalize())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.problem;
        let s = &self.solver;
        if p.sizes.is_empty() {
            return Err(ConfigError::EmptyAxis("problem.sizes"));
        }
        if p.seeds.is_empty() {
            return Err(ConfigError::EmptyAxis("problem.seeds"));
        }
        if s.algorithms.is_empty() {
            return Err(ConfigError::EmptyAxis("solver.algorithms"));
        }
        if s.schedules.is_empty() {
            return Err(ConfigError::EmptyAxis("solver.schedules"));
        }
        if s.algorithms.iter().any(|a| a.param_name() == Some("nu")) && s.nu.is_empty() {
            return Err(ConfigError::EmptyAxis("solver.nu"));
        }
        if s.algorithms.iter().any(|a| a.param_name() == Some("rho")) && s.rho.is_empty() {
            return Err(ConfigError::EmptyAxis("solver.rho"));
        }

        for size in &p.sizes {
            if size.len() != p.kind.size_arity() {
                return Err(invalid(format!(
                    "{} sizes need {} entries, got {:?}",
                    p.kind.label(),
                    p.kind.size_arity(),
                    size
                )));
            }
            match p.kind {
                ProblemKind::Mc => {
                    let (m, n, k) = (size[0], size[1], size[2]);
                    if k == 0 || k > m.min(n) {
                        return Err(invalid(format!(
                            "mc rank must satisfy 1 <= k <= min(m, n), got {size:?}"
                        )));
                    }
                }
                ProblemKind::Pca => {
                    if size[1] == 0 || size[1] >= size[0] {
                        return Err(invalid(format!("pca needs 1 <= p < n, got {size:?}")));
                    }
                }
                ProblemKind::Sphere => {
                    if size[0] < 2 {
                        return Err(invalid(format!("sphere dimension must be >= 2, got {}", size[0])));
                    }
                    if let Some(d) = &p.diagonal {
                        if d.len() != size[0] {
                            return Err(invalid(format!(
                                "diagonal has {} entries but size is {}",
                                d.len(),
                                size[0]
                            )));
                        }
                    }
                }
                ProblemKind::Mnist => {
                    if size[0] == 0 {
                        return Err(invalid("mnist subspace dimension must be >= 1".into()));
                    }
                }
            }
        }
        if p.kind == ProblemKind::Mnist && p.path.is_none() {
            return Err(invalid("mnist problems need problem.path".into()));
        }
        if p.kind == ProblemKind::Mnist && p.samples == 0 {
            return Err(invalid("problem.samples must be >= 1".into()));
        }
        if !(p.mask_prob > 0.0 && p.mask_prob <= 1.0) {
            return Err(invalid(format!("mask_prob must lie in (0, 1], got {}", p.mask_prob)));
        }

        let alpha = self.alpha();
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be > 0, got {alpha}")));
        }
        if s.schedules.contains(&ScheduleKind::Constant) {
            match s.step {
                Some(t) if t > 0.0 && t.is_finite() => {}
                _ => return Err(invalid("constant schedule needs solver.step > 0".into())),
            }
        }
        if s.nu.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid(format!("nu values must be finite and >= 0, got {:?}", s.nu)));
        }
        if s.algorithms.contains(&Algorithm::Irgdr) && s.nu.iter().any(|v| *v >= 1.0) {
            return Err(invalid(format!("irgdr needs nu in [0, 1), got {:?}", s.nu)));
        }
        if s.rho.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid(format!("rho values must be finite and >= 0, got {:?}", s.rho)));
        }
        if !(s.rho_decay >= 0.0 && s.rho_decay.is_finite()) {
            return Err(invalid(format!("rho_decay must be >= 0, got {}", s.rho_decay)));
        }
        if !(s.noise_power >= 1.0 && s.noise_power.is_finite()) {
            return Err(invalid(format!("noise_power must be >= 1, got {}", s.noise_power)));
        }
        if let Some(l) = s.lipschitz {
            if !(l > 0.0 && l.is_finite()) {
                return Err(invalid(format!("lipschitz must be > 0, got {l}")));
            }
        }
        if !(0.0..1.0).contains(&s.reg_nu) {
            return Err(invalid(format!("reg_nu must lie in [0, 1), got {}", s.reg_nu)));
        }
        if s.schedules.contains(&ScheduleKind::Capped) {
            if !(s.delta > 0.0) {
                return Err(invalid(format!("delta must be > 0, got {}", s.delta)));
            }
            for a in &s.algorithms {
                for nu in self.relative_levels(*a) {
                    if !(2.0 - 2.0 * nu - s.delta > 0.0) {
                        return Err(invalid(format!(
                            "capped stepsize for {} is not positive: 2 − 2ν − δ = {}",
                            a.label(),
                            2.0 - 2.0 * nu - s.delta
                        )));
                    }
                }
            }
        }

        let st = &self.stop;
        if !(st.grad_tol > 0.0) {
            return Err(invalid(format!("grad_tol must be > 0, got {}", st.grad_tol)));
        }
        if st.max_iters == 0 {
            return Err(invalid("max_iters must be >= 1".into()));
        }
        if let Some(w) = st.max_wall_seconds {
            if !(w > 0.0) {
                return Err(invalid(format!("max_wall_seconds must be > 0, got {w}")));
            }
        }
        Ok(())
    }

    /// Relative-error levels the capped stepsize is built for.
    fn relative_levels(&self, a: Algorithm) -> Vec<f64> {
        match a {
            Algorithm::Irgdr => self.solver.nu.clone(),
            Algorithm::Reg => vec![self.solver.reg_nu],
            _ => vec![0.0],
        }
    }

    /// The grid in run-index order.
    pub fn expand(&self) -> Vec<RunSpec> {
        let mut out = Vec::new();
        for size in &self.problem.sizes {
            for &algorithm in &self.solver.algorithms {
                for &schedule in &self.solver.schedules {
                    let params: Vec<Option<f64>> = match algorithm.param_name() {
                        None => vec![None],
                        Some("nu") => self.solver.nu.iter().copied().map(Some).collect(),
                        Some(_) => self.solver.rho.iter().copied().map(Some).collect(),
                    };
                    for param in params {
                        for &seed in &self.problem.seeds {
                            out.push(RunSpec {
                                index: out.len(),
                                size: size.clone(),
                                algorithm,
                                schedule,
                                param,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

fn invalid(msg: String) -> ConfigError {
    ConfigError::Invalid(msg)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PCA: &str = r#"
[problem]
kind = "pca"
sizes = [[20, 10], [100, 50]]
seeds = [0, 1]

[solver]
algorithms = ["rgd", "reg"]
schedules = ["diminishing", "armijo"]
rho = [1e-8, 1e-5, 1e-3]
"#;

    #[test]
    fn parses_and_expands() {
        let cfg = ExperimentConfig::from_toml_str(PCA).unwrap();
        assert_eq!(cfg.alpha(), 0.75);
        assert_eq!(cfg.stop, StopConfig::default());
        let grid = cfg.expand();
        // 2 sizes × 2 schedules × (1 + 3) params × 2 seeds
        assert_eq!(grid.len(), 2 * 2 * 4 * 2);
        assert!(grid.iter().enumerate().all(|(i, s)| s.index == i));
        assert_eq!(grid[0].param_label(), "-");
        assert_eq!(grid[4].algorithm, Algorithm::Reg);
        assert_eq!(grid[4].param, Some(1e-8));
    }

    #[test]
    fn digests_are_stable() {
        let a = ExperimentConfig::from_toml_str(PCA).unwrap();
        let b = ExperimentConfig::from_toml_str(PCA).unwrap();
        assert_eq!(a.digest(), b.digest());
        let grid = a.expand();
        assert_ne!(a.run_digest(&grid[0]), a.run_digest(&grid[1]));
        let c = ExperimentConfig::from_toml_str(&PCA.replace("seeds = [0, 1]", "seeds = [0, 2]")).unwrap();
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn empty_axes_are_rejected() {
        for (from, to, axis) in [
            ("seeds = [0, 1]", "seeds = []", "problem.seeds"),
            ("sizes = [[20, 10], [100, 50]]", "sizes = []", "problem.sizes"),
            ("rho = [1e-8, 1e-5, 1e-3]", "rho = []", "solver.rho"),
            (r#"algorithms = ["rgd", "reg"]"#, "algorithms = []", "solver.algorithms"),
        ] {
            let err = ExperimentConfig::from_toml_str(&PCA.replace(from, to)).unwrap_err();
            assert!(matches!(err, ConfigError::EmptyAxis(a) if a == axis), "{err}");
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        for (from, to) in [
            ("sizes = [[20, 10], [100, 50]]", "sizes = [[20, 20]]"),
            ("sizes = [[20, 10], [100, 50]]", "sizes = [[20]]"),
            ("rho = [1e-8, 1e-5, 1e-3]", "rho = [-1.0]"),
            (r#"kind = "pca""#, r#"kind = "torus""#),
            ("[solver]", "[solver]\nbogus = 1"),
            (
                r#"schedules = ["diminishing", "armijo"]"#,
                r#"schedules = ["constant"]"#,
            ),
        ] {
            assert!(ExperimentConfig::from_toml_str(&PCA.replace(from, to)).is_err(), "{to}");
        }
    }

    #[test]
    fn mc_alpha_default() {
        let text = r#"
[problem]
kind = "mc"
sizes = [[20, 20, 8]]
seeds = [0]
[solver]
algorithms = ["irgdr"]
schedules = ["capped"]
nu = [0.5]
"#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.alpha(), 0.1);
        let err = ExperimentConfig::from_toml_str(&text.replace("nu = [0.5]", "nu = [0.99]")).unwrap_err();
        assert!(err.to_string().contains("capped"));
    }
}

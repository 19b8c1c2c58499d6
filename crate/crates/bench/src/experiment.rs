//! Grid execution and artifact emission.
//!
//! Output layout under the run directory:
//!
//! ```text
//! traces/trace_NNNN.csv        one per run (plus .audit.csv when audited)
//! summary.csv                  one row per run
//! table.csv, table.txt         per-cell statistics over seeds
//! plots/plot_<size>_<schedule>.svg
//! manifest.json                digests, warnings, termination details
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rayon::prelude::*;
use riemann_inexact::idx::{load_mnist_idx, IdxError};
use riemann_inexact::linalg::gaussian_matrix;
use riemann_inexact::manifold::Manifold;
use riemann_inexact::oracle::{stream_rng, AdditiveNoise, ErrorSchedule, RelativeNoise, RhoSchedule};
use riemann_inexact::problems::{
    gen_mc_instance, gen_pca_instance, pca_instance_from_data, McProblem, PcaProblem, Problem, ProblemError,
    SphereRayleigh,
};
use riemann_inexact::solver::{
    run_irgd, run_irgdr, run_reg, run_rgd, run_rsam, RunOptions, StepSchedule, StopRule, Termination, Trace,
};
use serde::Serialize;
use thiserror::Error;

use crate::audit::DescentRule;
use crate::config::{size_label, Algorithm, ConfigError, ExperimentConfig, ProblemKind, RunSpec, ScheduleKind};
use crate::plot::{emit_plot, Series};
use crate::rate::{fit_rate, RateModel, RateReport};
use crate::trace_io::{audit_path, write_audit, write_bytes, write_trace, TraceIoError};

/// Oracle RNG streams start here; stream `ORACLE_STREAM + run index` keeps
/// every run independent of scheduling.
pub const ORACLE_STREAM: u64 = 1000;
/// Stream for the random initial point.
pub const START_STREAM: u64 = 1;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("dataset: {0}")]
    Data(#[from] IdxError),

    #[error(transparent)]
    Io(#[from] TraceIoError),

    #[error("cannot build thread pool: {0}")]
    Pool(String),
}

/// A problem instance of any supported kind.
pub enum Instance {
    Mc(McProblem),
    Pca(PcaProblem),
    Sphere(SphereRayleigh),
}

impl Instance {
    pub fn lipschitz(&self) -> f64 {
        match self {
            Instance::Mc(p) => p.lipschitz(),
            Instance::Pca(p) => p.lipschitz(),
            Instance::Sphere(p) => p.lipschitz(),
        }
    }

    pub fn digest(&self) -> String {
        match self {
            Instance::Mc(p) => p.instance().digest(),
            Instance::Pca(p) => p.instance().digest(),
            Instance::Sphere(p) => {
                crate::config::hex_digest(&p.matrix().iter().flat_map(|v| v.to_le_bytes()).collect::<Vec<u8>>())
            }
        }
    }
}

/// Builds the instance for one `(size, seed)` cell. `data` is the loaded
/// MNIST matrix for `mnist` problems.
pub fn build_instance(
    cfg: &ExperimentConfig,
    size: &[usize],
    seed: u64,
    data: Option<&DMatrix<f64>>,
) -> Result<Instance, ProblemError> {
    let p = &cfg.problem;
    Ok(match p.kind {
        ProblemKind::Mc => {
            let (inst, _) = gen_mc_instance(size[0], size[1], size[2], p.mask_prob, seed)?;
            Instance::Mc(McProblem::new(inst)?)
        }
        ProblemKind::Pca => {
            let (inst, _) = gen_pca_instance(size[0], size[1], seed)?;
            Instance::Pca(PcaProblem::new(inst)?)
        }
        ProblemKind::Sphere => match &p.diagonal {
            Some(d) => Instance::Sphere(SphereRayleigh::from_diagonal(d)?),
            None => {
                let n = size[0];
                let a = gaussian_matrix(n, n, &mut stream_rng(seed, 0));
                let h = &a * a.transpose() / n as f64;
                Instance::Sphere(SphereRayleigh::new((&h + h.transpose()) * 0.5)?)
            }
        },
        ProblemKind::Mnist => {
            let data = data.ok_or_else(|| ProblemError::InvalidParameter("mnist data not loaded".into()))?;
            Instance::Pca(PcaProblem::new(pca_instance_from_data(
                data, size[0], p.samples, seed,
            )?)?)
        }
    })
}

/// The descent inequality the audit applies to a run.
pub fn descent_rule(cfg: &ExperimentConfig, spec: &RunSpec, lipschitz: f64) -> DescentRule {
    match (spec.algorithm, spec.schedule) {
        (Algorithm::Irgdr | Algorithm::Reg, ScheduleKind::Capped) => DescentRule::Relative {
            delta: cfg.solver.delta,
        },
        _ => DescentRule::Absolute { lipschitz },
    }
}

fn relative_level(cfg: &ExperimentConfig, spec: &RunSpec) -> f64 {
    match spec.algorithm {
        Algorithm::Irgdr => spec.param.unwrap_or(0.0),
        Algorithm::Reg => cfg.solver.reg_nu,
        _ => 0.0,
    }
}

fn solve<P: Problem>(problem: &P, lipschitz: f64, cfg: &ExperimentConfig, spec: &RunSpec) -> Result<Trace, String> {
    let s = &cfg.solver;
    let schedule = match spec.schedule {
        ScheduleKind::Diminishing => StepSchedule::diminishing(cfg.alpha()),
        ScheduleKind::Constant => StepSchedule::constant(s.step.unwrap_or(0.0)),
        ScheduleKind::Armijo => Ok(StepSchedule::armijo()),
        ScheduleKind::Capped => StepSchedule::capped(relative_level(cfg, spec), s.delta, lipschitz),
    }
    .map_err(|e| e.to_string())?;
    let stop =
        StopRule::new(cfg.stop.grad_tol, cfg.stop.max_iters, cfg.stop.max_wall_seconds).map_err(|e| e.to_string())?;
    let opts = RunOptions {
        audit: cfg.output.audit,
        timing: cfg.output.timing,
    };
    let x0 = problem
        .manifold()
        .random_point(&mut stream_rng(spec.seed, START_STREAM));
    let rng = stream_rng(spec.seed, ORACLE_STREAM + spec.index as u64);
    let param = spec.param.unwrap_or(0.0);
    let rho = if s.rho_decay > 0.0 {
        RhoSchedule::PowerDecay {
            rho0: param,
            power: s.rho_decay,
        }
    } else {
        RhoSchedule::Constant(param)
    };

    let result = match spec.algorithm {
        Algorithm::Rgd => run_rgd(problem, x0, &schedule, &stop, opts),
        Algorithm::Irgd => {
            let errors = ErrorSchedule::power_decay(s.noise_power).map_err(|e| e.to_string())?;
            let oracle = AdditiveNoise::new(param, errors, rng).map_err(|e| e.to_string())?;
            run_irgd(problem, x0, oracle, &schedule, &stop, opts)
        }
        Algorithm::Irgdr => {
            let mut oracle = RelativeNoise::new(param, rng).map_err(|e| e.to_string())?;
            run_irgdr(problem, x0, &mut oracle, param, &schedule, &stop, opts).map_err(|e| e.to_string())?
        }
        Algorithm::Rsam => run_rsam(problem, x0, rho, lipschitz, &schedule, &stop, opts),
        Algorithm::Reg => {
            run_reg(problem, x0, rho, s.reg_nu, lipschitz, &schedule, &stop, opts).map_err(|e| e.to_string())?
        }
    };
    Ok(result.trace)
}

/// Outcome of one grid cell.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub spec: RunSpec,
    pub digest: String,
    pub dataset_digest: Option<String>,
    pub lipschitz: Option<f64>,
    /// `Err` when the run could not start (bad instance or parameters).
    pub outcome: Result<Trace, String>,
}

impl RunRecord {
    pub fn trace(&self) -> Option<&Trace> {
        self.outcome.as_ref().ok()
    }

    pub fn iterations(&self) -> Option<usize> {
        self.trace().map(Trace::iterations)
    }

    pub fn rate(&self) -> RateReport {
        match self.trace() {
            Some(t) => fit_rate(&t.records),
            None => RateReport::Inconclusive {
                points: 0,
                reason: "run did not start".into(),
            },
        }
    }
}

pub fn run_one(cfg: &ExperimentConfig, spec: &RunSpec, data: Option<&DMatrix<f64>>) -> RunRecord {
    let digest = cfg.run_digest(spec);
    let instance = match build_instance(cfg, &spec.size, spec.seed, data) {
        Ok(i) => i,
        Err(e) => {
            return RunRecord {
                spec: spec.clone(),
                digest,
                dataset_digest: None,
                lipschitz: None,
                outcome: Err(e.to_string()),
            }
        }
    };
    let lipschitz = cfg.solver.lipschitz.unwrap_or_else(|| instance.lipschitz());
    let outcome = match &instance {
        Instance::Mc(p) => solve(p, lipschitz, cfg, spec),
        Instance::Pca(p) => solve(p, lipschitz, cfg, spec),
        Instance::Sphere(p) => solve(p, lipschitz, cfg, spec),
    };
    RunRecord {
        spec: spec.clone(),
        digest,
        dataset_digest: Some(instance.digest()),
        lipschitz: Some(lipschitz),
        outcome,
    }
}

/// Loads the MNIST matrix when the config needs it.
pub fn load_data(cfg: &ExperimentConfig) -> Result<Option<(DMatrix<f64>, String)>, ExperimentError> {
    match (&cfg.problem.kind, &cfg.problem.path) {
        (ProblemKind::Mnist, Some(path)) => {
            let (m, manifest) = load_mnist_idx(path)?;
            Ok(Some((m, manifest.digest)))
        }
        _ => Ok(None),
    }
}

/// Runs the whole grid on `threads` workers (0 = all cores). Results are in
/// run-index order regardless of scheduling.
pub fn run_grid(
    cfg: &ExperimentConfig,
    data: Option<&DMatrix<f64>>,
    threads: usize,
) -> Result<Vec<RunRecord>, ExperimentError> {
    let specs = cfg.expand();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    Ok(pool.install(|| specs.par_iter().map(|s| run_one(cfg, s, data)).collect()))
}

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    run: usize,
    digest: &'a str,
    problem: &'a str,
    size: String,
    algorithm: &'a str,
    schedule: &'a str,
    param: String,
    seed: u64,
    iterations: Option<usize>,
    termination: &'a str,
    wall_s: Option<f64>,
    final_f: Option<f64>,
    final_gradnorm: Option<f64>,
    rate_model: Option<&'static str>,
    rate_q: Option<f64>,
    rate_exponent: Option<f64>,
    rate_r2: Option<f64>,
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub fn summary_csv(cfg: &ExperimentConfig, runs: &[RunRecord]) -> Vec<u8> {
    let mut w = csv_writer();
    for r in runs {
        let rate = r.rate();
        let last = r.trace().and_then(Trace::final_record);
        let r2 = match &rate {
            RateReport::Fitted {
                linear,
                power,
                preferred,
                ..
            } => Some(match preferred {
                RateModel::Linear => linear.r2,
                RateModel::Power => power.r2,
            }),
            RateReport::Inconclusive { .. } => None,
        };
        w.serialize(SummaryRow {
            run: r.spec.index,
            digest: &r.digest,
            problem: cfg.problem.kind.label(),
            size: r.spec.size_label(),
            algorithm: r.spec.algorithm.label(),
            schedule: r.spec.schedule.label(),
            param: r.spec.param_label(),
            seed: r.spec.seed,
            iterations: r.iterations(),
            termination: r.trace().map_or("not_started", |t| t.termination.label()),
            wall_s: r.trace().map(Trace::final_wall_s),
            final_f: last.map(|l| l.f),
            final_gradnorm: last.map(|l| l.grad_norm),
            rate_model: Some(match rate.preferred() {
                Some(RateModel::Linear) => "linear",
                Some(RateModel::Power) => "power",
                None => "inconclusive",
            }),
            rate_q: rate.linear().map(|l| l.q),
            rate_exponent: rate.power().map(|p| p.exponent),
            rate_r2: r2,
        })
        .expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

/// Iteration statistics over the seeds of one table cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStats {
    pub size: String,
    pub algorithm: String,
    pub param: String,
    pub schedule: String,
    pub runs: usize,
    pub converged: usize,
    pub iter_median: f64,
    pub iter_mean: f64,
    pub iter_std: f64,
    pub time_mean: f64,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Groups runs by `(size, algorithm, param, schedule)` in grid order.
pub fn cell_stats(runs: &[RunRecord]) -> Vec<CellStats> {
    let mut order: Vec<(String, String, String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String, String, String), Vec<&RunRecord>> = BTreeMap::new();
    for r in runs {
        let key = (
            r.spec.size_label(),
            r.spec.algorithm.label().to_string(),
            r.spec.param_label(),
            r.spec.schedule.label().to_string(),
        );
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let members = &groups[&key];
            let iters: Vec<f64> = members
                .iter()
                .filter_map(|r| r.iterations())
                .map(|i| i as f64)
                .collect();
            let times: Vec<f64> = members
                .iter()
                .filter_map(|r| r.trace())
                .map(Trace::final_wall_s)
                .collect();
            let (iter_mean, iter_std) = mean_std(&iters);
            CellStats {
                size: key.0,
                algorithm: key.1,
                param: key.2,
                schedule: key.3,
                runs: members.len(),
                converged: members
                    .iter()
                    .filter(|r| r.trace().is_some_and(Trace::converged))
                    .count(),
                iter_median: median(&iters),
                iter_mean,
                iter_std,
                time_mean: mean_std(&times).0,
            }
        })
        .collect()
}

pub fn table_csv(stats: &[CellStats]) -> Vec<u8> {
    let mut w = csv_writer();
    for s in stats {
        w.serialize(s).expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

/// Text table: one block per size, one row per solver and parameter, one
/// column group per stepsize schedule.
pub fn table_text(cfg: &ExperimentConfig, stats: &[CellStats]) -> String {
    let schedules: Vec<ScheduleKind> = cfg.solver.schedules.clone();
    let mut out = format!(
        "problem: {}  alpha: {}  grad_tol: {:e}  max_iters: {}\n",
        cfg.problem.kind.label(),
        cfg.alpha(),
        cfg.stop.grad_tol,
        cfg.stop.max_iters
    );
    let mut sizes: Vec<String> = Vec::new();
    for s in stats {
        if !sizes.contains(&s.size) {
            sizes.push(s.size.clone());
        }
    }
    for size in sizes {
        out.push_str(&format!("\nsize {size}\n"));
        let mut head = format!("{:<8} {:<8}", "solver", "param");
        for sch in &schedules {
            head.push_str(&format!(" | {:^31}", sch.table_label()));
        }
        out.push_str(&head);
        out.push('\n');
        let mut sub = format!("{:<8} {:<8}", "", "");
        for _ in &schedules {
            sub.push_str(&format!(" | {:>9} {:>9} {:>11}", "Iter", "std", "Time"));
        }
        out.push_str(&sub);
        out.push('\n');

        let mut rows: Vec<(String, String)> = Vec::new();
        for s in stats.iter().filter(|s| s.size == size) {
            let key = (s.algorithm.clone(), s.param.clone());
            if !rows.contains(&key) {
                rows.push(key);
            }
        }
        for (alg, param) in rows {
            let mut line = format!("{:<8} {:<8}", alg.to_uppercase(), param);
            for sch in &schedules {
                match stats
                    .iter()
                    .find(|s| s.size == size && s.algorithm == alg && s.param == param && s.schedule == sch.label())
                {
                    Some(s) => line.push_str(&format!(
                        " | {:>9.1} {:>9.1} {:>11.4}",
                        s.iter_median, s.iter_std, s.time_mean
                    )),
                    None => line.push_str(&format!(" | {:>31}", "-")),
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
    }
    out.push_str("\nIter: median over seeds; std: sample standard deviation; Time: mean seconds.\n");
    out
}

fn series_label(spec: &RunSpec) -> String {
    match (spec.algorithm.param_name(), spec.param) {
        (Some(name), Some(p)) => format!("{} {name}={p:e}", spec.algorithm),
        _ => spec.algorithm.to_string(),
    }
}

/// Plot file name and series for each `(size, schedule)` pair, using the
/// first seed.
pub fn plot_groups(cfg: &ExperimentConfig, runs: &[RunRecord]) -> Vec<(String, String, Vec<Series>)> {
    let first_seed = cfg.problem.seeds[0];
    let mut out = Vec::new();
    for size in &cfg.problem.sizes {
        for sch in &cfg.solver.schedules {
            let series: Vec<Series> = runs
                .iter()
                .filter(|r| &r.spec.size == size && r.spec.schedule == *sch && r.spec.seed == first_seed)
                .filter_map(|r| {
                    r.trace()
                        .map(|t| Series::from_records(series_label(&r.spec), &t.records))
                })
                .collect();
            if series.is_empty() {
                continue;
            }
            let name = format!("plot_{}_{}.svg", size_label(size), sch.label());
            let title = format!(
                "{} {} ({}), seed {first_seed}",
                cfg.problem.kind.label(),
                size_label(size),
                sch.table_label()
            );
            out.push((name, title, series));
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct ManifestRun<'a> {
    run: usize,
    digest: &'a str,
    size: String,
    algorithm: &'a str,
    schedule: &'a str,
    param: Option<f64>,
    seed: u64,
    lipschitz: Option<f64>,
    dataset_digest: Option<&'a str>,
    termination: String,
    warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    config_digest: String,
    config: &'a ExperimentConfig,
    dataset_digest: Option<&'a str>,
    runs: Vec<ManifestRun<'a>>,
    warning_count: usize,
}

pub fn manifest_json(cfg: &ExperimentConfig, runs: &[RunRecord], dataset: Option<&str>) -> String {
    let list: Vec<ManifestRun> = runs
        .iter()
        .map(|r| ManifestRun {
            run: r.spec.index,
            digest: &r.digest,
            size: r.spec.size_label(),
            algorithm: r.spec.algorithm.label(),
            schedule: r.spec.schedule.label(),
            param: r.spec.param,
            seed: r.spec.seed,
            lipschitz: r.lipschitz,
            dataset_digest: r.dataset_digest.as_deref(),
            termination: match &r.outcome {
                Ok(t) => t.termination.to_string(),
                Err(e) => format!("not_started ({e})"),
            },
            warnings: r.trace().map(|t| t.warnings.clone()).unwrap_or_default(),
        })
        .collect();
    let warning_count = list.iter().map(|r| r.warnings.len()).sum();
    let m = Manifest {
        config_digest: cfg.digest(),
        config: cfg,
        dataset_digest: dataset,
        runs: list,
        warning_count,
    };
    let mut s = serde_json::to_string_pretty(&m).expect("manifest serializes");
    s.push('\n');
    s
}

pub fn trace_file_name(index: usize) -> String {
    format!("trace_{index:04}.csv")
}

/// Recovers the run index from a `trace_NNNN.csv` path.
pub fn run_index_from_path(path: &Path) -> Option<usize> {
    path.file_name()?
        .to_str()?
        .strip_prefix("trace_")?
        .strip_suffix(".csv")?
        .parse()
        .ok()
}

/// Everything a finished experiment produced.
#[derive(Debug)]
pub struct ExperimentReport {
    pub out_dir: PathBuf,
    pub runs: Vec<RunRecord>,
    pub stats: Vec<CellStats>,
}

impl ExperimentReport {
    pub fn failed_runs(&self) -> usize {
        self.runs
            .iter()
            .filter(|r| match &r.outcome {
                Ok(t) => matches!(t.termination, Termination::SingularityError(_)),
                Err(_) => true,
            })
            .count()
    }
}

/// Runs the grid and writes every artifact under `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let data = load_data(cfg)?;
    let runs = run_grid(cfg, data.as_ref().map(|d| &d.0), cfg.output.threads)?;
    write_artifacts(cfg, &runs, data.as_ref().map(|d| d.1.as_str()), out_dir)?;
    let stats = cell_stats(&runs);
    Ok(ExperimentReport {
        out_dir: out_dir.to_path_buf(),
        runs,
        stats,
    })
}

pub fn write_artifacts(
    cfg: &ExperimentConfig,
    runs: &[RunRecord],
    dataset: Option<&str>,
    out_dir: &Path,
) -> Result<(), TraceIoError> {
    let traces = out_dir.join("traces");
    for r in runs {
        if let Some(t) = r.trace() {
            let path = traces.join(trace_file_name(r.spec.index));
            write_trace(&path, &t.records)?;
            if let Some(a) = &t.audit {
                write_audit(&audit_path(&path), a)?;
            }
        }
    }
    write_bytes(&out_dir.join("summary.csv"), &summary_csv(cfg, runs))?;
    let stats = cell_stats(runs);
    write_bytes(&out_dir.join("table.csv"), &table_csv(&stats))?;
    write_bytes(&out_dir.join("table.txt"), table_text(cfg, &stats).as_bytes())?;
    for (name, title, series) in plot_groups(cfg, runs) {
        emit_plot(&out_dir.join("plots").join(name), &title, &series)?;
    }
    write_bytes(
        &out_dir.join("manifest.json"),
        manifest_json(cfg, runs, dataset).as_bytes(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_cfg() -> ExperimentConfig {
        ExperimentConfig::from_toml_str(
            r#"
[problem]
kind = "sphere"
sizes = [[3]]
seeds = [0, 1]
diagonal = [3.0, 1.0, 1.0]

[solver]
algorithms = ["rgd", "irgdr"]
schedules = ["capped"]
nu = [0.3]

[output]
timing = false
"#,
        )
        .unwrap()
    }

    #[test]
    fn median_and_spread() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn grid_runs_and_converges() {
        let cfg = sphere_cfg();
        let runs = run_grid(&cfg, None, 1).unwrap();
        assert_eq!(runs.len(), 4);
        for r in &runs {
            let t = r.trace().unwrap();
            assert_eq!(t.termination, Termination::GradTol, "{:?}", r.spec);
            assert!((t.final_record().unwrap().f + 3.0).abs() < 1e-6);
        }
        let stats = cell_stats(&runs);
        assert_eq!(stats.len(), 2);
        assert_eq!(stats[0].runs, 2);
        let text = table_text(&cfg, &stats);
        assert!(text.contains("IRGDR"));
        assert!(text.contains("capped"));
    }

    #[test]
    fn oracle_streams_differ_per_run() {
        let cfg = sphere_cfg();
        let runs = run_grid(&cfg, None, 1).unwrap();
        let a = runs[2].trace().unwrap();
        let b = runs[3].trace().unwrap();
        assert_ne!(a.records[1].f, b.records[1].f);
    }

    #[test]
    fn run_index_parsing() {
        assert_eq!(run_index_from_path(Path::new("x/traces/trace_0012.csv")), Some(12));
        assert_eq!(run_index_from_path(Path::new("x/trace_12.audit.csv")), None);
        assert_eq!(run_index_from_path(Path::new("other.csv")), None);
    }

    #[test]
    fn bad_instance_is_recorded_not_fatal() {
        let mut cfg = sphere_cfg();
        cfg.problem.kind = ProblemKind::Mc;
        cfg.problem.sizes = vec![vec![2, 2, 3]];
        let runs = run_grid(&cfg, None, 1).unwrap();
        assert!(runs.iter().all(|r| r.outcome.is_err()));
        let csv = String::from_utf8(summary_csv(&cfg, &runs)).unwrap();
        assert!(csv.contains("not_started"));
    }
}

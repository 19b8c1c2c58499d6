use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use irgd_bench::audit::{audit_report, AuditError};
use irgd_bench::config::{ConfigError, ExperimentConfig};
use irgd_bench::experiment::{
    build_instance, descent_rule, load_data, run_experiment, run_index_from_path, ExperimentError,
};
use irgd_bench::fixtures::gen_fixtures;
use irgd_bench::plot::{emit_plot, Series};
use irgd_bench::rate::fit_rate;
use irgd_bench::trace_io::{audit_path, read_audit, read_trace, TraceIoError};
use irgd_bench::OUT_DIR_ENV;

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_IO: u8 = 3;

/// Benchmarks for inexact Riemannian gradient methods.
#[derive(Parser)]
#[command(name = "irgd-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every cell of a config grid and write its artifacts.
    Run {
        config: PathBuf,
        /// Output directory [default: output.dir, else $IRGD_OUT_DIR/<config stem>, else irgd-out/<config stem>]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; overrides output.threads (0 = all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check an audited trace against the descent and error-bound inequalities.
    Audit {
        trace: PathBuf,
        config: PathBuf,
        /// Run index within the grid [default: parsed from trace_NNNN.csv].
        #[arg(long)]
        run: Option<usize>,
    },
    /// Fit linear and power-law rate models to a trace.
    Rate { trace: PathBuf },
    /// Overlay gradient-norm traces in one SVG.
    Plot {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "gradient norm")]
        title: String,
    },
    /// Write the IDX test fixtures and golden artifacts.
    GenFixtures {
        /// Destination; gets fixtures/ and golden/ [default: $IRGD_OUT_DIR, else irgd-out]
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = if matches!(e, ConfigError::Io { .. }) {
            EXIT_IO
        } else {
            EXIT_CONFIG
        };
        Failure::new(code, e)
    }
}

impl From<TraceIoError> for Failure {
    fn from(e: TraceIoError) -> Self {
        let code = match e {
            TraceIoError::Io { .. } => EXIT_IO,
            TraceIoError::Format(_) => EXIT_RUNTIME,
        };
        Failure::new(code, e)
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(c) => c.into(),
            ExperimentError::Io(t) => t.into(),
            ExperimentError::Data(ref d) if matches!(d, riemann_inexact::idx::IdxError::Io { .. }) => {
                Failure::new(EXIT_IO, e)
            }
            other => Failure::new(EXIT_RUNTIME, other),
        }
    }
}

fn default_root() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("irgd-out"), PathBuf::from)
}

fn cmd_run(config: &Path, out: Option<PathBuf>, threads: Option<usize>) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(t) = threads {
        cfg.output.threads = t;
    }
    let out = out.or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| {
        let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
        default_root().join(stem)
    });
    let report = run_experiment(&cfg, &out)?;
    print!("{}", std::fs::read_to_string(out.join("table.txt")).unwrap_or_default());
    println!(
        "{} runs, {} failed; artifacts in {}",
        report.runs.len(),
        report.failed_runs(),
        out.display()
    );
    Ok(())
}

fn cmd_audit(trace: &Path, config: &Path, run: Option<usize>) -> Result<(), Failure> {
    let cfg = ExperimentConfig::load(config)?;
    let index = run
        .or_else(|| run_index_from_path(trace))
        .ok_or_else(|| Failure::new(EXIT_CONFIG, "cannot tell the run index from the file name; pass --run"))?;
    let specs = cfg.expand();
    let spec = specs.get(index).ok_or_else(|| {
        Failure::new(
            EXIT_CONFIG,
            format!("run {index} is outside the grid ({} runs)", specs.len()),
        )
    })?;
    let records = read_trace(trace)?;
    let sidecar = audit_path(trace);
    let audit = if sidecar.exists() {
        Some(read_audit(&sidecar)?)
    } else {
        None
    };

    let data = load_data(&cfg)?;
    let instance = build_instance(&cfg, &spec.size, spec.seed, data.as_ref().map(|d| &d.0))
        .map_err(|e| Failure::new(EXIT_RUNTIME, e))?;
    let lipschitz = cfg.solver.lipschitz.unwrap_or_else(|| instance.lipschitz());
    let rule = descent_rule(&cfg, spec, lipschitz);

    match audit_report(&records, audit.as_deref(), rule) {
        Ok(found) => {
            println!(
                "run {index}: {} {} {} seed {}",
                spec.algorithm,
                spec.schedule.label(),
                spec.param_label(),
                spec.seed
            );
            println!("{found}");
            if found.pass() {
                Ok(())
            } else {
                Err(Failure::new(
                    EXIT_RUNTIME,
                    format!("{} violations", found.violation_count()),
                ))
            }
        }
        Err(e @ AuditError::Unavailable) | Err(e @ AuditError::Misaligned(_)) => Err(Failure::new(EXIT_RUNTIME, e)),
    }
}

fn cmd_rate(trace: &Path) -> Result<(), Failure> {
    let records = read_trace(trace)?;
    println!("{}", fit_rate(&records));
    Ok(())
}

fn cmd_plot(traces: &[PathBuf], out: &Path, title: &str) -> Result<(), Failure> {
    let mut series = Vec::with_capacity(traces.len());
    for path in traces {
        let records = read_trace(path)?;
        let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
        series.push(Series::from_records(label, &records));
    }
    emit_plot(out, title, &series)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, threads } => cmd_run(&config, out, threads),
        Command::Audit { trace, config, run } => cmd_audit(&trace, &config, run),
        Command::Rate { trace } => cmd_rate(&trace),
        Command::Plot { traces, out, title } => cmd_plot(&traces, &out, &title),
        Command::GenFixtures { out } => gen_fixtures(&out.unwrap_or_else(default_root)).map_err(Failure::from),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("irgd-bench: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

//! Trace CSV files.
//!
//! A trace file has the header `k,t,f,gradnorm,errbound,evals,wall_s` and one
//! row per iterate. An audited run also writes `<stem>.audit.csv` with the
//! exact gradient norm, oracle output norm and observed error per iterate.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use riemann_inexact::oracle::ErrorBound;
use riemann_inexact::solver::{AuditRecord, IterRecord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TRACE_HEADER: [&str; 7] = ["k", "t", "f", "gradnorm", "errbound", "evals", "wall_s"];
pub const AUDIT_HEADER: [&str; 6] = ["k", "gradnorm", "gnorm", "gerr", "bound_kind", "bound_value"];

#[derive(Debug, Error)]
pub enum TraceIoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed trace: {0}")]
    Format(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceRow {
    k: usize,
    t: f64,
    f: f64,
    gradnorm: f64,
    errbound: f64,
    evals: usize,
    wall_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct AuditRow {
    k: usize,
    gradnorm: f64,
    gnorm: f64,
    gerr: f64,
    bound_kind: String,
    bound_value: f64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> TraceIoError + '_ {
    move |source| TraceIoError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn format_err(e: csv::Error) -> TraceIoError {
    TraceIoError::Format(e.to_string())
}

pub fn trace_csv_bytes(records: &[IterRecord]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(TRACE_HEADER).expect("write to memory");
    for r in records {
        w.serialize(TraceRow {
            k: r.k,
            t: r.t,
            f: r.f,
            gradnorm: r.grad_norm,
            errbound: r.err_bound,
            evals: r.evals,
            wall_s: r.wall_s,
        })
        .expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

/// Parses trace CSV bytes. Rows must be in strictly increasing `k`.
pub fn parse_trace_csv(bytes: &[u8]) -> Result<Vec<IterRecord>, TraceIoError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header = rdr.headers().map_err(format_err)?.clone();
    if header.iter().ne(TRACE_HEADER.iter().copied()) {
        return Err(TraceIoError::Format(format!(
            "expected header {}, found {}",
            TRACE_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out: Vec<IterRecord> = Vec::new();
    for (line, row) in rdr.deserialize::<TraceRow>().enumerate() {
        let row = row.map_err(format_err)?;
        if let Some(prev) = out.last() {
            if row.k <= prev.k {
                return Err(TraceIoError::Format(format!(
                    "row {}: k = {} does not increase",
                    line + 2,
                    row.k
                )));
            }
        }
        out.push(IterRecord {
            k: row.k,
            t: row.t,
            f: row.f,
            grad_norm: row.gradnorm,
            err_bound: row.errbound,
            evals: row.evals,
            wall_s: row.wall_s,
        });
    }
    Ok(out)
}

pub fn write_trace(path: &Path, records: &[IterRecord]) -> Result<(), TraceIoError> {
    write_bytes(path, &trace_csv_bytes(records))
}

pub fn read_trace(path: &Path) -> Result<Vec<IterRecord>, TraceIoError> {
    parse_trace_csv(&fs::read(path).map_err(io_err(path))?)
}

/// `trace_0007.csv` → `trace_0007.audit.csv`
pub fn audit_path(trace: &Path) -> PathBuf {
    let stem = trace.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    trace.with_file_name(format!("{stem}.audit.csv"))
}

pub fn audit_csv_bytes(records: &[AuditRecord]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(AUDIT_HEADER).expect("write to memory");
    for a in records {
        w.serialize(AuditRow {
            k: a.k,
            gradnorm: a.grad_norm,
            gnorm: a.g_norm,
            gerr: a.error,
            bound_kind: a.bound.kind_label().to_string(),
            bound_value: a.bound.value(),
        })
        .expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

pub fn parse_audit_csv(bytes: &[u8]) -> Result<Vec<AuditRecord>, TraceIoError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let mut out = Vec::new();
    for row in rdr.deserialize::<AuditRow>() {
        let row = row.map_err(format_err)?;
        let bound = match row.bound_kind.as_str() {
            "absolute" => ErrorBound::Absolute(row.bound_value),
            "relative" => ErrorBound::Relative(row.bound_value),
            "none" => ErrorBound::Unbounded,
            other => return Err(TraceIoError::Format(format!("unknown bound kind {other:?}"))),
        };
        out.push(AuditRecord {
            k: row.k,
            grad_norm: row.gradnorm,
            g_norm: row.gnorm,
            error: row.gerr,
            bound,
        });
    }
    Ok(out)
}

pub fn write_audit(path: &Path, records: &[AuditRecord]) -> Result<(), TraceIoError> {
    write_bytes(path, &audit_csv_bytes(records))
}

pub fn read_audit(path: &Path) -> Result<Vec<AuditRecord>, TraceIoError> {
    parse_audit_csv(&fs::read(path).map_err(io_err(path))?)
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), TraceIoError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(bytes).map_err(io_err(path))
}

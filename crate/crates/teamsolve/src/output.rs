//! Trace files. Column order is fixed per version; the first line of every
//! CSV trace names the version.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use teamsolve_core::dynamics::RunTrace;
use teamsolve_core::two_team::GdmmTrace;

use crate::error::CliError;

pub const SOLVE_TRACE_HEADER: &str = "# teamsolve trace v1";
pub const GDMM_TRACE_HEADER: &str = "# teamsolve gdmm trace v1";
pub const SOLVE_COLUMNS: [&str; 5] = ["t", "potential_g", "ne_gap", "step_norm", "br_action"];
pub const GDMM_COLUMNS: [&str; 5] = ["t", "ne_gap", "average_gap", "oracle_value", "step_norm"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum TraceFormat {
    #[default]
    Json,
    Csv,
}

/// `sol.json` -> `sol.trace.csv`.
pub fn trace_path(out: &Path, format: TraceFormat) -> PathBuf {
    out.with_extension(match format {
        TraceFormat::Json => "trace.json",
        TraceFormat::Csv => "trace.csv",
    })
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        file: path.display().to_string(),
        source,
    }
}

fn write_csv(path: &Path, header: &str, columns: &[&str], rows: Vec<[String; 5]>) -> Result<(), CliError> {
    let mut file = File::create(path).map_err(io_err(path))?;
    writeln!(file, "{header}").map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(file);
    let csv_err = |e: csv::Error| CliError::Io {
        file: path.display().to_string(),
        source: e.into(),
    };
    w.write_record(columns).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

#[derive(Serialize)]
struct JsonTrace<R> {
    format: &'static str,
    version: u32,
    columns: &'static [&'static str],
    records: Vec<R>,
}

#[derive(Serialize)]
struct SolveRow {
    t: usize,
    potential_g: Option<f64>,
    ne_gap: Option<f64>,
    step_norm: f64,
    br_action: Option<usize>,
}

#[derive(Serialize)]
struct GdmmRow {
    t: usize,
    ne_gap: f64,
    average_gap: Option<f64>,
    oracle_value: f64,
    step_norm: f64,
}

pub fn write_solve_trace(path: &Path, trace: &RunTrace, format: TraceFormat) -> Result<(), CliError> {
    match format {
        TraceFormat::Csv => write_csv(
            path,
            SOLVE_TRACE_HEADER,
            &SOLVE_COLUMNS,
            trace
                .records
                .iter()
                .map(|r| {
                    [
                        r.t.to_string(),
                        cell(r.potential_g),
                        cell(r.ne_gap),
                        r.step_norm.to_string(),
                        cell(r.br_action),
                    ]
                })
                .collect(),
        ),
        TraceFormat::Json => crate::schema::write_json(
            path,
            &JsonTrace {
                format: "teamsolve-trace",
                version: 1,
                columns: &SOLVE_COLUMNS,
                records: trace
                    .records
                    .iter()
                    .map(|r| SolveRow {
                        t: r.t,
                        potential_g: r.potential_g,
                        ne_gap: r.ne_gap,
                        step_norm: r.step_norm,
                        br_action: r.br_action,
                    })
                    .collect(),
            },
        ),
    }
}

pub fn write_gdmm_trace(path: &Path, trace: &GdmmTrace, format: TraceFormat) -> Result<(), CliError> {
    match format {
        TraceFormat::Csv => write_csv(
            path,
            GDMM_TRACE_HEADER,
            &GDMM_COLUMNS,
            trace
                .records
                .iter()
                .map(|r| {
                    [
                        r.t.to_string(),
                        r.ne_gap.to_string(),
                        cell(r.average_gap),
                        r.oracle_value.to_string(),
                        r.step_norm.to_string(),
                    ]
                })
                .collect(),
        ),
        TraceFormat::Json => crate::schema::write_json(
            path,
            &JsonTrace {
                format: "teamsolve-gdmm-trace",
                version: 1,
                columns: &GDMM_COLUMNS,
                records: trace
                    .records
                    .iter()
                    .map(|r| GdmmRow {
                        t: r.t,
                        ne_gap: r.ne_gap,
                        average_gap: r.average_gap,
                        oracle_value: r.oracle_value,
                        step_norm: r.step_norm,
                    })
                    .collect(),
            },
        ),
    }
}

/// One parsed row of a `solve` CSV trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveTraceRow {
    pub t: usize,
    pub potential_g: Option<f64>,
    pub ne_gap: Option<f64>,
    pub step_norm: f64,
    pub br_action: Option<usize>,
}

/// Reads a `solve` CSV trace back, checking the version line and columns.
pub fn read_solve_trace_csv(path: &Path) -> Result<Vec<SolveTraceRow>, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let source = path.display().to_string();
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    if first != SOLVE_TRACE_HEADER {
        return Err(CliError::schema(&source, "", format!("expected `{SOLVE_TRACE_HEADER}`, found `{first}`")));
    }
    let mut r = csv::Reader::from_reader(rest.as_bytes());
    let bad = |line: usize, msg: String| CliError::schema(&source, format!("row {line}"), msg);
    let headers = r.headers().map_err(|e| bad(0, e.to_string()))?.clone();
    if headers.iter().ne(SOLVE_COLUMNS) {
        return Err(bad(0, format!("unexpected columns {headers:?}")));
    }
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(k + 1, e.to_string()))?;
        let opt_f = |s: &str| -> Result<Option<f64>, CliError> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(k + 1, format!("not a number: {s}")))
            }
        };
        rows.push(SolveTraceRow {
            t: rec[0].parse().map_err(|_| bad(k + 1, "bad t".into()))?,
            potential_g: opt_f(&rec[1])?,
            ne_gap: opt_f(&rec[2])?,
            step_norm: rec[3].parse().map_err(|_| bad(k + 1, "bad step_norm".into()))?,
            br_action: if rec[4].is_empty() {
                None
            } else {
                Some(rec[4].parse().map_err(|_| bad(k + 1, "bad br_action".into()))?)
            },
        });
    }
    Ok(rows)
}

//! Human table and machine JSON renderings of a [`RunReport`].

use std::fmt::Write as _;
use std::str::FromStr;

use relframe_core::ComplexMatrix;
use serde_json::{json, Value};

use crate::runner::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Human,
    Machine,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown report format `{0}` (expected human or machine)")]
pub struct UnknownFormat(pub String);

impl FromStr for ReportFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "human" => Ok(Self::Human),
            "machine" => Ok(Self::Machine),
            other => Err(UnknownFormat(other.to_owned())),
        }
    }
}

/// Renders `report` in the format named by `format`.
pub fn emit_report(report: &RunReport, format: &str) -> Result<String, UnknownFormat> {
    Ok(render(report, format.parse()?))
}

pub fn render(report: &RunReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Human => human(report),
        ReportFormat::Machine => machine(report),
    }
}

pub fn summary_line(report: &RunReport) -> String {
    let s = report.summary();
    format!("{} pass / {} fail / {} error", s.pass, s.fail, s.error)
}

fn round12(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Matrix literal with entries rounded to 12 decimal digits.
pub fn matrix_literal(m: &ComplexMatrix) -> Value {
    let d = m.dim();
    Value::Array(
        (0..d)
            .map(|i| {
                Value::Array(
                    (0..d)
                        .map(|j| json!([round12(m[(i, j)].re), round12(m[(i, j)].im)]))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Structured JSON mirroring the report. Wall times are left out so that
/// repeated runs are byte-identical.
fn machine(report: &RunReport) -> String {
    let s = report.summary();
    let tasks: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "id": e.id,
                "kind": e.kind,
                "status": e.status.as_str(),
                "max_deviation": e.max_deviation,
                "message": e.message,
                "witnesses": e.witnesses.iter().map(|w| json!({
                    "label": w.label,
                    "matrix": matrix_literal(&w.matrix),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = json!({
        "environment": {
            "tolerance": report.tolerance,
            "seed": report.seed,
            "samples": report.samples,
        },
        "summary": {"pass": s.pass, "fail": s.fail, "error": s.error},
        "tasks": tasks,
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

fn human(report: &RunReport) -> String {
    let header = ["ID", "KIND", "STATUS", "MAX DEVIATION"];
    let rows: Vec<[String; 4]> = report
        .entries
        .iter()
        .map(|e| {
            [
                e.id.clone(),
                e.kind.clone(),
                e.status.as_str().to_uppercase(),
                e.max_deviation
                    .map_or_else(|| "-".to_owned(), |d| format!("{d:.2e}")),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "tolerance {:e}  seed {}  samples {}",
        report.tolerance, report.seed, report.samples
    );
    let line = |cells: [&str; 4]| {
        format!(
            "{:<w0$}  {:<w1$}  {:<w2$}  {}",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        )
    };
    let _ = writeln!(out, "{}", line(header));
    for (row, entry) in rows.iter().zip(&report.entries) {
        let _ = writeln!(out, "{}", line([&row[0], &row[1], &row[2], &row[3]]));
        if let Some(m) = &entry.message {
            let _ = writeln!(out, "    {m}");
        }
        if entry.status != crate::runner::Status::Pass {
            for w in &entry.witnesses {
                let _ = writeln!(
                    out,
                    "    witness {}: {}",
                    w.label,
                    matrix_literal(&w.matrix)
                );
            }
        }
    }
    let _ = writeln!(out, "{}", summary_line(report));
    out
}

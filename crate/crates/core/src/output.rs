//! CSV and JSON writers. Every CSV starts with a `# fuzzysim <kind> v<n>`
//! schema line; fuzzy numbers are rendered as `(a1,a2,a3,a4)`.

use std::io::{self, Write};

use crate::measures::PerformanceReport;
use crate::model::TraceRecord;
use crate::workzone::{StrategyComparison, SweepRow};

pub const TRACE_SCHEMA: &str = "# fuzzysim trace v1";
pub const REPORT_SCHEMA: &str = "# fuzzysim report v1";
pub const SWEEP_SCHEMA: &str = "# fuzzysim sweep v1";

pub const TRACE_COLUMNS: [&str; 6] = ["t", "vehicle", "X", "V", "A", "G"];

pub const SWEEP_COLUMNS: [&str; 16] = [
    "n_a",
    "n_b",
    "precision_unit",
    "seed",
    "d1_1",
    "d1_2",
    "d1_3",
    "d1_4",
    "d2_1",
    "d2_2",
    "d2_3",
    "d2_4",
    "p12",
    "p21",
    "unc",
    "status",
];

fn csv_error(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

fn with_schema<W: Write>(mut out: W, schema: &str) -> io::Result<csv::Writer<W>> {
    writeln!(out, "{schema}")?;
    Ok(csv::Writer::from_writer(out))
}

pub fn write_trace<W: Write>(out: W, records: &[TraceRecord]) -> io::Result<()> {
    let mut w = with_schema(out, TRACE_SCHEMA)?;
    w.write_record(TRACE_COLUMNS).map_err(csv_error)?;
    for r in records {
        w.write_record([
            r.t.to_string(),
            r.vehicle.to_string(),
            r.position.to_string(),
            r.velocity.to_string(),
            r.acceleration.to_string(),
            r.gap.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()
}

/// One row per measure: divided value, raw sum and divisor.
pub fn write_report<W: Write>(out: W, report: &PerformanceReport) -> io::Result<()> {
    let mut w = with_schema(out, REPORT_SCHEMA)?;
    w.write_record(["measure", "value", "raw", "divisor"])
        .map_err(csv_error)?;
    let n = report.vehicles.to_string();
    let t = report.steps.to_string();
    for (name, value, raw, divisor) in [
        ("delay", report.delay, report.raw_delay, &n),
        ("stops", report.stops, report.raw_stops, &n),
        ("queue", report.queue, report.raw_queue, &t),
    ] {
        w.write_record([name, &value.to_string(), &raw.to_string(), divisor])
            .map_err(csv_error)?;
    }
    w.flush()
}

pub fn write_comparison<W: Write>(mut out: W, comparison: &StrategyComparison) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, comparison)?;
    writeln!(out)
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> io::Result<()> {
    let mut w = with_schema(out, SWEEP_SCHEMA)?;
    w.write_record(SWEEP_COLUMNS).map_err(csv_error)?;
    for row in rows {
        let mut record = vec![
            row.n_a.to_string(),
            row.n_b.to_string(),
            row.precision_unit.to_string(),
            row.seed.to_string(),
        ];
        match &row.outcome {
            Ok(c) => {
                record.extend(c.d1.components().iter().map(ToString::to_string));
                record.extend(c.d2.components().iter().map(ToString::to_string));
                record.extend([
                    c.p_12.to_string(),
                    c.p_21.to_string(),
                    c.unc.to_string(),
                    "ok".into(),
                ]);
            }
            Err(_) => {
                record.extend(std::iter::repeat_n(String::new(), 11));
                record.push("error".into());
            }
        }
        w.write_record(&record).map_err(csv_error)?;
    }
    w.flush()
}

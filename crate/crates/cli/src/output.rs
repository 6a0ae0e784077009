//! CSV and JSON serialisation of run reports.

use std::io::Write;
use std::path::{Path, PathBuf};

use finsler_core::report::fmt_num;

use crate::run::{CheckRow, RunReport};

pub const CSV_HEADER: [&str; 12] = [
    "theorem_id",
    "metric",
    "n",
    "params",
    "lhs",
    "rhs",
    "constant",
    "ratio",
    "margin",
    "passed",
    "grid_h",
    "runtime_ms",
];

fn opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// The CSV cells of a row. `runtime_ms` is left empty so that repeated runs
/// produce identical files; timings live in the JSON report.
pub fn csv_record(row: &CheckRow) -> [String; 12] {
    [
        row.theorem_id.as_str().to_string(),
        row.metric.clone(),
        row.n.to_string(),
        row.params.clone(),
        opt(row.lhs),
        opt(row.rhs),
        opt(row.constant),
        opt(row.ratio),
        opt(row.margin),
        row.passed.to_string(),
        fmt_num(row.grid_h),
        String::new(),
    ]
}

pub fn write_csv<W: Write>(out: W, rows: &[CheckRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(csv_record(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[CheckRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// Writes the CSV and JSON reports into `dir`, returning their paths.
pub fn write_reports(dir: &Path, csv_name: &str, json_name: &str, report: &RunReport) -> anyhow::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(csv_name);
    let json_path = dir.join(json_name);
    std::fs::write(&csv_path, csv_string(&report.rows))?;
    let mut f = std::fs::File::create(&json_path)?;
    serde_json::to_writer_pretty(&mut f, report)?;
    f.write_all(b"\n")?;
    Ok((csv_path, json_path))
}

//! Trajectory tables and report files.

use std::fs;
use std::io;
use std::path::Path;

use serde_json::{json, Value};

use crate::dynamics::{drift_of_samples, DriftReport, Sample};
use crate::geometry::{SpaceChart, State};
use crate::invariants::MotionConstants;

pub const CSV_HEADER: [&str; 15] =
    ["t", "r", "phi", "z", "vr", "vphi", "vz", "epsilon", "I", "A", "C", "u0", "u1", "u2", "u3"];

pub type Row = [f64; 15];

pub fn sample_row(chart: &SpaceChart, sample: &Sample) -> Row {
    let s = &sample.state;
    let k = &sample.constants;
    let u = chart.embed(s);
    [
        s.t, s.r, s.phi, s.z, s.vr, s.vphi, s.vz, k.speed_sq, k.angular_momentum, k.transverse, k.offset, u.u0, u.u1,
        u.u2, u.u3,
    ]
}

/// Indices `0, stride, 2·stride, …` plus the final sample.
pub fn export_indices(len: usize, stride: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..len).step_by(stride.max(1)).collect();
    if len > 0 && out.last() != Some(&(len - 1)) {
        out.push(len - 1);
    }
    out
}

/// 17 significant digits: enough to read back the identical `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
}

pub fn write_trajectory_csv(path: &Path, rows: &[Row]) -> io::Result<()> {
    let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|&x| format_float(x)).collect()).collect();
    write_csv(path, &CSV_HEADER, &text)
}

pub fn write_trajectory_json(path: &Path, rows: &[Row]) -> io::Result<()> {
    let body = json!({ "columns": CSV_HEADER, "rows": rows });
    write_json(path, &body)
}

pub fn write_json(path: &Path, value: &Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

pub fn read_trajectory_csv(path: &Path) -> io::Result<Vec<Row>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(io::Error::new(io::ErrorKind::InvalidData, format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let mut row = [0.0; 15];
        for (slot, field) in row.iter_mut().zip(record.iter()) {
            *slot = field
                .parse()
                .map_err(|_| io::Error::new(io::ErrorKind::InvalidData, format!("bad number '{field}'")))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_trajectory_json(path: &Path) -> io::Result<Vec<Row>> {
    let value: Value = serde_json::from_str(&fs::read_to_string(path)?).map_err(io::Error::other)?;
    let rows: Vec<Row> = serde_json::from_value(value["rows"].clone()).map_err(io::Error::other)?;
    Ok(rows)
}

/// Drift over table rows, using the stored invariant columns.
pub fn drift_of_rows(rows: &[Row], omega: f64) -> DriftReport {
    let samples: Vec<Sample> = rows
        .iter()
        .map(|r| Sample {
            state: State::new(r[0], r[1], r[2], r[3], r[4], r[5], r[6]),
            constants: MotionConstants {
                speed_sq: r[7],
                omega,
                angular_momentum: r[8],
                transverse: r[9],
                offset: r[10],
            },
        })
        .collect();
    drift_of_samples(&samples)
}

pub fn drift_json(d: &DriftReport) -> Value {
    json!({
        "epsilon": d.speed_sq,
        "I": d.angular_momentum,
        "A": d.transverse,
        "C": d.offset,
        "omega": d.omega,
    })
}

pub fn constants_json(k: &MotionConstants) -> Value {
    json!({
        "epsilon": k.speed_sq,
        "omega": k.omega,
        "I": k.angular_momentum,
        "A": k.transverse,
        "C": k.offset,
    })
}

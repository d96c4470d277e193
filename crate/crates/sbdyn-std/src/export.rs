//! Trajectory logs as CSV and JSON.
//!
//! CSV floats are written as `{:.16e}`, which round-trips every finite `f64`
//! and makes repeated runs byte-identical. JSON uses shortest round-trip
//! formatting; non-finite values become `null`.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};
use thiserror::Error;

use sbdyn_core::simulation::{RunSummary, StepRecord, TerminationReason, TrajectoryLog};

pub const JSON_SCHEMA_VERSION: u32 = 1;

/// Values per logged step.
pub const COLUMN_COUNT: usize = 46;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed log: {0}")]
    Format(String),
}

const VECTORS: [(&str, usize); 13] = [
    ("time", 1),
    ("position", 3),
    ("velocity", 3),
    ("attitude", 9),
    ("angular_velocity", 3),
    ("desired_position", 3),
    ("psi", 1),
    ("position_error", 3),
    ("velocity_error", 3),
    ("attitude_error", 3),
    ("angular_velocity_error", 3),
    ("control_force", 3),
    ("control_moment", 3),
];
const SCALARS_TAIL: [(&str, usize); 3] = [("altitude", 1), ("potential_energy", 1), ("gravity_force", 3)];

const AXES: [&str; 3] = ["x", "y", "z"];
const ATTITUDE: [&str; 9] = ["r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"];

/// CSV header, one name per column.
pub fn csv_columns() -> Vec<String> {
    let mut out = Vec::new();
    for (name, n) in VECTORS.iter().chain(SCALARS_TAIL.iter()) {
        match n {
            1 => out.push(name.to_string()),
            3 => out.extend(AXES.iter().map(|a| format!("{name}_{a}"))),
            _ => out.extend(ATTITUDE.iter().map(|s| s.to_string())),
        }
    }
    out
}

fn flatten(r: &StepRecord) -> Vec<f64> {
    let mut v = Vec::with_capacity(COLUMN_COUNT);
    v.push(r.time);
    v.extend_from_slice(&r.position);
    v.extend_from_slice(&r.velocity);
    v.extend_from_slice(&r.attitude);
    v.extend_from_slice(&r.angular_velocity);
    v.extend_from_slice(&r.desired_position);
    v.push(r.psi);
    v.extend_from_slice(&r.position_error);
    v.extend_from_slice(&r.velocity_error);
    v.extend_from_slice(&r.attitude_error);
    v.extend_from_slice(&r.angular_velocity_error);
    v.extend_from_slice(&r.control_force);
    v.extend_from_slice(&r.control_moment);
    v.push(r.altitude);
    v.push(r.potential_energy);
    v.extend_from_slice(&r.gravity_force);
    v
}

struct Cursor<'a>(std::slice::Iter<'a, f64>);

impl Cursor<'_> {
    fn one(&mut self) -> f64 {
        *self.0.next().expect("column count checked by caller")
    }

    fn three(&mut self) -> [f64; 3] {
        [self.one(), self.one(), self.one()]
    }
}

fn unflatten(v: &[f64]) -> StepRecord {
    let mut c = Cursor(v.iter());
    StepRecord {
        time: c.one(),
        position: c.three(),
        velocity: c.three(),
        attitude: core::array::from_fn(|_| c.one()),
        angular_velocity: c.three(),
        desired_position: c.three(),
        psi: c.one(),
        position_error: c.three(),
        velocity_error: c.three(),
        attitude_error: c.three(),
        angular_velocity_error: c.three(),
        control_force: c.three(),
        control_moment: c.three(),
        altitude: c.one(),
        potential_energy: c.one(),
        gravity_force: c.three(),
    }
}

/// Write the per-step log as CSV.
pub fn write_csv<W: Write>(records: &[StepRecord], out: W) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_columns())?;
    for r in records {
        w.write_record(flatten(r).iter().map(|x| format!("{x:.16e}")))?;
    }
    w.flush().map_err(|source| ExportError::Io {
        path: "<csv>".into(),
        source,
    })?;
    Ok(())
}

pub fn csv_string(records: &[StepRecord]) -> Result<String, ExportError> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    String::from_utf8(buf).map_err(|e| ExportError::Format(e.to_string()))
}

/// Read a log written by [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<StepRecord>, ExportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != csv_columns() {
        return Err(ExportError::Format("unexpected CSV header".into()));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let values = row
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| ExportError::Format(format!("`{s}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != COLUMN_COUNT {
            return Err(ExportError::Format(format!("row has {} values", values.len())));
        }
        out.push(unflatten(&values));
    }
    Ok(out)
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn from_json(v: &Value) -> Result<f64, ExportError> {
    match v {
        Value::Null => Ok(f64::NAN),
        Value::Number(n) => n.as_f64().ok_or_else(|| ExportError::Format(format!("bad number {n}"))),
        other => Err(ExportError::Format(format!("expected a number, got {other}"))),
    }
}

pub fn summary_json(s: &RunSummary) -> Value {
    json!({
        "termination": s.termination.as_str(),
        "detail": s.detail,
        "end_time": number(s.end_time),
        "final_position_error": number(s.final_position_error),
        "final_velocity_error": number(s.final_velocity_error),
        "final_psi": number(s.final_psi),
        "final_attitude_error": number(s.final_attitude_error),
        "final_angular_velocity_error": number(s.final_angular_velocity_error),
        "control_force_integral": number(s.control_force_integral),
        "control_moment_integral": number(s.control_moment_integral),
        "phase_switch_index": s.phase_switch_index,
        "seed": s.seed,
    })
}

fn summary_from_json(v: &Value) -> Result<RunSummary, ExportError> {
    let field = |k: &str| v.get(k).ok_or_else(|| ExportError::Format(format!("summary.{k} missing")));
    let f = |k: &str| field(k).and_then(from_json);
    let name = field("termination")?.as_str().unwrap_or_default();
    Ok(RunSummary {
        termination: TerminationReason::parse(name)
            .ok_or_else(|| ExportError::Format(format!("unknown termination `{name}`")))?,
        detail: field("detail")?.as_str().map(str::to_string),
        end_time: f("end_time")?,
        final_position_error: f("final_position_error")?,
        final_velocity_error: f("final_velocity_error")?,
        final_psi: f("final_psi")?,
        final_attitude_error: f("final_attitude_error")?,
        final_angular_velocity_error: f("final_angular_velocity_error")?,
        control_force_integral: f("control_force_integral")?,
        control_moment_integral: f("control_moment_integral")?,
        phase_switch_index: field("phase_switch_index")?.as_u64().map(|n| n as usize),
        seed: field("seed")?.as_u64(),
    })
}

/// The whole log as a JSON document; records are objects keyed by the
/// CSV column names.
pub fn log_json(log: &TrajectoryLog) -> Value {
    let columns = csv_columns();
    let records: Vec<Value> = log
        .records
        .iter()
        .map(|r| {
            let obj: Map<String, Value> = columns.iter().cloned().zip(flatten(r).into_iter().map(number)).collect();
            Value::Object(obj)
        })
        .collect();
    json!({
        "schema_version": JSON_SCHEMA_VERSION,
        "columns": columns,
        "summary": summary_json(&log.summary),
        "records": records,
    })
}

pub fn read_json(text: &str) -> Result<TrajectoryLog, ExportError> {
    let doc: Value = serde_json::from_str(text)?;
    if doc.get("schema_version").and_then(Value::as_u64) != Some(JSON_SCHEMA_VERSION as u64) {
        return Err(ExportError::Format("unsupported schema_version".into()));
    }
    let summary = summary_from_json(doc.get("summary").ok_or_else(|| ExportError::Format("summary missing".into()))?)?;
    let columns = csv_columns();
    let mut records = Vec::new();
    for r in doc.get("records").and_then(Value::as_array).into_iter().flatten() {
        let values = columns
            .iter()
            .map(|c| from_json(r.get(c).ok_or_else(|| ExportError::Format(format!("record field {c} missing")))?))
            .collect::<Result<Vec<_>, _>>()?;
        records.push(unflatten(&values));
    }
    Ok(TrajectoryLog { records, summary })
}

fn create(path: &Path) -> Result<File, ExportError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| ExportError::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    File::create(path).map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn save_csv(records: &[StepRecord], path: &Path) -> Result<(), ExportError> {
    write_csv(records, io::BufWriter::new(create(path)?))
}

pub fn save_json(log: &TrajectoryLog, path: &Path) -> Result<(), ExportError> {
    let mut w = io::BufWriter::new(create(path)?);
    serde_json::to_writer_pretty(&mut w, &log_json(log))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })
}

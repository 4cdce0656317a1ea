use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::{DriveCycleRecord, TEMPERATURE_BOUNDS, VOLTAGE_BOUNDS};
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 4] = ["time_s", "voltage_v", "current_a", "temperature_c"];
const CAPACITY_COLUMN: &str = "capacity_ah";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestOptions {
    /// Flip the sign of every current sample, for logs that record
    /// discharge as negative.
    pub invert_current: bool,
}

/// Parsed telemetry, sorted by time.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleData {
    pub records: Vec<DriveCycleRecord>,
    /// Value of the optional `capacity_ah` column.
    pub capacity_ah: Option<f64>,
}

pub fn ingest_csv(path: impl AsRef<Path>, options: IngestOptions) -> Result<CycleData> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_records(file, path, options)
}

/// Parses telemetry from any reader. `source` only labels error messages.
///
/// Every offending line is reported, not just the first. Exact duplicate
/// rows are dropped; distinct rows sharing a timestamp are rejected.
pub fn read_records<R: Read>(
    reader: R,
    source: impl Into<PathBuf>,
    options: IngestOptions,
) -> Result<CycleData> {
    let source = source.into();
    let fail = |problems: Vec<String>| Error::Ingest {
        path: source.clone(),
        problems,
    };

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let mut missing = Vec::new();
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(CSV_HEADER) {
        match column(name) {
            Some(i) => *slot = i,
            None => missing.push(format!("line 1: missing column '{name}'")),
        }
    }
    if !missing.is_empty() {
        return Err(fail(missing));
    }
    let capacity_idx = column(CAPACITY_COLUMN);

    let mut problems = Vec::new();
    let mut rows: Vec<(u64, DriveCycleRecord)> = Vec::new();
    let mut capacity: Option<(u64, f64)> = None;
    for result in rdr.records() {
        let record = match result {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                problems.push(format!("line {line}: {e}"));
                continue;
            }
        };
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            problems.push(format!(
                "line {line}: expected {} fields, found {}",
                headers.len(),
                record.len()
            ));
            continue;
        }
        let mut values = [0.0f64; 4];
        let mut ok = true;
        for ((value, &i), name) in values.iter_mut().zip(&idx).zip(CSV_HEADER) {
            match record[i].parse::<f64>() {
                Ok(v) if v.is_finite() => *value = v,
                _ => {
                    problems.push(format!("line {line}: malformed {name} '{}'", &record[i]));
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }
        let [time_s, voltage_v, current_a, temperature_c] = values;
        if !(voltage_v > VOLTAGE_BOUNDS.0 && voltage_v < VOLTAGE_BOUNDS.1) {
            problems.push(format!(
                "line {line}: voltage {voltage_v} V outside ({}, {})",
                VOLTAGE_BOUNDS.0, VOLTAGE_BOUNDS.1
            ));
            ok = false;
        }
        if !(temperature_c > TEMPERATURE_BOUNDS.0 && temperature_c < TEMPERATURE_BOUNDS.1) {
            problems.push(format!(
                "line {line}: temperature {temperature_c} C outside ({}, {})",
                TEMPERATURE_BOUNDS.0, TEMPERATURE_BOUNDS.1
            ));
            ok = false;
        }
        if let Some(ci) = capacity_idx {
            match record[ci].parse::<f64>() {
                Ok(c) if c.is_finite() && c > 0.0 => match capacity {
                    None => capacity = Some((line, c)),
                    Some((first, c0)) if c0 != c => {
                        problems.push(format!(
                            "line {line}: capacity_ah {c} differs from {c0} on line {first}"
                        ));
                        ok = false;
                    }
                    Some(_) => {}
                },
                _ => {
                    problems.push(format!(
                        "line {line}: malformed capacity_ah '{}'",
                        &record[ci]
                    ));
                    ok = false;
                }
            }
        }
        if ok {
            let current_a = if options.invert_current {
                -current_a
            } else {
                current_a
            };
            rows.push((
                line,
                DriveCycleRecord {
                    time_s,
                    voltage_v,
                    current_a,
                    temperature_c,
                },
            ));
        }
    }
    if !problems.is_empty() {
        return Err(fail(problems));
    }
    if rows.is_empty() {
        return Err(fail(vec!["no data rows".into()]));
    }

    rows.sort_by(|a, b| a.1.time_s.total_cmp(&b.1.time_s));
    let mut records: Vec<DriveCycleRecord> = Vec::with_capacity(rows.len());
    let mut last_line = 0;
    for (line, rec) in rows {
        if let Some(prev) = records.last() {
            if prev.time_s == rec.time_s {
                if *prev != rec {
                    problems.push(format!(
                        "lines {last_line} and {line}: conflicting samples at t = {} s",
                        rec.time_s
                    ));
                }
                continue;
            }
        }
        last_line = line;
        records.push(rec);
    }
    if !problems.is_empty() {
        return Err(fail(problems));
    }
    Ok(CycleData {
        records,
        capacity_ah: capacity.map(|(_, c)| c),
    })
}

/// Writes records in the ingestible schema, with a constant `capacity_ah`
/// column when `capacity_ah` is given. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_records_csv<W: Write>(
    writer: W,
    records: &[DriveCycleRecord],
    capacity_ah: Option<f64>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = CSV_HEADER.to_vec();
    if capacity_ah.is_some() {
        header.push(CAPACITY_COLUMN);
    }
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.time_s.to_string(),
            r.voltage_v.to_string(),
            r.current_a.to_string(),
            r.temperature_c.to_string(),
        ];
        if let Some(c) = capacity_ah {
            row.push(c.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

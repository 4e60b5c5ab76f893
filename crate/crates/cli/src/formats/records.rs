//! Run-records CSV: one row per (training run, metric).
//!
//! Header: `ratio,n_total,n_real,repeat,metric,value`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use synmix_core::RunRecord;

use crate::error::{CliError, Result};

#[derive(Debug, Serialize, Deserialize)]
struct RunRow {
    ratio: f64,
    n_total: u64,
    n_real: u64,
    repeat: u32,
    metric: String,
    value: f64,
}

pub fn parse_records(bytes: &[u8], source: &str) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_reader(bytes);
    let mut records = Vec::new();
    for (idx, row) in reader.deserialize::<RunRow>().enumerate() {
        let row = row.map_err(|e| {
            CliError::validation(format!("{source}: row {}: {e}", idx + 2))
        })?;
        if !(row.value > 0.0 && row.value <= 1.0) {
            return Err(CliError::validation(format!(
                "{source}: row {}: metric value {} outside (0, 1]",
                idx + 2,
                row.value
            )));
        }
        if !(0.0..=1.0).contains(&row.ratio) || row.ratio.is_nan() {
            return Err(CliError::validation(format!(
                "{source}: row {}: ratio {} outside [0, 1]",
                idx + 2,
                row.ratio
            )));
        }
        if row.n_real > row.n_total {
            return Err(CliError::validation(format!(
                "{source}: row {}: n_real {} exceeds n_total {}",
                idx + 2,
                row.n_real,
                row.n_total
            )));
        }
        records.push(RunRecord {
            ratio: row.ratio,
            n_total: row.n_total,
            n_real: row.n_real,
            repeat: row.repeat,
            metric: row.metric,
            value: row.value,
        });
    }
    if records.is_empty() {
        return Err(CliError::validation(format!("{source}: no run records")));
    }
    Ok(records)
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, &e))?;
    parse_records(&bytes, &path.display().to_string())
}

pub fn serialize_records(records: &[RunRecord]) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for rec in records {
        writer
            .serialize(RunRow {
                ratio: rec.ratio,
                n_total: rec.n_total,
                n_real: rec.n_real,
                repeat: rec.repeat,
                metric: rec.metric.clone(),
                value: rec.value,
            })
            .expect("csv serialization is infallible");
    }
    writer.into_inner().expect("vec writer cannot fail")
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<()> {
    std::fs::write(path, serialize_records(records)).map_err(|e| CliError::io(path, &e))
}

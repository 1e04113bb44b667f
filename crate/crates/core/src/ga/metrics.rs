//! Per-generation metrics as CSV.
//!
//! Columns: `generation,best_accuracy,mean_accuracy,best_scalar,best_nonzero,
//! best_nonzero_fraction`, plus `wall_seconds` when timing is requested.
//! Without timing the file is a pure function of the run configuration.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::evolve::GenerationRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub generation: usize,
    pub best_accuracy: f64,
    pub mean_accuracy: f64,
    pub best_scalar: f64,
    pub best_nonzero: usize,
    pub best_nonzero_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
}

impl MetricsRow {
    pub fn from_record(r: &GenerationRecord, timing: bool) -> Self {
        MetricsRow {
            generation: r.generation,
            best_accuracy: r.best_accuracy,
            mean_accuracy: r.mean_accuracy,
            best_scalar: r.best_scalar,
            best_nonzero: r.best_nonzero,
            best_nonzero_fraction: r.best_nonzero_fraction,
            wall_seconds: timing.then_some(r.wall_seconds),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::format("metrics", e.to_string())
}

pub fn write_metrics<W: Write>(out: W, records: &[GenerationRecord], timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        let mut header = vec![
            "generation",
            "best_accuracy",
            "mean_accuracy",
            "best_scalar",
            "best_nonzero",
            "best_nonzero_fraction",
        ];
        if timing {
            header.push("wall_seconds");
        }
        w.write_record(header).map_err(csv_err)?;
    }
    for r in records {
        w.serialize(MetricsRow::from_record(r, timing))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn metrics_csv(records: &[GenerationRecord], timing: bool) -> String {
    let mut buf = Vec::new();
    write_metrics(&mut buf, records, timing).expect("writing to memory");
    String::from_utf8(buf).expect("csv is UTF-8")
}

pub fn read_metrics<R: Read>(input: R) -> Result<Vec<MetricsRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<Vec<MetricsRow>, _>>()
        .map_err(csv_err)
}

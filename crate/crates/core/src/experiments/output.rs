//! File writers for experiment results: JSON Lines per sample, CSV tables and
//! pretty JSON reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::stats::Histogram;
use crate::error::Result;

/// One serialized value per line.
pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Header from the field names of `T`, one row per item.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    pub rank: usize,
    pub bin_left: f64,
    pub bin_right: f64,
    pub normalized_frequency: f64,
}

/// Histogram rows for one rank. The first row is the classical mass, written
/// as the degenerate bin `[bound, bound]`.
pub fn histogram_rows(rank: usize, h: &Histogram) -> Vec<HistogramRow> {
    let mut rows = vec![HistogramRow {
        rank,
        bin_left: h.classical_bound,
        bin_right: h.classical_bound,
        normalized_frequency: h.classical_fraction,
    }];
    rows.extend(h.bins.iter().map(|b| HistogramRow {
        rank,
        bin_left: b.bin_left,
        bin_right: b.bin_right,
        normalized_frequency: b.normalized_frequency,
    }));
    rows
}

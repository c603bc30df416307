use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::run::ResultRow;
use crate::error::{Error, Result};

pub const HEADER: [&str; 20] = [
    "series",
    "param",
    "value",
    "n",
    "m",
    "efficiency",
    "spacing",
    "ue_coupling",
    "scattering",
    "precoder",
    "sum_capacity",
    "sinr_min",
    "sinr_max",
    "p_t",
    "p_l",
    "rx_power_total",
    "reference_aperture_power",
    "converged",
    "iterations",
    "error",
];

/// 17 significant digits, enough to reproduce every `f64` exactly.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn record(row: &ResultRow) -> [String; 20] {
    [
        row.series.clone(),
        row.param.clone(),
        format_float(row.value),
        row.n.to_string(),
        row.m.to_string(),
        format_float(row.efficiency),
        format_float(row.spacing),
        row.ue_coupling.to_string(),
        row.scattering.to_string(),
        row.precoder.clone(),
        format_float(row.sum_capacity),
        format_float(row.sinr_min),
        format_float(row.sinr_max),
        format_float(row.p_t),
        format_float(row.p_l),
        format_float(row.rx_power_total),
        format_float(row.reference_aperture_power),
        row.converged.to_string(),
        row.iterations.to_string(),
        row.error.clone().unwrap_or_default(),
    ]
}

/// Writes the header and one line per row (LF line endings).
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(rows, BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

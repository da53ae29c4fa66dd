//! Matrix serialization: CSV (one row per line, 17 significant digits) and a
//! little-endian binary dump with a 16-byte header
//! (`DEMOLAB1`, u32 rows, u32 cols) followed by row-major f64 values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::MeasurementMatrix;
use crate::error::{LabError, Result};

pub const BINARY_MAGIC: &[u8; 8] = b"DEMOLAB1";

/// Scientific notation with 17 significant digits; round-trips every f64.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(m: &DMatrix<f64>, mut w: W) -> Result<()> {
    for i in 0..m.nrows() {
        let line: Vec<String> = m.row(i).iter().map(|&v| format_f64(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record?;
        if cols.is_some_and(|c| c != record.len()) {
            return Err(LabError::Format(format!("ragged CSV row {}", rows + 1)));
        }
        cols = Some(record.len());
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| LabError::Format(format!("bad number `{field}` on row {}", rows + 1)))?;
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| LabError::Format("empty CSV matrix".into()))?;
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn write_binary<W: Write>(m: &DMatrix<f64>, mut w: W) -> Result<()> {
    let rows = u32::try_from(m.nrows()).map_err(|_| LabError::InvalidDimension("too many rows".into()))?;
    let cols = u32::try_from(m.ncols()).map_err(|_| LabError::InvalidDimension("too many columns".into()))?;
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&rows.to_le_bytes())?;
    w.write_all(&cols.to_le_bytes())?;
    for i in 0..m.nrows() {
        for &v in m.row(i).iter() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<DMatrix<f64>> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[..8] != BINARY_MAGIC {
        return Err(LabError::Format("missing DEMOLAB1 magic".into()));
    }
    let rows = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    let mut data = vec![0f64; rows * cols];
    let mut buf = [0u8; 8];
    for v in data.iter_mut() {
        r.read_exact(&mut buf)?;
        *v = f64::from_le_bytes(buf);
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(LabError::Format(format!("{} trailing bytes after matrix payload", rest.len())));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

/// Load a matrix, choosing the format from the extension (`.csv` or binary).
pub fn load_matrix(path: &Path) -> Result<MeasurementMatrix> {
    let file = BufReader::new(File::open(path)?);
    let entries = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => read_csv(file)?,
        _ => read_binary(file)?,
    };
    MeasurementMatrix::from_entries(entries)
}

pub fn save_csv(m: &DMatrix<f64>, path: &Path) -> Result<()> {
    write_csv(m, BufWriter::new(File::create(path)?))
}

pub fn save_binary(m: &DMatrix<f64>, path: &Path) -> Result<()> {
    write_binary(m, BufWriter::new(File::create(path)?))
}

//! Data-matrix files: headerless CSV (rows = variables, columns =
//! observations) and a raw little-endian binary format with an 8-byte
//! header holding `p` and `n` as 32-bit integers, followed by the `p·n`
//! doubles in column-major order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Reads a headerless numeric CSV into a `p×n` matrix.
pub fn read_csv(path: &Path) -> Result<DMatrix<f64>> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (j, field) in line.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::invalid(format!(
                    "row {}, column {}: unparsable field {:?}",
                    i + 1,
                    j + 1,
                    field.trim()
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::invalid(format!(
                    "row {}, column {}: non-finite value",
                    i + 1,
                    j + 1
                )));
            }
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::invalid(format!(
                    "row {} has {} columns, expected {}",
                    i + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::invalid("empty matrix file"));
    }
    let (p, n) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(p, n, |i, j| rows[i][j]))
}

/// Writes a matrix as headerless CSV, one variable per line.
pub fn write_csv(x: &DMatrix<f64>, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for i in 0..x.nrows() {
        let line: Vec<String> = (0..x.ncols()).map(|j| format!("{:?}", x[(i, j)])).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the binary format: `p: u32 LE`, `n: u32 LE`, then `p·n` doubles,
/// column-major.
pub fn read_binary(path: &Path) -> Result<DMatrix<f64>> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut header = [0u8; 8];
    reader.read_exact(&mut header)?;
    let p = u32::from_le_bytes(header[0..4].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    if p == 0 || n == 0 {
        return Err(Error::invalid(format!(
            "binary header declares empty matrix {p}×{n}"
        )));
    }
    let mut buf = vec![0u8; p * n * 8];
    reader.read_exact(&mut buf).map_err(|e| {
        Error::invalid(format!(
            "binary payload shorter than the {p}×{n} header promises: {e}"
        ))
    })?;
    let mut data = Vec::with_capacity(p * n);
    for chunk in buf.chunks_exact(8) {
        let v = f64::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            let idx = data.len();
            return Err(Error::invalid(format!(
                "row {}, column {}: non-finite value",
                idx % p + 1,
                idx / p + 1
            )));
        }
        data.push(v);
    }
    Ok(DMatrix::from_vec(p, n, data))
}

/// Writes the binary format described in [`read_binary`].
pub fn write_binary(x: &DMatrix<f64>, path: &Path) -> Result<()> {
    let (p, n) = (x.nrows(), x.ncols());
    if p > u32::MAX as usize || n > u32::MAX as usize {
        return Err(Error::invalid("matrix too large for the binary header"));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(p as u32).to_le_bytes())?;
    w.write_all(&(n as u32).to_le_bytes())?;
    for v in x.iter() {
        // nalgebra iterates column-major, matching the format.
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Loads a matrix, dispatching on the `.csv` extension (anything else is
/// treated as binary).
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_csv(path),
        _ => read_binary(path),
    }
}

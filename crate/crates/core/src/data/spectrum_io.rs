//! Spectrum files: a `j,lambda` CSV with shortest round-trip decimals, and a
//! raw little-endian binary sidecar.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::{SpectrumEstimate, SpectrumMeta};

pub const BINARY_MAGIC: &[u8; 8] = b"PWSPEC01";

/// Shortest decimal that parses back to exactly `x`.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn label_from(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn write_spectrum_csv(spec: &SpectrumEstimate, path: &Path) -> Result<()> {
    write_spectrum_rows(1, &spec.eigenvalues, fs::File::create(path)?)
}

/// `j,lambda` rows with `j` starting at `first_j`.
pub fn write_spectrum_rows(first_j: usize, values: &[f64], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["j", "lambda"])?;
    for (i, x) in values.iter().enumerate() {
        w.write_record([(first_j + i).to_string(), format_f64(*x)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum_csv(path: &Path) -> Result<SpectrumEstimate> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.len() != 2 || &header[0] != "j" || &header[1] != "lambda" {
        return Err(Error::Format(format!(
            "{}: expected header `j,lambda`, found `{}`",
            path.display(),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut values = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let bad = |what: &str| Error::Format(format!("{}: row {}: {what}", path.display(), i + 1));
        if record.len() != 2 {
            return Err(bad("expected two fields"));
        }
        let j: usize = record[0].trim().parse().map_err(|_| bad("index is not an integer"))?;
        if j != i + 1 {
            return Err(bad("indices must run 1, 2, 3, …"));
        }
        let x: f64 = record[1].trim().parse().map_err(|_| bad("value is not a number"))?;
        values.push(x);
    }
    let meta = SpectrumMeta {
        label: label_from(path),
        ..SpectrumMeta::default()
    };
    Ok(SpectrumEstimate::new(values, meta))
}

/// Magic, `u64` length, then `f64` values, all little-endian.
pub fn write_spectrum_bin(values: &[f64], path: &Path) -> Result<()> {
    let mut buf = Vec::with_capacity(16 + 8 * values.len());
    buf.extend_from_slice(BINARY_MAGIC);
    buf.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for x in values {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub fn read_spectrum_bin(path: &Path) -> Result<Vec<f64>> {
    let bytes = fs::read(path)?;
    if bytes.len() < 16 || &bytes[..8] != BINARY_MAGIC {
        return Err(Error::Format(format!("{}: missing spectrum magic header", path.display())));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let payload = &bytes[16..];
    if payload.len() != n.saturating_mul(8) {
        return Err(Error::Format(format!(
            "{}: header declares {n} values but payload has {} bytes",
            path.display(),
            payload.len()
        )));
    }
    Ok(payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

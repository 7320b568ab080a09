//! CIFAR-10 binary batches: records of one label byte followed by 3072 pixel
//! bytes (R, G, B planes of 32×32, row-major).

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const RECORD_BYTES: usize = 3073;
pub const PIXELS: usize = 3072;
pub const TRAIN_BATCHES: [&str; 5] = [
    "data_batch_1.bin",
    "data_batch_2.bin",
    "data_batch_3.bin",
    "data_batch_4.bin",
    "data_batch_5.bin",
];

/// A data matrix whose rows are samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMatrix {
    pub values: DMatrix<f64>,
    pub source: String,
}

impl DatasetMatrix {
    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }
}

/// Reads up to `limit` records from the batch files in order, mapping each
/// pixel byte `b` to `b / 127.5 - 1`. Labels are dropped.
pub fn read_cifar10(paths: &[PathBuf], limit: Option<usize>) -> Result<DatasetMatrix> {
    if paths.is_empty() {
        return Err(Error::EmptyInput("CIFAR-10 batch list"));
    }
    let mut pixels: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    let cap = limit.unwrap_or(usize::MAX);
    for path in paths {
        if rows >= cap {
            break;
        }
        let bytes = fs::read(path)?;
        if bytes.is_empty() || bytes.len() % RECORD_BYTES != 0 {
            return Err(Error::Format(format!(
                "{}: size {} is not a positive multiple of {RECORD_BYTES} (truncated or not a CIFAR-10 batch)",
                path.display(),
                bytes.len()
            )));
        }
        for record in bytes.chunks_exact(RECORD_BYTES) {
            if rows >= cap {
                break;
            }
            pixels.extend(record[1..].iter().map(|&b| b as f64 / 127.5 - 1.0));
            rows += 1;
        }
    }
    let source = paths
        .iter()
        .map(|p| p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned()))
        .collect::<Vec<_>>()
        .join(",");
    Ok(DatasetMatrix {
        values: DMatrix::from_row_slice(rows, PIXELS, &pixels),
        source: format!("cifar10:{source}"),
    })
}

/// The training batches present under `dir` (or `dir/cifar-10-batches-bin`).
pub fn cifar10_batch_files(dir: &Path) -> Result<Vec<PathBuf>> {
    for base in [dir.to_path_buf(), dir.join("cifar-10-batches-bin")] {
        let found: Vec<PathBuf> = TRAIN_BATCHES.iter().map(|n| base.join(n)).filter(|p| p.is_file()).collect();
        if !found.is_empty() {
            return Ok(found);
        }
    }
    Err(Error::Io(std::io::Error::new(
        std::io::ErrorKind::NotFound,
        format!("no CIFAR-10 training batches (data_batch_*.bin) under {}", dir.display()),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_batch(dir: &Path, name: &str, records: &[(u8, u8)]) -> PathBuf {
        let path = dir.join(name);
        let mut f = fs::File::create(&path).unwrap();
        for &(label, px) in records {
            f.write_all(&[label]).unwrap();
            f.write_all(&[px; PIXELS]).unwrap();
        }
        path
    }

    #[test]
    fn scaling_and_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_batch(dir.path(), "a.bin", &[(3, 0x00), (7, 0xFF), (1, 0x80)]);
        let m = read_cifar10(std::slice::from_ref(&p), None).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, PIXELS));
        assert!(m.values.row(0).iter().all(|&x| x == -1.0));
        assert!(m.values.row(1).iter().all(|&x| x == 1.0));
        assert!((m.values[(2, 5)] - (128.0 / 127.5 - 1.0)).abs() < 1e-15);
        assert_eq!(read_cifar10(&[p], Some(2)).unwrap().rows(), 2);
    }

    #[test]
    fn multiple_files_keep_order() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_batch(dir.path(), "data_batch_1.bin", &[(0, 10)]);
        let b = write_batch(dir.path(), "data_batch_2.bin", &[(0, 20), (0, 30)]);
        let m = read_cifar10(&[a, b], None).unwrap();
        assert_eq!(m.rows(), 3);
        assert!((m.values[(2, 0)] - (30.0 / 127.5 - 1.0)).abs() < 1e-15);
        assert_eq!(cifar10_batch_files(dir.path()).unwrap().len(), 2);
    }

    #[test]
    fn rejects_corrupted_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_batch(dir.path(), "bad.bin", &[(0, 1)]);
        let mut f = fs::OpenOptions::new().append(true).open(&p).unwrap();
        f.write_all(&[1, 2, 3]).unwrap();
        assert!(matches!(read_cifar10(&[p], None), Err(Error::Format(_))));
        assert!(cifar10_batch_files(&dir.path().join("missing")).is_err());
    }
}

//! Dataset ingestion and result files.

mod cifar;
mod spectrum_io;
mod summary;

pub use cifar::{cifar10_batch_files, read_cifar10, DatasetMatrix, PIXELS, RECORD_BYTES, TRAIN_BATCHES};
pub use spectrum_io::{
    format_f64, read_spectrum_bin, read_spectrum_csv, write_spectrum_bin, write_spectrum_csv, write_spectrum_rows,
    BINARY_MAGIC,
};
pub use summary::{read_run_summary, write_run_summary, RunSummary, SUMMARY_FIELDS};

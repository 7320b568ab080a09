//! Seeded ChaCha streams. Every random quantity draws from its own stream
//! `(seed, base + block)`, so blocks can be generated in any order or in
//! parallel with identical results.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::population::PowerLawSpectrum;

pub(crate) const STREAM_SKETCH: u64 = 0;
pub(crate) const STREAM_DATA: u64 = 1 << 32;
pub(crate) const STREAM_WICK: u64 = 2 << 32;
pub(crate) const STREAM_PROBE: u64 = 3 << 32;
/// Stage `t` of an iterated sketch or layer `t` of a network uses
/// `STREAM_STAGE + (t << 32)`.
pub(crate) const STREAM_STAGE: u64 = 4 << 32;

/// Rows per RNG block for matrix sampling.
pub(crate) const ROW_BLOCK: usize = 256;
pub const MAX_SKETCH_ENTRIES: u64 = 1_000_000_000;

pub(crate) fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub(crate) fn stage_stream(stage: usize) -> u64 {
    STREAM_STAGE + ((stage as u64) << 32)
}

/// A `rows × cols` matrix of iid `N(0, 1)` entries. Row block `b` comes from
/// stream `base + b`, so the first `r` rows do not depend on `rows`.
pub(crate) fn gaussian_matrix(rows: usize, cols: usize, seed: u64, base: u64) -> Result<DMatrix<f64>> {
    let entries = rows as u64 * cols as u64;
    if entries > MAX_SKETCH_ENTRIES {
        return Err(Error::SizeLimit {
            what: "gaussian matrix entries",
            limit: MAX_SKETCH_ENTRIES,
            got: entries,
        });
    }
    let mut row_major = vec![0.0; rows * cols];
    if cols > 0 {
        row_major
            .par_chunks_mut(ROW_BLOCK * cols)
            .enumerate()
            .for_each(|(b, chunk)| {
                let mut rng = stream(seed, base + b as u64);
                for x in chunk {
                    *x = StandardNormal.sample(&mut rng);
                }
            });
    }
    Ok(DMatrix::from_row_slice(rows, cols, &row_major))
}

/// A `v × d` sketch with iid standard Gaussian entries; deterministic in `seed`.
pub fn sample_sketch(v: usize, d: usize, seed: u64) -> Result<DMatrix<f64>> {
    if v == 0 || d == 0 {
        return Err(Error::EmptyInput("sketch dimensions"));
    }
    gaussian_matrix(v, d, seed, STREAM_SKETCH)
}

/// `n` Gaussian rows with covariance `diag(H)`.
pub fn power_law_samples(n: usize, h: &PowerLawSpectrum, seed: u64) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::EmptyInput("sample count"));
    }
    let mut x = gaussian_matrix(n, h.v(), seed, STREAM_DATA)?;
    for (mut col, lambda) in x.column_iter_mut().zip(h.eigenvalues()) {
        col *= lambda.sqrt();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_and_determinism() {
        let w = sample_sketch(1000, 1000, 17).unwrap();
        let n = w.len() as f64;
        let mean = w.sum() / n;
        let var = w.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        assert!(mean.abs() <= 5e-3, "{mean}");
        assert!((var - 1.0).abs() <= 0.01, "{var}");
        let h = PowerLawSpectrum::new(2.0, 4).unwrap();
        let x = power_law_samples(40_000, &h, 3).unwrap();
        let var3 = x.column(2).iter().map(|v| v * v).sum::<f64>() / 40_000.0;
        assert!((var3 / h.eigenvalues()[2] - 1.0).abs() < 0.03, "{var3}");
        assert_eq!(w, sample_sketch(1000, 1000, 17).unwrap());
        assert_ne!(w, sample_sketch(1000, 1000, 18).unwrap());
    }

    #[test]
    fn rows_are_prefix_stable() {
        let big = sample_sketch(700, 9, 4).unwrap();
        let small = sample_sketch(300, 9, 4).unwrap();
        assert_eq!(big.rows(0, 300), small.rows(0, 300));
    }

    #[test]
    fn size_limit() {
        assert!(matches!(
            sample_sketch(100_000, 100_000, 1),
            Err(Error::SizeLimit { .. })
        ));
    }
}

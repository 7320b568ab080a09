//! Population-level iterated sketches and the head-concentration diagnostic.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::rng::{gaussian_matrix, sample_sketch, stage_stream, stream, STREAM_PROBE};
use crate::error::{Error, Result};
use crate::population::PowerLawSpectrum;
use crate::spectral::{gram_spectrum, SpectrumEstimate, SpectrumMeta};

const POWER_ITERATIONS: usize = 100;

/// `Σ_0 = H`, `Σ_{t+1} = spec((1/d_t) W_tᵀ Σ_t W_t)` with fresh Gaussian `W_t`.
///
/// By rotation invariance of `W_t`, `Σ_t` is represented by its eigenvalues.
pub fn iterated_sketch(h: &PowerLawSpectrum, dims: &[usize], seed: u64) -> Result<Vec<SpectrumEstimate>> {
    iterated_sketch_with(h, dims, seed, |stage, rows, cols| {
        gaussian_matrix(rows, cols, seed, stage_stream(stage))
    })
}

/// [`iterated_sketch`] with caller-supplied sketch matrices
/// `sketcher(stage, rows, cols)`.
pub fn iterated_sketch_with(
    h: &PowerLawSpectrum,
    dims: &[usize],
    seed: u64,
    mut sketcher: impl FnMut(usize, usize, usize) -> Result<DMatrix<f64>>,
) -> Result<Vec<SpectrumEstimate>> {
    if dims.is_empty() {
        return Err(Error::EmptyInput("sketch dimensions"));
    }
    let mut sigma = h.eigenvalues().to_vec();
    let mut out = Vec::with_capacity(dims.len());
    for (t, &d) in dims.iter().enumerate() {
        if d == 0 || d > sigma.len() {
            return Err(Error::OutOfRange(format!(
                "stage {t} dimension {d} exceeds the previous stage dimension {}",
                sigma.len()
            )));
        }
        let w = sketcher(t, sigma.len(), d)?;
        if w.nrows() != sigma.len() || w.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: sigma.len() * d,
                got: w.nrows() * w.ncols(),
            });
        }
        let mut y = w;
        for (mut row, &s) in y.row_iter_mut().zip(&sigma) {
            row *= s.max(0.0).sqrt();
        }
        let eig = gram_spectrum(&y, 1.0 / d as f64)?;
        let meta = SpectrumMeta {
            label: format!("stage{}", t + 1),
            dims: std::iter::once(h.v()).chain(dims[..=t].iter().copied()).collect(),
            samples: None,
            activation: Some("identity".into()),
            distribution: None,
            seed: Some(seed),
            centered: false,
        };
        sigma = eig.clone();
        out.push(SpectrumEstimate::new(eig, meta));
    }
    Ok(out)
}

/// `‖(1/d) W_0 W_0ᵀ - I‖_op` for the first `k_star` rows `W_0` of the
/// `v × d` sketch drawn from `seed`, by power iteration.
pub fn head_concentration(v: usize, d: usize, k_star: usize, seed: u64) -> Result<f64> {
    if k_star == 0 || k_star > v {
        return Err(Error::OutOfRange(format!("k_star must be in 1..={v}, got {k_star}")));
    }
    // Sketch rows are prefix-stable, so only the head is generated.
    let w0 = sample_sketch(k_star, d, seed)?;
    let apply = |x: &DVector<f64>| -> DVector<f64> { (&w0 * (w0.tr_mul(x))) / d as f64 - x };
    let mut rng = stream(seed, STREAM_PROBE);
    let mut x = DVector::from_fn(k_star, |_, _| StandardNormal.sample(&mut rng));
    x /= x.norm();
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let y = apply(&x);
        estimate = y.norm();
        if estimate == 0.0 {
            return Ok(0.0);
        }
        x = y / estimate;
    }
    Ok(estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::slope_fit;

    #[test]
    fn identity_injection_returns_population() {
        let h = PowerLawSpectrum::new(1.31, 40).unwrap();
        let v = 40.0f64;
        let out = iterated_sketch_with(&h, &[40], 0, |_, r, c| Ok(DMatrix::identity(r, c) * v.sqrt())).unwrap();
        for (a, b) in out[0].eigenvalues.iter().zip(h.eigenvalues()) {
            assert!((a - b).abs() <= 1e-14 * b.max(1e-3), "{a} vs {b}");
        }
    }

    #[test]
    fn stage_ranks_and_slope() {
        let h = PowerLawSpectrum::new(1.31, 2000).unwrap();
        let out = iterated_sketch(&h, &[500], 42).unwrap();
        assert_eq!(out[0].len(), 500);
        assert_eq!(out[0].numerical_rank(1e-12), 500);
        let f = slope_fit(&out[0].eigenvalues, 5, 50).unwrap();
        assert!((f.slope + 1.31).abs() <= 0.12, "{}", f.slope);
    }

    #[test]
    fn rejects_growing_dims() {
        let h = PowerLawSpectrum::new(2.0, 50).unwrap();
        assert!(iterated_sketch(&h, &[60], 0).is_err());
        assert!(iterated_sketch(&h, &[30, 40], 0).is_err());
        assert!(iterated_sketch(&h, &[], 0).is_err());
    }

    #[test]
    fn head_concentration_single_row() {
        let (v, d) = (10, 300);
        let w = sample_sketch(v, d, 6).unwrap();
        let want = (w.row(0).norm_squared() / d as f64 - 1.0).abs();
        let got = head_concentration(v, d, 1, 6).unwrap();
        assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
    }

    #[test]
    fn head_concentrates_for_small_k() {
        let d = 4000usize;
        let k = (0.1 * d as f64 / (d as f64).ln()).floor() as usize;
        for seed in 0..20 {
            assert!(head_concentration(d, d, k, seed).unwrap() < 0.5, "seed {seed}");
        }
    }
}

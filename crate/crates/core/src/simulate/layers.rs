//! Forward propagation through randomly initialized dense layers, with the
//! centered sample covariance spectrum and slope of every layer.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::activation::Activation;
use super::rng::{gaussian_matrix, stage_stream};
use crate::error::{Error, Result};
use crate::spectral::{check_finite, gram_spectrum, slope_fit, SlopeFit, SpectrumEstimate, SpectrumMeta};

pub const MAX_LAYER_WIDTH: usize = 4096;
const MATMUL_ROW_BLOCK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    None,
    /// Per-sample division by the root mean square.
    RmsNorm,
    /// Per-sample centering and division by the standard deviation.
    LayerNorm,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::None => "none",
            Normalization::RmsNorm => "rmsnorm",
            Normalization::LayerNorm => "layernorm",
        })
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Normalization::None),
            "rmsnorm" | "rms" => Ok(Normalization::RmsNorm),
            "layernorm" | "ln" => Ok(Normalization::LayerNorm),
            _ => Err(Error::InvalidArgument(format!("unknown normalization `{s}`"))),
        }
    }
}

impl Normalization {
    /// Normalizes each row of `z` in place.
    pub fn apply(self, z: &mut DMatrix<f64>) {
        if self == Normalization::None {
            return;
        }
        let n = z.ncols() as f64;
        for mut row in z.row_iter_mut() {
            let mean = if self == Normalization::LayerNorm { row.sum() / n } else { 0.0 };
            row.add_scalar_mut(-mean);
            let rms = (row.norm_squared() / n).sqrt();
            row /= rms;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub width: usize,
    pub activation: Activation,
    pub normalization: Normalization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerResult {
    pub spectrum: SpectrumEstimate,
    pub fit: SlopeFit,
}

/// `a · b` with row blocks of `a` multiplied in parallel.
pub(crate) fn par_matmul(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let blocks: Vec<DMatrix<f64>> = (0..n.div_ceil(MATMUL_ROW_BLOCK))
        .into_par_iter()
        .map(|i| {
            let start = i * MATMUL_ROW_BLOCK;
            a.rows(start, MATMUL_ROW_BLOCK.min(n - start)) * b
        })
        .collect();
    let mut out = DMatrix::zeros(n, b.ncols());
    for (i, blk) in blocks.iter().enumerate() {
        out.rows_mut(i * MATMUL_ROW_BLOCK, blk.nrows()).copy_from(blk);
    }
    out
}

/// Eigenvalues of the (optionally centered) sample covariance of the rows of
/// `x`; the length is `min(n, cols)`.
pub fn sample_covariance_spectrum(x: &DMatrix<f64>, centered: bool) -> Result<Vec<f64>> {
    let n = x.nrows();
    if n == 0 {
        return Err(Error::EmptyInput("data matrix"));
    }
    let mut xc = x.clone();
    if centered {
        let mean = xc.row_mean();
        for mut row in xc.row_iter_mut() {
            row -= &mean;
        }
    }
    gram_spectrum(&xc, 1.0 / n as f64)
}

/// Propagates the rows of `x` (`n × v`) through `layers`. Layer `t` draws
/// `W_t ~ N(0, 1/fan_in)` from its own stream, applies the activation and
/// normalization, and reports the spectrum of the centered covariance of its
/// output with a slope fit over `fit_range`.
pub fn propagate_layers(
    x: &DMatrix<f64>,
    layers: &[LayerSpec],
    seed: u64,
    fit_range: (usize, usize),
) -> Result<Vec<LayerResult>> {
    if layers.is_empty() {
        return Err(Error::EmptyInput("layer list"));
    }
    check_finite(x, "layer input")?;
    let mut a = x.clone();
    let mut out = Vec::with_capacity(layers.len());
    for (t, layer) in layers.iter().enumerate() {
        if layer.width == 0 || layer.width > MAX_LAYER_WIDTH {
            return Err(Error::OutOfRange(format!(
                "layer {} width {} must be in 1..={MAX_LAYER_WIDTH}",
                t + 1,
                layer.width
            )));
        }
        let fan_in = a.ncols();
        let w = gaussian_matrix(fan_in, layer.width, seed, stage_stream(t))? / (fan_in as f64).sqrt();
        let mut z = par_matmul(&a, &w);
        z.apply(|y| *y = layer.activation.apply(*y));
        layer.normalization.apply(&mut z);
        check_finite(&z, "layer activations")?;
        let eig = sample_covariance_spectrum(&z, true)?;
        let fit = slope_fit(&eig, fit_range.0, fit_range.1.min(eig.len()))?;
        let meta = SpectrumMeta {
            label: format!("layer{}", t + 1),
            dims: vec![z.nrows(), layer.width],
            samples: Some(z.nrows()),
            activation: Some(format!("{}+{}", layer.activation, layer.normalization)),
            distribution: None,
            seed: Some(seed),
            centered: true,
        };
        out.push(LayerResult {
            spectrum: SpectrumEstimate::new(eig, meta),
            fit,
        });
        a = z;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{sym_eigenvalues, SymmetricMatrix};

    fn data(n: usize, v: usize, seed: u64) -> DMatrix<f64> {
        let mut x = gaussian_matrix(n, v, seed, 99).unwrap();
        for (j, mut col) in x.column_iter_mut().enumerate() {
            col *= ((j + 1) as f64).powf(-1.31 / 2.0);
        }
        x
    }

    #[test]
    fn identity_layer_matches_linear_map() {
        let x = data(300, 80, 1);
        let spec = LayerSpec {
            width: 50,
            activation: Activation::Monomial(1),
            normalization: Normalization::None,
        };
        let out = propagate_layers(&x, &[spec], 4, (1, 20)).unwrap();
        let w = gaussian_matrix(80, 50, 4, stage_stream(0)).unwrap();
        let mut xc = x.clone();
        let mean = xc.row_mean();
        for mut r in xc.row_iter_mut() {
            r -= &mean;
        }
        let s = xc.tr_mul(&xc) / 300.0;
        let want = sym_eigenvalues(&SymmetricMatrix::symmetrized(w.transpose() * s * &w / 80.0).unwrap()).unwrap();
        for (a, b) in out[0].spectrum.eigenvalues.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-10 * want[0], "{a} vs {b}");
        }
    }

    #[test]
    fn normalization_contracts() {
        let mut z = data(20, 64, 2);
        Normalization::LayerNorm.apply(&mut z);
        for row in z.row_iter() {
            let mean = row.sum() / 64.0;
            let var = row.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 64.0;
            assert!(mean.abs() <= 1e-10);
            assert!((var - 1.0).abs() <= 1e-8);
        }
        let mut z = data(20, 64, 3);
        Normalization::RmsNorm.apply(&mut z);
        for row in z.row_iter() {
            assert!(((row.norm_squared() / 64.0).sqrt() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn wide_layer_uses_gram_side() {
        let x = data(40, 30, 5);
        let spec = LayerSpec {
            width: 100,
            activation: Activation::Tanh,
            normalization: Normalization::RmsNorm,
        };
        let out = propagate_layers(&x, &[spec, spec], 1, (1, 20)).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].spectrum.len(), 40);
        assert!(out[1].spectrum.meta.activation.as_deref() == Some("tanh+rmsnorm"));
    }

    #[test]
    fn linear_layers_keep_the_slope() {
        let x = data(3000, 400, 7);
        let spec = LayerSpec {
            width: 300,
            activation: Activation::Monomial(1),
            normalization: Normalization::None,
        };
        let out = propagate_layers(&x, &[spec, spec], 11, (5, 50)).unwrap();
        for r in &out {
            assert!((r.fit.slope + 1.31).abs() <= 0.1, "{}", r.fit.slope);
        }
    }
}

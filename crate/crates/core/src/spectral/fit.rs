use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 10;
const TINY: f64 = 1e-300;

/// Ordinary least squares of `log λ_j` on `log j` over `j_min..=j_max`
/// (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub j_min: usize,
    pub j_max: usize,
    pub points_used: usize,
}

/// Fits `log λ_j = intercept + slope · log j`; entries `≤ 1e-300` are skipped.
pub fn slope_fit(eigs: &[f64], j_min: usize, j_max: usize) -> Result<SlopeFit> {
    if j_min == 0 || j_min > j_max {
        return Err(Error::InvalidArgument(format!("bad fit range {j_min}..={j_max}")));
    }
    if j_max > eigs.len() {
        return Err(Error::OutOfRange(format!(
            "fit range ends at {j_max} but only {} eigenvalues are available",
            eigs.len()
        )));
    }
    let pts: Vec<(f64, f64)> = (j_min..=j_max)
        .filter(|&j| eigs[j - 1] > TINY)
        .map(|j| ((j as f64).ln(), eigs[j - 1].ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            got: pts.len(),
            need: MIN_FIT_POINTS,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        j_min,
        j_max,
        points_used: pts.len(),
    })
}

/// `λ_j / λ_1`.
pub fn normalize_top(eigs: &[f64]) -> Result<Vec<f64>> {
    match eigs.first() {
        Some(&top) if top > 0.0 => {
            let mut out: Vec<f64> = eigs.iter().map(|x| x / top).collect();
            out[0] = 1.0;
            Ok(out)
        }
        Some(&top) => Err(Error::Domain(format!("top eigenvalue must be positive, got {top}"))),
        None => Err(Error::EmptyInput("spectrum")),
    }
}

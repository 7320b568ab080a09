use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::rng::{stream, STREAM_WICK};
use crate::combinatorics::{wick_product_value, Composition};
use crate::error::{Error, Result};

pub const MIN_WICK_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WickMoments {
    pub mean: f64,
    pub variance: f64,
    /// `|corr|` between the product on coordinates `(1..ℓ)` and on the
    /// shifted coordinates `(2..ℓ+1)`.
    pub max_cross_correlation: f64,
}

/// Sample mean and variance of `:Π g_j^{π_j}:` over `m` draws, plus its
/// correlation with the same product on a shifted index tuple.
pub fn wick_empirical_moments(composition: &Composition, m: usize, seed: u64) -> Result<WickMoments> {
    if m < MIN_WICK_SAMPLES {
        return Err(Error::OutOfRange(format!("need at least {MIN_WICK_SAMPLES} samples, got {m}")));
    }
    let l = composition.len();
    let mut rng = stream(seed, STREAM_WICK);
    let mut g = vec![0.0; l + 1];
    let (mut a_sum, mut b_sum, mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..m {
        for x in g.iter_mut() {
            *x = StandardNormal.sample(&mut rng);
        }
        let a = wick_product_value(composition, &g[..l])?;
        let b = wick_product_value(composition, &g[1..])?;
        a_sum += a;
        b_sum += b;
        aa += a * a;
        bb += b * b;
        ab += a * b;
    }
    let n = m as f64;
    let (ma, mb) = (a_sum / n, b_sum / n);
    let var_a = aa / n - ma * ma;
    let var_b = bb / n - mb * mb;
    let cov = ab / n - ma * mb;
    Ok(WickMoments {
        mean: ma,
        variance: var_a * n / (n - 1.0),
        max_cross_correlation: (cov / (var_a * var_b).sqrt()).abs(),
    })
}

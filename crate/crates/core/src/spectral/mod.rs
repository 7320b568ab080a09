//! Dense symmetric spectra, the Gram reduction, and log-log slope fits.

mod eigen;
mod fit;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fit::{normalize_top, slope_fit, SlopeFit, MIN_FIT_POINTS};

pub const MAX_EIGEN_DIM: usize = 8000;

/// A square matrix whose asymmetry is within `1e-12 · ‖A‖_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
}

impl SymmetricMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        check_finite(&m, "symmetric matrix")?;
        let n = m.nrows();
        let mut asym: f64 = 0.0;
        for j in 0..n {
            for i in 0..j {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        let tolerance = 1e-12 * m.norm();
        if asym > tolerance {
            return Err(Error::NotSymmetric {
                asymmetry: asym,
                tolerance,
            });
        }
        Ok(Self { inner: m })
    }

    /// Symmetrizes `(A + Aᵀ)/2` first; for matrices symmetric up to rounding.
    pub fn symmetrized(mut m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == m.ncols() {
            let n = m.nrows();
            for j in 0..n {
                for i in 0..j {
                    let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
                    m[(i, j)] = avg;
                    m[(j, i)] = avg;
                }
            }
        }
        Self::new(m)
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }
}

pub(crate) fn check_finite(m: &DMatrix<f64>, context: &'static str) -> Result<()> {
    match m.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { context, index }),
        None => Ok(()),
    }
}

/// All eigenvalues, descending. Negative values are kept.
pub fn sym_eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    if n > MAX_EIGEN_DIM {
        return Err(Error::SizeLimit {
            what: "eigenproblem dimension",
            limit: MAX_EIGEN_DIM as u64,
            got: n as u64,
        });
    }
    // Column-major storage of a symmetric matrix is also its row-major storage.
    eigen::symmetric_eigenvalues_row_major(m.matrix().as_slice().to_vec(), n)
}

/// Eigenvalues of `scale · FᵀF`, computed from whichever of `FᵀF` and `FFᵀ`
/// is smaller. The result has length `min(m, d)`.
pub fn gram_spectrum(f: &DMatrix<f64>, scale: f64) -> Result<Vec<f64>> {
    if f.nrows() == 0 || f.ncols() == 0 {
        return Err(Error::EmptyInput("gram matrix factor"));
    }
    check_finite(f, "gram matrix factor")?;
    let gram = if f.nrows() >= f.ncols() {
        f.tr_mul(f)
    } else {
        f * f.transpose()
    };
    let mut eig = sym_eigenvalues(&SymmetricMatrix::symmetrized(gram)?)?;
    for x in &mut eig {
        *x *= scale;
    }
    Ok(eig)
}

/// Where a spectrum came from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub label: String,
    pub dims: Vec<usize>,
    pub samples: Option<usize>,
    pub activation: Option<String>,
    pub distribution: Option<String>,
    pub seed: Option<u64>,
    pub centered: bool,
}

/// A descending eigenvalue vector together with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub eigenvalues: Vec<f64>,
    pub meta: SpectrumMeta,
}

impl SpectrumEstimate {
    pub fn new(eigenvalues: Vec<f64>, meta: SpectrumMeta) -> Self {
        Self { eigenvalues, meta }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Entries above `tol · λ_1`.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        let top = self.eigenvalues.first().copied().unwrap_or(0.0);
        self.eigenvalues.iter().filter(|&&x| x > tol * top).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
    }

    fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        random(n, n, rng).qr().q()
    }

    fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    #[test]
    fn small_examples() {
        let d = SymmetricMatrix::from_diagonal(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(sym_eigenvalues(&d).unwrap(), vec![3.0, 2.0, 1.0]);
        let s = SymmetricMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let e = sym_eigenvalues(&s).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-15 && (e[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.1, 1.0]);
        assert!(matches!(SymmetricMatrix::new(m), Err(Error::NotSymmetric { .. })));
        let m = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, f64::NAN, 1.0]);
        assert!(matches!(SymmetricMatrix::new(m), Err(Error::NonFinite { .. })));
        assert!(SymmetricMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn recovers_planted_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 50;
        let lambda: Vec<f64> = (0..n).map(|i| 10.0 - 0.37 * i as f64).collect();
        let q = random_orthogonal(n, &mut rng);
        let a = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambda.clone())) * q.transpose();
        let got = sym_eigenvalues(&SymmetricMatrix::symmetrized(a).unwrap()).unwrap();
        for (g, w) in got.iter().zip(&lambda) {
            assert!((g - w).abs() <= 1e-9, "{g} vs {w}");
        }
    }

    #[test]
    fn agrees_with_nalgebra_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1, 2, 3, 7, 40, 193, 260] {
            let b = random(n, n, &mut rng);
            let a = SymmetricMatrix::symmetrized(&b + b.transpose()).unwrap();
            let ours = sym_eigenvalues(&a).unwrap();
            let theirs = sorted_desc(SymmetricEigen::new(a.matrix().clone()).eigenvalues.as_slice().to_vec());
            let scale = theirs.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x - y).abs() <= 1e-10 * scale, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn trace_and_psd_floor_on_random_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let n = rng.random_range(1..=200);
            let k = rng.random_range(1..=n);
            let f = random(k, n, &mut rng);
            let a = SymmetricMatrix::symmetrized(f.tr_mul(&f)).unwrap();
            let e = sym_eigenvalues(&a).unwrap();
            let tr = a.trace();
            let sum: f64 = e.iter().sum();
            assert!((sum - tr).abs() <= 1e-8 * (1.0 + tr.abs()), "n={n}");
            assert!(*e.last().unwrap() >= -1e-8 * e[0], "n={n}: {}", e.last().unwrap());
            assert!(e.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn gram_examples() {
        let f = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        assert_eq!(gram_spectrum(&f, 1.0).unwrap(), vec![4.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = random_orthogonal(12, &mut rng);
        let rows = q.rows(0, 5).into_owned();
        for x in gram_spectrum(&rows, 1.0).unwrap() {
            assert!((x - 1.0).abs() < 1e-12);
        }
        let bad = DMatrix::from_row_slice(1, 2, &[1.0, f64::INFINITY]);
        assert!(matches!(gram_spectrum(&bad, 1.0), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn gram_orders_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (m, d) in [(20, 7), (7, 20), (500, 100), (100, 500)] {
            let f = random(m, d, &mut rng);
            let scale = 1.0 / d as f64;
            let fast = gram_spectrum(&f, scale).unwrap();
            assert_eq!(fast.len(), m.min(d));
            let full = SymmetricMatrix::symmetrized(f.tr_mul(&f) * scale).unwrap();
            let slow = sym_eigenvalues(&full).unwrap();
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-8 * slow[0]), "{m}x{d}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn numerical_rank() {
        let s = SpectrumEstimate::new(vec![2.0, 1.0, 1e-20, 0.0], SpectrumMeta::default());
        assert_eq!(s.numerical_rank(1e-10), 2);
    }
}

//! Random-feature covariances `(1/d) E_x[f(Wᵀx) f(Wᵀx)ᵀ]`: Monte Carlo
//! estimates and the exact Gaussian-kernel form.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use rayon::prelude::*;

use super::activation::Activation;
use super::rng::{sample_sketch, stream, STREAM_DATA};
use crate::combinatorics::pairing_class_counts;
use crate::error::{Error, Result};
use crate::population::PowerLawSpectrum;
use crate::spectral::{gram_spectrum, sym_eigenvalues, SpectrumEstimate, SpectrumMeta, SymmetricMatrix};

/// Samples per RNG block and per accumulation unit.
const SAMPLE_BLOCK: usize = 512;
/// Blocks summed per deterministic reduction group.
const GROUP: usize = 16;
pub const MAX_EXACT_DIM: usize = 2000;
pub const MAX_EXACT_DEGREE: u32 = 6;
pub const MIN_SAMPLES: usize = 100;

/// Law of the data `x = H^{1/2} u` with iid unit-variance `u`, or rows of an
/// external `n × v` matrix used as-is.
#[derive(Debug, Clone, PartialEq)]
pub enum DataDistribution {
    Gaussian,
    Rademacher,
    /// Student-t with `ν > 4`, rescaled by `√((ν-2)/ν)` to unit variance.
    StudentT {
        nu: f64,
    },
    External(Arc<DMatrix<f64>>),
}

impl fmt::Display for DataDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataDistribution::Gaussian => write!(f, "gaussian"),
            DataDistribution::Rademacher => write!(f, "rademacher"),
            DataDistribution::StudentT { nu } => write!(f, "student_t({nu})"),
            DataDistribution::External(m) => write!(f, "external({}x{})", m.nrows(), m.ncols()),
        }
    }
}

/// Accepts `gaussian`, `rademacher`, and `student-t:NU` (also `t:NU` or
/// `student_t(NU)`).
impl std::str::FromStr for DataDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "gaussian" | "normal" => return Ok(DataDistribution::Gaussian),
            "rademacher" => return Ok(DataDistribution::Rademacher),
            _ => {}
        }
        let nu = t
            .strip_prefix("student-t:")
            .or_else(|| t.strip_prefix("t:"))
            .or_else(|| t.strip_prefix("student_t(").and_then(|r| r.strip_suffix(')')));
        match nu.map(str::parse::<f64>) {
            Some(Ok(nu)) => Ok(DataDistribution::StudentT { nu }),
            _ => Err(Error::InvalidArgument(format!(
                "unknown distribution `{s}` (expected gaussian, rademacher or student-t:NU)"
            ))),
        }
    }
}

impl DataDistribution {
    /// Rows `start..start + rows` of the sample stream, as a `rows × v` block.
    fn block(&self, h_sqrt: &[f64], start: usize, rows: usize, seed: u64, block: usize) -> DMatrix<f64> {
        let v = h_sqrt.len();
        if let DataDistribution::External(x) = self {
            return x.rows(start, rows).into_owned();
        }
        let mut rng = stream(seed, STREAM_DATA + block as u64);
        let mut out = DMatrix::zeros(rows, v);
        let t = match self {
            DataDistribution::StudentT { nu } => Some((StudentT::new(*nu).expect("validated ν"), ((nu - 2.0) / nu).sqrt())),
            _ => None,
        };
        // Row-major draw order keeps a sample's coordinates contiguous in the stream.
        for i in 0..rows {
            for (j, &s) in h_sqrt.iter().enumerate() {
                let u: f64 = match (self, &t) {
                    (DataDistribution::Rademacher, _) => {
                        if rng.random::<bool>() {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                    (DataDistribution::StudentT { .. }, Some((dist, scale))) => dist.sample(&mut rng) * scale,
                    _ => StandardNormal.sample(&mut rng),
                };
                out[(i, j)] = s * u;
            }
        }
        out
    }
}

/// A Monte Carlo random-feature experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RFConfig {
    pub v: usize,
    pub d: usize,
    pub m: usize,
    pub alpha: f64,
    pub activation: Activation,
    pub distribution: DataDistribution,
    pub seed: u64,
    /// Subtract the empirical feature mean before forming the covariance.
    pub centered: bool,
    /// Fixed-order reduction; otherwise a parallel tree reduction.
    pub deterministic: bool,
}

impl RFConfig {
    /// Gaussian data, seed 0, uncentered, deterministic.
    pub fn new(v: usize, d: usize, m: usize, alpha: f64, activation: Activation) -> Self {
        Self {
            v,
            d,
            m,
            alpha,
            activation,
            distribution: DataDistribution::Gaussian,
            seed: 0,
            centered: false,
            deterministic: true,
        }
    }

    /// Every violated precondition.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.d == 0 {
            out.push("d must be positive".to_string());
        }
        if self.v < self.d {
            out.push(format!("v ({}) must be at least d ({})", self.v, self.d));
        }
        if self.m < MIN_SAMPLES {
            out.push(format!("m ({}) must be at least {MIN_SAMPLES}", self.m));
        }
        if !(self.alpha.is_finite() && self.alpha > 1.0) {
            out.push(format!("alpha ({}) must exceed 1", self.alpha));
        }
        match &self.distribution {
            DataDistribution::StudentT { nu } if !(*nu > 4.0) => {
                out.push(format!("student-t degrees of freedom ({nu}) must exceed 4"));
            }
            DataDistribution::External(x) => {
                if x.ncols() != self.v {
                    out.push(format!("external data has {} columns, v is {}", x.ncols(), self.v));
                }
                if x.nrows() < self.m {
                    out.push(format!("external data has {} rows, m is {}", x.nrows(), self.m));
                }
            }
            _ => {}
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(p.join("; ")))
        }
    }

    pub fn population(&self) -> Result<PowerLawSpectrum> {
        PowerLawSpectrum::new(self.alpha, self.v)
    }

    fn meta(&self, label: &str) -> SpectrumMeta {
        SpectrumMeta {
            label: label.to_string(),
            dims: vec![self.v, self.d],
            samples: Some(self.m),
            activation: Some(self.activation.to_string()),
            distribution: Some(self.distribution.to_string()),
            seed: Some(self.seed),
            centered: self.centered,
        }
    }
}

struct Features {
    w: DMatrix<f64>,
    h_sqrt: Vec<f64>,
}

impl Features {
    fn new(cfg: &RFConfig, w: &DMatrix<f64>, h: &PowerLawSpectrum) -> Result<Self> {
        if w.nrows() != cfg.v || w.ncols() != cfg.d {
            return Err(Error::DimensionMismatch {
                expected: cfg.v * cfg.d,
                got: w.nrows() * w.ncols(),
            });
        }
        if h.v() != cfg.v {
            return Err(Error::DimensionMismatch {
                expected: cfg.v,
                got: h.v(),
            });
        }
        Ok(Self {
            w: w.clone(),
            h_sqrt: h.eigenvalues().iter().map(|x| x.sqrt()).collect(),
        })
    }

    /// `f(X_b W)` for sample block `b`. A feature whose square overflows is
    /// rejected, naming the sample.
    fn block(&self, cfg: &RFConfig, b: usize) -> Result<DMatrix<f64>> {
        let start = b * SAMPLE_BLOCK;
        let rows = SAMPLE_BLOCK.min(cfg.m - start);
        let x = cfg.distribution.block(&self.h_sqrt, start, rows, cfg.seed, b);
        let mut f = x * &self.w;
        f.apply(|y| *y = cfg.activation.apply(*y));
        if let Some(pos) = f.iter().position(|y| !(y * y).is_finite()) {
            return Err(Error::NonFinite {
                context: "random features",
                index: start + pos % rows,
            });
        }
        Ok(f)
    }
}

/// Sufficient statistics of a feature block: `FᵀF` and column sums.
type Moments = (DMatrix<f64>, DVector<f64>);

fn block_moments(f: &DMatrix<f64>) -> Moments {
    let sums = f.row_sum().transpose();
    (f.tr_mul(f), sums)
}

fn add(mut a: Moments, b: Moments) -> Moments {
    a.0 += b.0;
    a.1 += b.1;
    a
}

fn accumulate(cfg: &RFConfig, feats: &Features) -> Result<Moments> {
    let blocks = cfg.m.div_ceil(SAMPLE_BLOCK);
    let zero = || (DMatrix::zeros(cfg.d, cfg.d), DVector::zeros(cfg.d));
    if cfg.deterministic {
        let mut acc = zero();
        for group in (0..blocks).collect::<Vec<_>>().chunks(GROUP) {
            let parts: Vec<Moments> = group
                .par_iter()
                .map(|&b| feats.block(cfg, b).map(|f| block_moments(&f)))
                .collect::<Result<_>>()?;
            for part in parts {
                acc = add(acc, part);
            }
        }
        Ok(acc)
    } else {
        (0..blocks)
            .into_par_iter()
            .map(|b| feats.block(cfg, b).map(|f| block_moments(&f)))
            .try_reduce(zero, |a, b| Ok(add(a, b)))
    }
}

/// The `d × d` Monte Carlo covariance `(1/d)(1/m) Σ_i f_i f_iᵀ` for a given sketch.
pub fn mc_covariance_matrix(cfg: &RFConfig, w: &DMatrix<f64>, h: &PowerLawSpectrum) -> Result<SymmetricMatrix> {
    cfg.validate()?;
    let feats = Features::new(cfg, w, h)?;
    let (mut g, sums) = accumulate(cfg, &feats)?;
    let m = cfg.m as f64;
    if cfg.centered {
        let mean = sums / m;
        g -= (&mean * mean.transpose()) * m;
    }
    g /= m * cfg.d as f64;
    SymmetricMatrix::symmetrized(g)
}

/// Monte Carlo spectrum for a given sketch. With `m < d` the `m × m` Gram
/// matrix of the features is diagonalized instead.
pub fn mc_covariance_with(cfg: &RFConfig, w: &DMatrix<f64>, h: &PowerLawSpectrum) -> Result<SpectrumEstimate> {
    cfg.validate()?;
    let eigenvalues = if cfg.m < cfg.d {
        let feats = Features::new(cfg, w, h)?;
        let blocks: Vec<DMatrix<f64>> = (0..cfg.m.div_ceil(SAMPLE_BLOCK))
            .into_par_iter()
            .map(|b| feats.block(cfg, b))
            .collect::<Result<_>>()?;
        let mut f = DMatrix::zeros(cfg.m, cfg.d);
        for (b, blk) in blocks.iter().enumerate() {
            f.rows_mut(b * SAMPLE_BLOCK, blk.nrows()).copy_from(blk);
        }
        if cfg.centered {
            let mean = f.row_mean();
            for mut row in f.row_iter_mut() {
                row -= &mean;
            }
        }
        let mut e = gram_spectrum(&f, 1.0 / (cfg.m as f64 * cfg.d as f64))?;
        e.resize(cfg.d, 0.0);
        e
    } else {
        sym_eigenvalues(&mc_covariance_matrix(cfg, w, h)?)?
    };
    Ok(SpectrumEstimate::new(eigenvalues, cfg.meta("mc")))
}

/// Samples the sketch from `cfg.seed` and returns the Monte Carlo spectrum.
pub fn mc_covariance(cfg: &RFConfig) -> Result<SpectrumEstimate> {
    cfg.validate()?;
    let w = sample_sketch(cfg.v, cfg.d, cfg.seed)?;
    mc_covariance_with(cfg, &w, &cfg.population()?)
}

/// `K_ij = (1/d) E_z[(y_iᵀz)^p (y_jᵀz)^p]` with `y_i = H^{1/2} W_{:,i}`.
pub fn exact_population_covariance(w: &DMatrix<f64>, h: &PowerLawSpectrum, p: u32) -> Result<SymmetricMatrix> {
    if w.nrows() != h.v() {
        return Err(Error::DimensionMismatch {
            expected: h.v(),
            got: w.nrows(),
        });
    }
    let d = w.ncols();
    if d == 0 {
        return Err(Error::EmptyInput("sketch columns"));
    }
    if d > MAX_EXACT_DIM {
        return Err(Error::SizeLimit {
            what: "exact covariance dimension",
            limit: MAX_EXACT_DIM as u64,
            got: d as u64,
        });
    }
    if p == 0 || p > MAX_EXACT_DEGREE {
        return Err(Error::OutOfRange(format!("degree must be in 1..={MAX_EXACT_DEGREE}, got {p}")));
    }
    let mut y = w.clone();
    for (mut row, &hj) in y.row_iter_mut().zip(h.eigenvalues()) {
        row *= hj.sqrt();
    }
    let g = y.tr_mul(&y);
    let table = pairing_class_counts(p)?;
    let scale = 1.0 / d as f64;
    let k = DMatrix::from_fn(d, d, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        scale * table.kernel_from_inner_products(g[(a, a)], g[(b, b)], g[(a, b)])
    });
    SymmetricMatrix::new(k)
}

/// Spectrum of [`exact_population_covariance`] for the sketch drawn from `seed`.
pub fn exact_spectrum(v: usize, d: usize, alpha: f64, p: u32, seed: u64) -> Result<SpectrumEstimate> {
    let h = PowerLawSpectrum::new(alpha, v)?;
    let w = sample_sketch(v, d, seed)?;
    let k = exact_population_covariance(&w, &h, p)?;
    let meta = SpectrumMeta {
        label: "exact".into(),
        dims: vec![v, d],
        samples: None,
        activation: Some(Activation::Monomial(p).to_string()),
        distribution: Some("gaussian".into()),
        seed: Some(seed),
        centered: false,
    };
    Ok(SpectrumEstimate::new(sym_eigenvalues(&k)?, meta))
}

/// Relative Frobenius distance `‖A - B‖_F / ‖B‖_F`.
pub fn relative_frobenius(a: &SymmetricMatrix, b: &SymmetricMatrix) -> f64 {
    (a.matrix() - b.matrix()).norm() / b.matrix().norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: usize, d: usize, m: usize, act: Activation) -> RFConfig {
        RFConfig {
            seed: 3,
            ..RFConfig::new(v, d, m, 1.31, act)
        }
    }

    #[test]
    fn linear_features_match_sample_covariance() {
        let c = cfg(60, 30, 700, Activation::Monomial(1));
        let h = c.population().unwrap();
        let w = sample_sketch(c.v, c.d, 1).unwrap();
        let k = mc_covariance_matrix(&c, &w, &h).unwrap();
        // Rebuild the data explicitly and form (1/d) Wᵀ Ŝ W.
        let feats = Features::new(&c, &w, &h).unwrap();
        let mut x = DMatrix::zeros(c.m, c.v);
        for b in 0..c.m.div_ceil(SAMPLE_BLOCK) {
            let rows = SAMPLE_BLOCK.min(c.m - b * SAMPLE_BLOCK);
            let blk = c.distribution.block(&feats.h_sqrt, b * SAMPLE_BLOCK, rows, c.seed, b);
            x.rows_mut(b * SAMPLE_BLOCK, rows).copy_from(&blk);
        }
        let s = x.tr_mul(&x) / c.m as f64;
        let want = w.transpose() * s * &w / c.d as f64;
        let got = sym_eigenvalues(&k).unwrap();
        let exp = sym_eigenvalues(&SymmetricMatrix::symmetrized(want).unwrap()).unwrap();
        for (a, b) in got.iter().zip(&exp) {
            assert!((a - b).abs() <= 1e-10 * exp[0], "{a} vs {b}");
        }
    }

    #[test]
    fn constant_activation_is_rank_one() {
        let c = cfg(50, 20, 300, Activation::Monomial(0));
        let s = mc_covariance(&c).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(s.eigenvalues[1].abs() / s.eigenvalues[0] <= 1e-12);
    }

    #[test]
    fn deterministic_and_fast_modes_agree() {
        let mut c = cfg(40, 40, 5000, Activation::Monomial(2));
        let a = mc_covariance(&c).unwrap();
        assert_eq!(a, mc_covariance(&c).unwrap());
        c.deterministic = false;
        let b = mc_covariance(&c).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() <= 1e-12 * a.eigenvalues[0]);
        }
    }

    #[test]
    fn gram_route_matches_full_route() {
        // m < d takes the Gram route; the d × d matrix is formed directly for comparison.
        let c = cfg(120, 120, 100, Activation::Tanh);
        let h = c.population().unwrap();
        let w = sample_sketch(120, 120, 2).unwrap();
        let gram = mc_covariance_with(&c, &w, &h).unwrap();
        let direct = sym_eigenvalues(&mc_covariance_matrix(&c, &w, &h).unwrap()).unwrap();
        assert_eq!(gram.eigenvalues.len(), 120);
        for (a, b) in gram.eigenvalues.iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-9 * direct[0], "{a} vs {b}");
        }
    }

    #[test]
    fn centered_removes_mean_direction() {
        let mut c = cfg(50, 20, 400, Activation::Monomial(0));
        c.centered = true;
        let s = mc_covariance(&c).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-12);
    }

    #[test]
    fn heavy_tails_overflow_is_reported() {
        let mut c = cfg(20, 10, 200, Activation::Monomial(200));
        c.distribution = DataDistribution::StudentT { nu: 4.5 };
        let err = mc_covariance(&c).unwrap_err();
        assert!(matches!(err, Error::NonFinite { context: "random features", .. }), "{err}");
    }

    #[test]
    fn config_problems_are_exhaustive() {
        let mut c = RFConfig::new(10, 20, 5, 0.5, Activation::Relu);
        c.distribution = DataDistribution::StudentT { nu: 3.0 };
        assert_eq!(c.problems().len(), 4);
        assert!(c.validate().is_err());
    }

    #[test]
    fn distribution_names() {
        for (s, d) in [
            ("gaussian", DataDistribution::Gaussian),
            ("Rademacher", DataDistribution::Rademacher),
            ("student-t:5", DataDistribution::StudentT { nu: 5.0 }),
            ("student_t(6.5)", DataDistribution::StudentT { nu: 6.5 }),
        ] {
            assert_eq!(s.parse::<DataDistribution>().unwrap(), d);
        }
        assert!("cauchy".parse::<DataDistribution>().is_err());
        assert!("t:x".parse::<DataDistribution>().is_err());
    }

    #[test]
    fn exact_examples() {
        let h = PowerLawSpectrum::new(1.5, 30).unwrap();
        let w = sample_sketch(30, 12, 8).unwrap();
        let k1 = exact_population_covariance(&w, &h, 1).unwrap();
        let hm = DMatrix::from_diagonal(&DVector::from_column_slice(h.eigenvalues()));
        let want = w.transpose() * hm * &w / 12.0;
        assert!((k1.matrix() - &want).amax() <= 1e-12);
        let k2 = exact_population_covariance(&w, &h, 2).unwrap();
        for i in 0..12 {
            let y2: f64 = (0..30).map(|r| h.eigenvalues()[r] * w[(r, i)] * w[(r, i)]).sum();
            assert!((k2.matrix()[(i, i)] - 3.0 * y2 * y2 / 12.0).abs() <= 1e-12 * y2 * y2);
        }
        let k3 = exact_population_covariance(&DMatrix::zeros(30, 5), &h, 3).unwrap();
        assert_eq!(k3.matrix().amax(), 0.0);
        assert!(exact_population_covariance(&DMatrix::zeros(29, 5), &h, 3).is_err());
        assert!(exact_population_covariance(&w, &h, 7).is_err());
    }

    #[test]
    fn mc_approaches_exact() {
        let (v, d) = (60, 30);
        let h = PowerLawSpectrum::new(1.31, v).unwrap();
        let w = sample_sketch(v, d, 5).unwrap();
        let exact = exact_population_covariance(&w, &h, 2).unwrap();
        let err = |m| {
            let c = RFConfig {
                seed: 9,
                ..RFConfig::new(v, d, m, 1.31, Activation::Monomial(2))
            };
            relative_frobenius(&mc_covariance_matrix(&c, &w, &h).unwrap(), &exact)
        };
        let e1 = err(2_000);
        let e2 = err(32_000);
        assert!(e2 < e1, "{e1} -> {e2}");
        assert!(e2 < 0.05, "{e2}");
    }
}

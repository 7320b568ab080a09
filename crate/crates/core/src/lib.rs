//! Spectra of power-law random features: monomial-kernel combinatorics,
//! lattice-point counting, tuple-product population spectra, Monte Carlo
//! covariance estimation and log-log slope fitting.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod combinatorics;
pub mod data;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod population;
pub mod simulate;
pub mod spectral;

pub use combinatorics::{Composition, HermiteExpansion, PairingClassTable};
pub use error::{Error, Result};
pub use lattice::{CountResult, Exponents, OrderedShape};
pub use population::{CountingCurve, PowerLawSpectrum, TupleEigenvalue};
pub use spectral::{SlopeFit, SpectrumEstimate, SpectrumMeta, SymmetricMatrix};

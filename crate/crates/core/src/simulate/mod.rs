//! Monte Carlo and exact random-feature covariances, iterated sketches,
//! layer propagation and Wick-product statistics.
//!
//! All randomness is drawn from seeded ChaCha streams keyed by block index,
//! so results depend only on the seed, never on thread scheduling.

mod activation;
mod covariance;
mod layers;
mod rng;
mod sketch;
mod wick;

pub use activation::Activation;
pub use covariance::{
    exact_population_covariance, exact_spectrum, mc_covariance, mc_covariance_matrix, mc_covariance_with,
    relative_frobenius, DataDistribution, RFConfig, MAX_EXACT_DEGREE, MAX_EXACT_DIM, MIN_SAMPLES,
};
pub use layers::{propagate_layers, sample_covariance_spectrum, LayerResult, LayerSpec, Normalization, MAX_LAYER_WIDTH};
pub use rng::{power_law_samples, sample_sketch, MAX_SKETCH_ENTRIES};
pub use sketch::{head_concentration, iterated_sketch, iterated_sketch_with};
pub use wick::{wick_empirical_moments, WickMoments, MIN_WICK_SAMPLES};

//! The population side: power-law `H`, tuple-product spectra `H^π`, their
//! envelopes, and predicted counting curves.

mod curve;
mod tuples;

pub use curve::{b_theory, predicted_spectrum, theory_curve, CountingCurve, CurveTerm, TermKind};
pub use tuples::{
    composition_envelope, envelope, hpi_count_above, hpi_top_k, PowerLawSpectrum, TopK, TupleEigenvalue,
    MAX_TOP_K, MAX_TUPLE_LENGTH,
};

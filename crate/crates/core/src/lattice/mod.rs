//! Lattice-point counting for product constraints `s_1^{π_1} ⋯ s_k^{π_k} ≤ X`:
//! exact counts (unordered, strictly ordered, bounded), their leading-order
//! asymptotics, and the special functions those constants need.

mod asymptotic;
mod count;
mod special;

pub use asymptotic::{
    asymptotic_ordered_equal, asymptotic_unordered, invert_count_equal, ordered_shape, OrderedShape,
};
pub(crate) use asymptotic::{ordered_equal_leading, unordered_leading};
pub use count::{
    count_ordered, count_ordered_with_budget, count_unordered, count_unordered_with_budget, CountResult,
    Exponents, DEFAULT_BUDGET,
};
pub use special::{gamma, ln_gamma, zeta};

//! Leading-order growth of the lattice counts and its inversion.

use serde::{Deserialize, Serialize};

use super::count::{is_same, Exponents};
use super::special::{ln_gamma, zeta};
use crate::error::{Error, Result};

const MAX_BISECTION_STEPS: usize = 200;

fn require_above_e(x: f64) -> Result<()> {
    if x > std::f64::consts::E {
        Ok(())
    } else {
        Err(Error::Domain(format!("asymptotic form needs X > e, got {x}")))
    }
}

/// `π_*^{1-m}/Γ(m) · Π_{π_i > π_*} ζ(π_i/π_*) · X^{1/π_*} (log X)^{m-1}`,
/// without the `X > e` check.
pub(crate) fn unordered_leading(x: f64, exponents: &Exponents) -> f64 {
    let pi_star = exponents.min();
    let m = exponents.multiplicity();
    let zeta_product: f64 = exponents
        .values()
        .iter()
        .filter(|&&p| !is_same(p, pi_star))
        .map(|&p| zeta(p / pi_star).unwrap_or(f64::INFINITY))
        .product();
    let constant = pi_star.powi(1 - m as i32) / ln_gamma(m as f64).exp();
    constant * zeta_product * x.powf(1.0 / pi_star) * x.ln().powi(m as i32 - 1)
}

/// Leading-order value of the unordered count `A_k(X)`.
pub fn asymptotic_unordered(x: f64, exponents: &Exponents) -> Result<f64> {
    require_above_e(x)?;
    Ok(unordered_leading(x, exponents))
}

pub(crate) fn ordered_equal_leading(x: f64, pi: f64, k: u32) -> f64 {
    let k = k as f64;
    let constant = pi.powf(1.0 - k) / (ln_gamma(k) + ln_gamma(k + 1.0)).exp();
    constant * x.powf(1.0 / pi) * x.ln().powf(k - 1.0)
}

/// `π^{1-k} / (Γ(k) Γ(k+1)) · X^{1/π} (log X)^{k-1}`, the leading order of the
/// strictly ordered count when all `k` exponents equal `π`.
pub fn asymptotic_ordered_equal(x: f64, pi: f64, k: u32) -> Result<f64> {
    require_above_e(x)?;
    if k == 0 || !(pi > 0.0) {
        return Err(Error::InvalidArgument(format!("need k ≥ 1 and π > 0, got k={k}, π={pi}")));
    }
    Ok(ordered_equal_leading(x, pi, k))
}

/// Growth exponents of the strictly ordered count for general exponents.
///
/// `Π_r = π_k + ⋯ + π_{k-r+1}` are tail sums, `θ_r = r / Π_r`,
/// `θ* = max_r θ_r` and `μ` counts the maximizers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedShape {
    pub theta_star: f64,
    pub mu: usize,
    pub partial_sums: Vec<f64>,
    pub thetas: Vec<f64>,
}

impl OrderedShape {
    /// `X^{θ*} (log X)^{μ-1}`.
    pub fn growth(&self, x: f64) -> f64 {
        x.powf(self.theta_star) * x.ln().powi(self.mu as i32 - 1)
    }
}

pub fn ordered_shape(exponents: &Exponents) -> OrderedShape {
    let mut partial_sums = Vec::with_capacity(exponents.k());
    let mut acc = 0.0;
    for &p in exponents.values().iter().rev() {
        acc += p;
        partial_sums.push(acc);
    }
    let thetas: Vec<f64> = partial_sums
        .iter()
        .enumerate()
        .map(|(i, &s)| (i + 1) as f64 / s)
        .collect();
    let theta_star = thetas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mu = thetas.iter().filter(|&&t| is_same(t, theta_star)).count();
    OrderedShape {
        theta_star,
        mu,
        partial_sums,
        thetas,
    }
}

/// Solves `asymptotic_ordered_equal(X, π, k) = N` for `X`.
///
/// Bisection runs in `log X`, seeded at `(N / log^{k-1} N)^π`.
pub fn invert_count_equal(n: f64, pi: f64, k: u32) -> Result<f64> {
    if !(n >= 3.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!("count must be ≥ 3, got {n}")));
    }
    if k == 0 || !(pi > 0.0) {
        return Err(Error::InvalidArgument(format!("need k ≥ 1 and π > 0, got k={k}, π={pi}")));
    }
    let f = |log_x: f64| ordered_equal_leading(log_x.exp(), pi, k);
    let seed = ((n / n.ln().powi(k as i32 - 1)).powf(pi)).max(1.0 + 1e-9).ln();

    // f is increasing for log X > 0, and f(0+) = 0 when k > 1 (= 1 when k = 1).
    let mut lo = 0.0;
    let mut hi = seed.max(1.0);
    let mut grow = 0;
    while f(hi) < n {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 64 {
            return Err(Error::BracketFailure(format!("no upper bracket for N = {n}")));
        }
    }
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let val = f(mid);
        if (val / n - 1.0).abs() <= 1e-13 {
            return Ok(mid.exp());
        }
        if val < n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = (0.5 * (lo + hi)).exp();
    if (ordered_equal_leading(x, pi, k) / n - 1.0).abs() <= 1e-9 {
        Ok(x)
    } else {
        Err(Error::NonConvergence {
            what: "count inversion",
            iterations: MAX_BISECTION_STEPS,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::count_ordered;

    fn exps(v: &[f64]) -> Exponents {
        Exponents::new(v.to_vec()).unwrap()
    }

    #[test]
    fn unordered_leading_forms() {
        let x = 1e5;
        let got = asymptotic_unordered(x, &exps(&[1.0, 1.0])).unwrap();
        assert!((got - x * x.ln()).abs() <= 1e-9 * got);
        let got = asymptotic_unordered(x, &exps(&[2.0, 1.0])).unwrap();
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((got - z2 * x).abs() <= 1e-9 * got);
        assert!(asymptotic_unordered(2.0, &exps(&[1.0])).is_err());
    }

    #[test]
    fn unordered_ratio_at_one_million() {
        let e = exps(&[1.0, 1.0]);
        let exact = crate::lattice::count_unordered(1e6, &e).unwrap().count as f64;
        let ratio = exact / asymptotic_unordered(1e6, &e).unwrap();
        assert!((0.8..=1.2).contains(&ratio), "{ratio}");
    }

    #[test]
    fn ordered_equal_forms() {
        let x: f64 = 5e4;
        let l = x.ln();
        assert!((asymptotic_ordered_equal(x, 1.0, 3).unwrap() - x * l * l / 12.0).abs() <= 1e-9 * x * l * l);
        assert!((asymptotic_ordered_equal(x, 1.0, 2).unwrap() - 0.5 * x * l).abs() <= 1e-9 * x * l);
        assert!((asymptotic_ordered_equal(x, 1.0, 1).unwrap() - x).abs() <= 1e-9 * x);
    }

    #[test]
    fn shapes() {
        let s = ordered_shape(&exps(&[1.0, 1.0, 1.0]));
        assert_eq!((s.theta_star, s.mu), (1.0, 3));
        let s = ordered_shape(&exps(&[2.0, 1.0]));
        assert_eq!((s.theta_star, s.mu), (1.0, 1));
        assert!((s.thetas[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.partial_sums, vec![1.0, 3.0]);
        let s = ordered_shape(&exps(&[3.0]));
        assert!((s.theta_star - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.mu, 1);
        let s = ordered_shape(&exps(&[3.0, 1.0, 1.0]));
        assert_eq!((s.theta_star, s.mu), (1.0, 2));
    }

    #[test]
    fn inversion_round_trips() {
        assert!((invert_count_equal(100.0, 1.0, 1).unwrap() - 100.0).abs() <= 1e-9 * 100.0);
        let x0: f64 = 1e4;
        let n = 0.5 * x0 * x0.ln();
        assert!((invert_count_equal(n, 1.0, 2).unwrap() / x0 - 1.0).abs() <= 1e-6);
        let x = invert_count_equal(1e5, 1.0, 3).unwrap();
        assert!((asymptotic_ordered_equal(x, 1.0, 3).unwrap() / 1e5 - 1.0).abs() <= 1e-4);
        for (n, pi, k) in [(3.0, 1.0, 2), (1e9, 2.0, 4), (50.0, 0.5, 3)] {
            let x = invert_count_equal(n, pi, k).unwrap();
            assert!((ordered_equal_leading(x, pi, k) / n - 1.0).abs() <= 1e-9, "N={n} π={pi} k={k}");
        }
        assert!(invert_count_equal(2.0, 1.0, 2).is_err());
    }

    #[test]
    fn inversion_tracks_order_of_magnitude() {
        // (N / log^{k-1} N)^π and the solved X stay within a bounded factor.
        for n in [1e3, 1e5, 1e7] {
            let x = invert_count_equal(n, 1.0, 3).unwrap();
            let seed = n / n.ln().powi(2);
            let r = x / seed;
            assert!((1.0..=30.0).contains(&r), "N={n}: ratio {r}");
        }
    }

    #[test]
    fn ordered_upper_envelope_is_bounded() {
        for parts in [[2.0, 1.0].as_slice(), [3.0, 1.0, 1.0].as_slice()] {
            let e = exps(parts);
            let shape = ordered_shape(&e);
            let mut max_ratio: f64 = 0.0;
            for i in 0..=8 {
                let x = 10f64.powf(2.0 + 0.5 * i as f64);
                let c = count_ordered(x, &e, None).unwrap().count as f64;
                max_ratio = max_ratio.max(c / shape.growth(x));
            }
            assert!(max_ratio <= 2.0, "{parts:?}: {max_ratio}");
        }
    }
}

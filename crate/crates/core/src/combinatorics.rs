//! Exact combinatorics of the monomial kernel.
//!
//! For a standard Gaussian `z` and vectors `y_i`, `y_j`, Isserlis' theorem
//! expands `E[(y_iᵀz)^p (y_jᵀz)^p]` as a sum over the perfect matchings of
//! `2p` slots: the first `p` slots carry `y_i`, the last `p` carry `y_j`. A
//! matching with `q` cross pairs contributes
//! `(‖y_i‖²‖y_j‖²)^((p-q)/2) ⟨y_i,y_j⟩^q`, so the kernel only depends on how
//! many matchings fall in each cross-count class. Those class sizes, the
//! Hermite expansion of `y^p`, and the Feynman-diagram counts `N_η` used by the
//! Wick decomposition are all computed exactly here in 128-bit integers.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest degree accepted by [`enumerate_pairings`]; `(2·8 - 1)!! = 2_027_025`.
pub const MAX_ENUMERATION_DEGREE: u32 = 8;

/// Largest multiset accepted by [`isserlis_moment`].
pub const MAX_ISSERLIS_SIZE: usize = 16;

const MAX_COMPOSITION_TOTAL: u32 = 24;

pub fn factorial(n: u32) -> Result<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k).ok_or(Error::Overflow("factorial")))
}

/// `n!! = n (n-2) (n-4) ⋯`, with `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> Result<u128> {
    if n < -1 {
        return Err(Error::Domain(format!("double factorial of {n}")));
    }
    let mut acc = 1u128;
    let mut k = n;
    while k > 1 {
        acc = acc
            .checked_mul(k as u128)
            .ok_or(Error::Overflow("double factorial"))?;
        k -= 2;
    }
    Ok(acc)
}

pub fn binomial(n: u32, k: u32) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(Error::Overflow("binomial"))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

/// An ordered tuple of positive parts. Position matters: `(2,1)` and `(1,2)`
/// are different compositions of 3.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyInput("composition parts"));
        }
        if let Some(pos) = parts.iter().position(|&p| p == 0) {
            return Err(Error::InvalidArgument(format!(
                "composition part {pos} is zero; parts must be positive"
            )));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of parts `ℓ`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `π_1! ⋯ π_ℓ!`, the second moment of the matching Wick product.
    pub fn factorial_product(&self) -> Result<u128> {
        self.parts.iter().try_fold(1u128, |acc, &p| {
            acc.checked_mul(factorial(p)?)
                .ok_or(Error::Overflow("factorial product"))
        })
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl std::str::FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = trimmed
            .split(',')
            .map(|tok| {
                tok.trim().parse::<u32>().map_err(|_| {
                    Error::InvalidArgument(format!("composition part `{}` is not a positive integer", tok.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Composition::new(parts)
    }
}

/// All compositions of `q`, optionally restricted to `length` parts.
///
/// Ordering is lexicographic with the first part descending, so `q = 3`
/// yields `(3), (2,1), (1,2), (1,1,1)`.
pub fn compositions(q: u32, length: Option<usize>) -> Result<Vec<Composition>> {
    if q == 0 {
        return Err(Error::EmptyInput("composition total"));
    }
    if q > MAX_COMPOSITION_TOTAL {
        return Err(Error::SizeLimit {
            what: "composition total",
            limit: MAX_COMPOSITION_TOTAL as u64,
            got: q as u64,
        });
    }
    if let Some(len) = length {
        if len == 0 || len > q as usize {
            return Err(Error::InvalidArgument(format!(
                "length filter {len} must lie in 1..={q}"
            )));
        }
    }

    fn rec(remaining: u32, prefix: &mut Vec<u32>, length: Option<usize>, out: &mut Vec<Composition>) {
        if remaining == 0 {
            if length.is_none_or(|l| l == prefix.len()) {
                out.push(Composition { parts: prefix.clone() });
            }
            return;
        }
        if let Some(l) = length {
            let slots = l.saturating_sub(prefix.len());
            // Each remaining slot needs at least one unit.
            if slots == 0 || (remaining as usize) < slots {
                return;
            }
        }
        for first in (1..=remaining).rev() {
            if let Some(l) = length {
                let slots_after = l - prefix.len() - 1;
                if ((remaining - first) as usize) < slots_after || (slots_after == 0 && first != remaining) {
                    continue;
                }
            }
            prefix.push(first);
            rec(remaining - first, prefix, length, out);
            prefix.pop();
        }
    }

    let mut out = Vec::new();
    rec(q, &mut Vec::with_capacity(q as usize), length, &mut out);
    Ok(out)
}

/// A perfect matching of `{1, …, 2p}`, stored as `(a, b)` pairs with `a < b`
/// sorted by `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    degree: u32,
    pairs: Vec<(u32, u32)>,
}

impl Pairing {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// Number of pairs joining the first half `{1..p}` to the second half
    /// `{p+1..2p}`.
    pub fn cross_count(&self) -> u32 {
        let p = self.degree;
        self.pairs.iter().filter(|&&(a, b)| a <= p && b > p).count() as u32
    }
}

/// Visits every perfect matching of `n` vertices (0-based) as a slice of
/// pairs. The smallest unmatched vertex is paired with each later vertex in
/// ascending order, which fixes the enumeration order.
pub(crate) fn for_each_matching(n: usize, mut visit: impl FnMut(&[(usize, usize)])) {
    type Visitor<'a> = dyn FnMut(&[(usize, usize)]) + 'a;
    fn rec(used: &mut [bool], pairs: &mut Vec<(usize, usize)>, visit: &mut Visitor<'_>) {
        let Some(first) = used.iter().position(|&u| !u) else {
            visit(pairs);
            return;
        };
        used[first] = true;
        for partner in first + 1..used.len() {
            if used[partner] {
                continue;
            }
            used[partner] = true;
            pairs.push((first, partner));
            rec(used, pairs, visit);
            pairs.pop();
            used[partner] = false;
        }
        used[first] = false;
    }

    if n % 2 == 1 {
        return;
    }
    let mut used = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    rec(&mut used, &mut pairs, &mut visit);
}

/// Every perfect matching of `{1, …, 2p}`; exactly `(2p-1)!!` of them.
pub fn enumerate_pairings(p: u32) -> Result<Vec<Pairing>> {
    if p == 0 {
        return Err(Error::EmptyInput("pairing degree"));
    }
    if p > MAX_ENUMERATION_DEGREE {
        return Err(Error::SizeLimit {
            what: "pairing enumeration degree",
            limit: MAX_ENUMERATION_DEGREE as u64,
            got: p as u64,
        });
    }
    let expected = double_factorial(2 * p as i64 - 1)? as usize;
    let mut out = Vec::with_capacity(expected);
    for_each_matching(2 * p as usize, |pairs| {
        out.push(Pairing {
            degree: p,
            pairs: pairs.iter().map(|&(a, b)| (a as u32 + 1, b as u32 + 1)).collect(),
        });
    });
    Ok(out)
}

/// Number of matchings of `[2p]` in each cross-count class `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingClassTable {
    degree: u32,
    counts: BTreeMap<u32, u128>,
}

impl PairingClassTable {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn counts(&self) -> &BTreeMap<u32, u128> {
        &self.counts
    }

    pub fn count(&self, q: u32) -> u128 {
        self.counts.get(&q).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u128 {
        self.counts.values().sum()
    }

    /// Kernel entry from the three inner products `⟨y_i,y_i⟩`, `⟨y_j,y_j⟩`,
    /// `⟨y_i,y_j⟩`.
    pub fn kernel_from_inner_products(&self, gii: f64, gjj: f64, gij: f64) -> f64 {
        let norms = gii * gjj;
        self.counts
            .iter()
            .map(|(&q, &c)| {
                let a = ((self.degree - q) / 2) as i32;
                c as f64 * norms.powi(a) * gij.powi(q as i32)
            })
            .sum()
    }
}

/// Closed form `counts(q) = C(p,q)² · q! · ((p-q-1)!!)²` for `p - q` even.
pub fn pairing_class_counts(p: u32) -> Result<PairingClassTable> {
    if p == 0 {
        return Err(Error::EmptyInput("pairing degree"));
    }
    let mut counts = BTreeMap::new();
    for q in (0..=p).rev().filter(|q| (p - q) % 2 == 0) {
        let b = binomial(p, q)?;
        let df = double_factorial(p as i64 - q as i64 - 1)?;
        let c = b
            .checked_mul(b)
            .and_then(|x| x.checked_mul(factorial(q).ok()?))
            .and_then(|x| x.checked_mul(df))
            .and_then(|x| x.checked_mul(df))
            .ok_or(Error::Overflow("pairing class count"))?;
        counts.insert(q, c);
    }
    Ok(PairingClassTable { degree: p, counts })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `E_z[(y_iᵀz)^p (y_jᵀz)^p]` for standard Gaussian `z`.
pub fn kernel_pair_value(y_i: &[f64], y_j: &[f64], p: u32) -> Result<f64> {
    if y_i.len() != y_j.len() {
        return Err(Error::DimensionMismatch {
            expected: y_i.len(),
            got: y_j.len(),
        });
    }
    let table = pairing_class_counts(p)?;
    Ok(table.kernel_from_inner_products(dot(y_i, y_i), dot(y_j, y_j), dot(y_i, y_j)))
}

/// What [`isserlis_moment`] does with an odd number of indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OddMomentPolicy {
    /// Return zero with [`Moment::odd`] set.
    #[default]
    Mark,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: f64,
    /// Set when the value is zero because the multiset had odd size.
    pub odd: bool,
}

/// `E[g_{a_1} ⋯ g_{a_2n}]` for a centered Gaussian vector with covariance
/// `cov(a, b)`, summed over all perfect matchings of the positions.
pub fn isserlis_moment(
    indices: &[usize],
    cov: impl Fn(usize, usize) -> f64,
    policy: OddMomentPolicy,
) -> Result<Moment> {
    if indices.len() > MAX_ISSERLIS_SIZE {
        return Err(Error::SizeLimit {
            what: "Isserlis multiset size",
            limit: MAX_ISSERLIS_SIZE as u64,
            got: indices.len() as u64,
        });
    }
    if indices.len() % 2 == 1 {
        return match policy {
            OddMomentPolicy::Mark => Ok(Moment { value: 0.0, odd: true }),
            OddMomentPolicy::Reject => Err(Error::InvalidArgument(format!(
                "odd multiset size {} has no pairing",
                indices.len()
            ))),
        };
    }
    let mut total = 0.0;
    for_each_matching(indices.len(), |pairs| {
        total += pairs
            .iter()
            .map(|&(a, b)| cov(indices[a], indices[b]))
            .product::<f64>();
    });
    Ok(Moment { value: total, odd: false })
}

/// Coefficients of `y^p = Σ_k c_k He_k(y)` in the probabilists' Hermite basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteExpansion {
    degree: u32,
    coefficients: BTreeMap<u32, u128>,
}

impl HermiteExpansion {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, u128> {
        &self.coefficients
    }

    pub fn coefficient(&self, k: u32) -> u128 {
        self.coefficients.get(&k).copied().unwrap_or(0)
    }

    /// `Σ_k c_k² k!`, which equals `E[y^{2p}] = (2p-1)!!`.
    pub fn parseval_sum(&self) -> Result<u128> {
        self.coefficients.iter().try_fold(0u128, |acc, (&k, &c)| {
            c.checked_mul(c)
                .and_then(|x| x.checked_mul(factorial(k).ok()?))
                .and_then(|x| acc.checked_add(x))
                .ok_or(Error::Overflow("Parseval sum"))
        })
    }

    pub fn evaluate(&self, y: f64) -> f64 {
        let he = hermite_values(self.degree, y);
        self.coefficients
            .iter()
            .map(|(&k, &c)| c as f64 * he[k as usize])
            .sum()
    }
}

/// `c_k = p! / (k! · 2^j · j!)` with `j = (p - k)/2`, for `k ≡ p (mod 2)`.
pub fn monomial_hermite_coefficients(p: u32) -> Result<HermiteExpansion> {
    let p_fact = factorial(p)?;
    let mut coefficients = BTreeMap::new();
    for k in (0..=p).rev().filter(|k| (p - k) % 2 == 0) {
        let j = (p - k) / 2;
        let denom = factorial(k)?
            .checked_mul(1u128 << j)
            .and_then(|x| x.checked_mul(factorial(j).ok()?))
            .ok_or(Error::Overflow("Hermite coefficient"))?;
        coefficients.insert(k, p_fact / denom);
    }
    Ok(HermiteExpansion { degree: p, coefficients })
}

/// Probabilists' Hermite polynomial `He_k(y)`.
pub fn hermite_value(k: u32, y: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, y);
    if k == 0 {
        return prev;
    }
    for n in 1..k {
        let next = y * cur - n as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[He_0(y), …, He_k(y)]`.
pub fn hermite_values(k: u32, y: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k as usize + 1);
    out.push(1.0);
    if k >= 1 {
        out.push(y);
    }
    for n in 1..k as usize {
        let next = y * out[n] - n as f64 * out[n - 1];
        out.push(next);
    }
    out
}

/// A composition together with per-part pair counts `η_j`, `2η_j ≤ π_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeynmanAssignment {
    composition: Composition,
    eta: Vec<u32>,
}

impl FeynmanAssignment {
    pub fn new(composition: Composition, eta: Vec<u32>) -> Result<Self> {
        if eta.len() != composition.len() {
            return Err(Error::DimensionMismatch {
                expected: composition.len(),
                got: eta.len(),
            });
        }
        for (j, (&e, &p)) in eta.iter().zip(composition.parts()).enumerate() {
            if 2 * e > p {
                return Err(Error::OutOfRange(format!(
                    "eta[{j}] = {e} needs 2·eta ≤ part {p}"
                )));
            }
        }
        Ok(Self { composition, eta })
    }

    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    pub fn eta(&self) -> &[u32] {
        &self.eta
    }

    /// `N_η = Π_j C(π_j, 2η_j) (2η_j - 1)!!`.
    pub fn count(&self) -> Result<u128> {
        self.eta
            .iter()
            .zip(self.composition.parts())
            .try_fold(1u128, |acc, (&e, &p)| {
                let ways = binomial(p, 2 * e)?
                    .checked_mul(double_factorial(2 * e as i64 - 1)?)
                    .ok_or(Error::Overflow("Feynman count"))?;
                acc.checked_mul(ways).ok_or(Error::Overflow("Feynman count"))
            })
    }

    /// Exponents `π_j - 2η_j` left inside the Wick product.
    pub fn residual_parts(&self) -> Vec<u32> {
        self.composition
            .parts()
            .iter()
            .zip(&self.eta)
            .map(|(&p, &e)| p - 2 * e)
            .collect()
    }
}

/// Number of Feynman diagrams on `π_j` copies of independent Gaussian `j`
/// that place exactly `η_j` edges among the copies of `j`.
pub fn feynman_count(composition: &Composition, eta: &[u32]) -> Result<u128> {
    FeynmanAssignment::new(composition.clone(), eta.to_vec())?.count()
}

/// `:Π_j g_j^{π_j}:` for independent standard Gaussians, evaluated as
/// `Π_j He_{π_j}(g_j)`.
pub fn wick_product_value(composition: &Composition, gaussians: &[f64]) -> Result<f64> {
    if gaussians.len() != composition.len() {
        return Err(Error::DimensionMismatch {
            expected: composition.len(),
            got: gaussians.len(),
        });
    }
    Ok(composition
        .parts()
        .iter()
        .zip(gaussians)
        .map(|(&p, &g)| hermite_value(p, g))
        .product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn comp(parts: &[u32]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn compositions_of_three() {
        let got = compositions(3, None).unwrap();
        let want = vec![comp(&[3]), comp(&[2, 1]), comp(&[1, 2]), comp(&[1, 1, 1])];
        assert_eq!(got, want);
        assert_eq!(compositions(1, None).unwrap(), vec![comp(&[1])]);
    }

    #[test]
    fn compositions_length_filter_matches_brute_force() {
        let got = compositions(4, Some(2)).unwrap();
        assert_eq!(got, vec![comp(&[3, 1]), comp(&[2, 2]), comp(&[1, 3])]);
        for q in 1..=10 {
            let all = compositions(q, None).unwrap();
            assert_eq!(all.len(), 1usize << (q - 1));
            for len in 1..=q as usize {
                let filtered: Vec<_> = all.iter().filter(|c| c.len() == len).cloned().collect();
                assert_eq!(compositions(q, Some(len)).unwrap(), filtered, "q={q} len={len}");
            }
        }
    }

    #[test]
    fn composition_errors() {
        assert!(matches!(compositions(0, None), Err(Error::EmptyInput(_))));
        assert!(compositions(3, Some(4)).is_err());
        assert!(Composition::new(vec![1, 0]).is_err());
        assert!(Composition::new(vec![]).is_err());
        assert_eq!("(4,2)".parse::<Composition>().unwrap(), comp(&[4, 2]));
        assert!("1,x".parse::<Composition>().is_err());
    }

    #[test]
    fn pairing_counts_are_double_factorials() {
        assert_eq!(enumerate_pairings(1).unwrap().len(), 1);
        assert_eq!(enumerate_pairings(1).unwrap()[0].pairs(), &[(1, 2)]);
        assert_eq!(enumerate_pairings(2).unwrap().len(), 3);
        assert_eq!(enumerate_pairings(3).unwrap().len(), 15);
        assert!(matches!(enumerate_pairings(9), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn pairings_are_perfect_and_distinct() {
        let all = enumerate_pairings(4).unwrap();
        let set: std::collections::HashSet<_> = all.iter().map(|p| p.pairs().to_vec()).collect();
        assert_eq!(set.len(), all.len());
        for pairing in &all {
            let mut seen = [false; 8];
            for &(a, b) in pairing.pairs() {
                assert!(a < b);
                for v in [a, b] {
                    assert!(!seen[v as usize - 1]);
                    seen[v as usize - 1] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn class_counts_known_values() {
        let t2 = pairing_class_counts(2).unwrap();
        assert_eq!(t2.counts(), &BTreeMap::from([(0, 1), (2, 2)]));
        let t3 = pairing_class_counts(3).unwrap();
        assert_eq!(t3.counts(), &BTreeMap::from([(1, 9), (3, 6)]));
        assert_eq!(pairing_class_counts(1).unwrap().counts(), &BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn class_counts_match_enumeration() {
        for p in 1..=6 {
            let table = pairing_class_counts(p).unwrap();
            assert_eq!(&table.counts, &oracle::cross_count_histogram(p).unwrap(), "p={p}");
            assert_eq!(table.total(), double_factorial(2 * p as i64 - 1).unwrap());
        }
    }

    #[test]
    fn kernel_pair_examples() {
        let a = [0.3, -1.2, 0.5];
        let b = [1.1, 0.4, -0.7];
        let inner: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((kernel_pair_value(&a, &b, 1).unwrap() - inner).abs() < 1e-15);
        let e1 = [1.0, 0.0];
        let e2 = [0.0, 1.0];
        assert_eq!(kernel_pair_value(&e1, &e1, 2).unwrap(), 3.0);
        assert_eq!(kernel_pair_value(&e1, &e2, 3).unwrap(), 0.0);
        assert_eq!(kernel_pair_value(&e1, &e1, 3).unwrap(), 15.0);
        assert!(matches!(
            kernel_pair_value(&a, &e1, 2),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernel_matches_pairing_sum() {
        // Brute-force Isserlis over all matchings of the 2p slots.
        let a = [0.6, -0.2, 0.9];
        let b = [-0.4, 0.8, 0.1];
        for p in 1..=4 {
            let brute = oracle::kernel_by_pairings(&a, &b, p).unwrap();
            let fast = kernel_pair_value(&a, &b, p).unwrap();
            assert!((brute - fast).abs() <= 1e-12 * brute.abs().max(1.0), "p={p}");
        }
    }

    #[test]
    fn kernel_on_unit_vector_is_gaussian_moment() {
        let s = 1.0 / 3f64.sqrt();
        let y = [s, s, s];
        for p in 1..=8u32 {
            let want = double_factorial(2 * p as i64 - 1).unwrap() as f64;
            let got = kernel_pair_value(&y, &y, p).unwrap();
            assert!((got - want).abs() <= 1e-12 * want, "p={p}");
        }
    }

    #[test]
    fn isserlis_examples() {
        let id = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let m = |ix: &[usize]| isserlis_moment(ix, id, OddMomentPolicy::Mark).unwrap();
        assert_eq!(m(&[1, 1]).value, 1.0);
        assert_eq!(m(&[1, 1, 1, 1]).value, 3.0);
        assert_eq!(m(&[1, 1, 2, 2]).value, 1.0);
        let odd = m(&[1, 2, 3]);
        assert!(odd.odd && odd.value == 0.0);
        assert!(isserlis_moment(&[1], id, OddMomentPolicy::Reject).is_err());
        assert!(isserlis_moment(&[0; 18], id, OddMomentPolicy::Mark).is_err());
        assert_eq!(m(&[0; 16]).value, 2_027_025.0);
    }

    #[test]
    fn hermite_expansions() {
        let c = |p| monomial_hermite_coefficients(p).unwrap();
        assert_eq!(c(2).coefficients(), &BTreeMap::from([(0, 1), (2, 1)]));
        assert_eq!(c(3).coefficients(), &BTreeMap::from([(1, 3), (3, 1)]));
        assert_eq!(c(4).coefficients(), &BTreeMap::from([(0, 3), (2, 6), (4, 1)]));
        for p in 1..=10 {
            let e = c(p);
            assert_eq!(e.coefficient(p), 1);
            assert_eq!(e.parseval_sum().unwrap(), double_factorial(2 * p as i64 - 1).unwrap());
            for y in [-1.7, 0.0, 0.4, 2.5] {
                let want = f64::powi(y, p as i32);
                assert!((e.evaluate(y) - want).abs() <= 1e-9 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn hermite_coefficients_match_quadrature() {
        for p in 1..=10 {
            let e = monomial_hermite_coefficients(p).unwrap();
            for k in 0..=p + 2 {
                let quad = oracle::hermite_coefficient_by_quadrature(p, k);
                let exact = e.coefficient(k) as f64;
                assert!((quad - exact).abs() <= 1e-8 * exact.max(1.0), "p={p} k={k}: {quad} vs {exact}");
            }
        }
    }

    #[test]
    fn hermite_recurrence() {
        assert_eq!(hermite_value(2, 0.0), -1.0);
        assert_eq!(hermite_value(3, 2.0), 2.0);
        assert_eq!(hermite_value(0, 5.0), 1.0);
        assert_eq!(hermite_value(1, 5.0), 5.0);
        let v = hermite_values(6, 0.7);
        for (k, &x) in v.iter().enumerate() {
            assert_eq!(x, hermite_value(k as u32, 0.7));
        }
    }

    #[test]
    fn feynman_examples() {
        assert_eq!(feynman_count(&comp(&[4, 2]), &[1, 1]).unwrap(), 6);
        assert_eq!(feynman_count(&comp(&[2]), &[1]).unwrap(), 1);
        assert_eq!(feynman_count(&comp(&[3]), &[1]).unwrap(), 3);
        assert!(matches!(
            feynman_count(&comp(&[3]), &[2]),
            Err(Error::OutOfRange(_))
        ));
        assert!(feynman_count(&comp(&[3, 1]), &[1]).is_err());
    }

    #[test]
    fn feynman_matches_diagram_enumeration() {
        for q in 1..=8 {
            for c in compositions(q, None).unwrap() {
                let brute = oracle::feynman_diagram_histogram(&c);
                for (eta, count) in &brute {
                    assert_eq!(feynman_count(&c, eta).unwrap(), *count, "{c} eta={eta:?}");
                }
                // Every admissible η shows up in the enumeration.
                let admissible: usize = c.parts().iter().map(|&p| (p / 2 + 1) as usize).product();
                assert_eq!(brute.len(), admissible);
            }
        }
    }

    #[test]
    fn wick_products() {
        assert_eq!(wick_product_value(&comp(&[1]), &[0.8]).unwrap(), 0.8);
        let x = 1.3;
        assert!((wick_product_value(&comp(&[2]), &[x]).unwrap() - (x * x - 1.0)).abs() < 1e-15);
        assert!(wick_product_value(&comp(&[2, 1]), &[1.0]).is_err());
    }

    #[test]
    fn integer_helpers() {
        assert_eq!(factorial(0).unwrap(), 1);
        assert_eq!(factorial(10).unwrap(), 3_628_800);
        assert!(factorial(40).is_err());
        assert_eq!(double_factorial(-1).unwrap(), 1);
        assert_eq!(double_factorial(0).unwrap(), 1);
        assert_eq!(double_factorial(7).unwrap(), 105);
        assert_eq!(binomial(10, 3).unwrap(), 120);
        assert_eq!(binomial(3, 5).unwrap(), 0);
        assert_eq!(binomial(60, 30).unwrap(), 118_264_581_564_861_424);
    }
}

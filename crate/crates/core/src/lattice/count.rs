//! Exact counts of integer tuples with `s_1^{π_1} ⋯ s_k^{π_k} ≤ X`.
//!
//! The first `k - 1` coordinates are enumerated with pruning; the last one is
//! counted arithmetically as the largest `s` with `prefix · s^{π_k} ≤ X`.
//! Integer exponents with moderate `X` use exact `u128` arithmetic; anything
//! else falls back to `f64` with a `1e-12` relative band that resolves
//! boundary ties toward inclusion.

use serde::{Deserialize, Serialize};

use super::asymptotic::unordered_leading;
use crate::error::{Error, Result};

/// Default cap on enumerated prefixes.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

const GUARD: f64 = 1e-12;
/// Above this, integer mode would risk `u128` overflow in prefix products.
const INT_MODE_MAX_X: f64 = 1e30;

/// Positive exponents `(π_1, …, π_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    values: Vec<f64>,
}

impl Exponents {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("exponents"));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "exponent {bad} is not a positive finite real"
            )));
        }
        Ok(Self { values })
    }

    pub fn from_parts(parts: &[u32]) -> Result<Self> {
        Self::new(parts.iter().map(|&p| p as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// `π_*`, the smallest exponent.
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `m = #{i : π_i = π_*}`.
    pub fn multiplicity(&self) -> usize {
        let min = self.min();
        self.values.iter().filter(|&&v| is_same(v, min)).count()
    }

    fn as_integers(&self) -> Option<Vec<u32>> {
        self.values
            .iter()
            .map(|&v| {
                let r = v.round();
                ((v - r).abs() <= GUARD * r.max(1.0) && (1.0..=127.0).contains(&r)).then_some(r as u32)
            })
            .collect()
    }
}

pub(crate) fn is_same(a: f64, b: f64) -> bool {
    (a - b).abs() <= GUARD * a.abs().max(b.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub count: u64,
    pub x: f64,
    pub exponents: Exponents,
    pub bound_v: Option<u64>,
    pub ordered: bool,
}

/// `A_k(X)`: tuples of positive integers in any order.
pub fn count_unordered(x: f64, exponents: &Exponents) -> Result<CountResult> {
    count_unordered_with_budget(x, exponents, DEFAULT_BUDGET)
}

pub fn count_unordered_with_budget(x: f64, exponents: &Exponents, budget: u64) -> Result<CountResult> {
    let count = run(x, exponents, None, false, budget)?;
    Ok(CountResult {
        count,
        x,
        exponents: exponents.clone(),
        bound_v: None,
        ordered: false,
    })
}

/// `N↓(X)`, or `N↓^v(X)` when `bound_v` is given: strictly increasing tuples
/// `1 ≤ s_1 < ⋯ < s_k` (each `≤ v`).
pub fn count_ordered(x: f64, exponents: &Exponents, bound_v: Option<u64>) -> Result<CountResult> {
    count_ordered_with_budget(x, exponents, bound_v, DEFAULT_BUDGET)
}

pub fn count_ordered_with_budget(
    x: f64,
    exponents: &Exponents,
    bound_v: Option<u64>,
    budget: u64,
) -> Result<CountResult> {
    let count = run(x, exponents, bound_v, true, budget)?;
    Ok(CountResult {
        count,
        x,
        exponents: exponents.clone(),
        bound_v,
        ordered: true,
    })
}

fn run(x: f64, exponents: &Exponents, bound_v: Option<u64>, ordered: bool, budget: u64) -> Result<u64> {
    if x.is_nan() {
        return Err(Error::InvalidArgument("X is NaN".into()));
    }
    if x < 1.0 || bound_v == Some(0) {
        return Ok(0);
    }
    let k = exponents.k();
    if k > 1 {
        let prefix = Exponents::new(exponents.values()[..k - 1].to_vec())?;
        // Prefix count is at most the unordered count of the first k-1 coordinates.
        let est = 2.0 * unordered_leading(x.max(std::f64::consts::E), &prefix) + 1.0;
        if est > budget as f64 {
            return Err(Error::BudgetExceeded {
                estimated: est.min(u64::MAX as f64) as u64,
                budget,
            });
        }
    }
    let v = bound_v.unwrap_or(u64::MAX);
    match exponents.as_integers() {
        Some(exps) if x <= INT_MODE_MAX_X => {
            let xf = (x * (1.0 + GUARD)).floor() as u128;
            Enumerator::new(IntMode { x: xf, exps }, k, v, budget).count(ordered)
        }
        _ => {
            let mode = RealMode {
                x,
                exps: exponents.values().to_vec(),
            };
            Enumerator::new(mode, k, v, budget).count(ordered)
        }
    }
}

trait Mode {
    type P: Copy;
    fn one(&self) -> Self::P;
    /// `p · s^{π_idx}` if it stays `≤ X`.
    fn extend(&self, p: Self::P, s: u64, idx: usize) -> Option<Self::P>;
    /// Largest `s ≥ 0` with `p · s^{π_idx} ≤ X`.
    fn max_coord(&self, p: Self::P, idx: usize) -> u64;
}

struct IntMode {
    x: u128,
    exps: Vec<u32>,
}

fn checked_pow(s: u64, e: u32) -> Option<u128> {
    (s as u128).checked_pow(e)
}

impl Mode for IntMode {
    type P = u128;

    fn one(&self) -> u128 {
        1
    }

    fn extend(&self, p: u128, s: u64, idx: usize) -> Option<u128> {
        let v = checked_pow(s, self.exps[idx])?.checked_mul(p)?;
        (v <= self.x).then_some(v)
    }

    fn max_coord(&self, p: u128, idx: usize) -> u64 {
        let e = self.exps[idx];
        // p · s^e ≤ X  ⇔  s^e ≤ ⌊X / p⌋
        let r = self.x / p;
        if r == 0 {
            return 0;
        }
        let mut s = ((r as f64).powf(1.0 / e as f64).floor() as u64).max(1);
        while checked_pow(s + 1, e).is_some_and(|v| v <= r) {
            s += 1;
        }
        while s > 0 && checked_pow(s, e).is_none_or(|v| v > r) {
            s -= 1;
        }
        s
    }
}

struct RealMode {
    x: f64,
    exps: Vec<f64>,
}

impl Mode for RealMode {
    type P = f64;

    fn one(&self) -> f64 {
        1.0
    }

    fn extend(&self, p: f64, s: u64, idx: usize) -> Option<f64> {
        let v = p * (s as f64).powf(self.exps[idx]);
        (v <= self.x * (1.0 + GUARD)).then_some(v)
    }

    fn max_coord(&self, p: f64, idx: usize) -> u64 {
        let t = (self.x / p).powf(1.0 / self.exps[idx]);
        if !(t >= 1.0) {
            return u64::from(self.extend(p, 1, idx).is_some());
        }
        let mut s = t.min(u64::MAX as f64 / 2.0).floor() as u64;
        while self.extend(p, s + 1, idx).is_some() {
            s += 1;
        }
        while s > 0 && self.extend(p, s, idx).is_none() {
            s -= 1;
        }
        s
    }
}

struct Enumerator<M: Mode> {
    mode: M,
    k: usize,
    v: u64,
    budget: u64,
    steps: u64,
}

impl<M: Mode> Enumerator<M> {
    fn new(mode: M, k: usize, v: u64, budget: u64) -> Self {
        Self {
            mode,
            k,
            v,
            budget,
            steps: 0,
        }
    }

    fn count(mut self, ordered: bool) -> Result<u64> {
        let one = self.mode.one();
        if ordered {
            self.ordered(0, one, 0)
        } else {
            self.unordered(0, one)
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::BudgetExceeded {
                estimated: self.steps,
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn unordered(&mut self, depth: usize, p: M::P) -> Result<u64> {
        if depth == self.k - 1 {
            return Ok(self.mode.max_coord(p, depth).min(self.v));
        }
        let mut total = 0u64;
        let mut s = 1u64;
        while s <= self.v {
            let Some(next) = self.mode.extend(p, s, depth) else {
                break;
            };
            self.tick()?;
            total += self.unordered(depth + 1, next)?;
            s += 1;
        }
        Ok(total)
    }

    /// Smallest completion `p · s^{π_d} (s+1)^{π_{d+1}} ⋯` must fit.
    fn min_completion(&self, p: M::P, s: u64, depth: usize) -> Option<M::P> {
        let mut acc = self.mode.extend(p, s, depth)?;
        for (r, idx) in (depth + 1..self.k).enumerate() {
            let t = s + 1 + r as u64;
            if t > self.v {
                return None;
            }
            acc = self.mode.extend(acc, t, idx)?;
        }
        Some(acc)
    }

    fn ordered(&mut self, depth: usize, p: M::P, last: u64) -> Result<u64> {
        if depth == self.k - 1 {
            let top = self.mode.max_coord(p, depth).min(self.v);
            return Ok(top.saturating_sub(last));
        }
        let mut total = 0u64;
        let mut s = last + 1;
        while s <= self.v {
            if self.min_completion(p, s, depth).is_none() {
                break;
            }
            let next = self.mode.extend(p, s, depth).expect("completion fits");
            self.tick()?;
            total += self.ordered(depth + 1, next, s)?;
            s += 1;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn exps(v: &[f64]) -> Exponents {
        Exponents::new(v.to_vec()).unwrap()
    }

    #[test]
    fn unordered_examples() {
        assert_eq!(count_unordered(4.0, &exps(&[1.0, 1.0])).unwrap().count, 8);
        assert_eq!(count_unordered(10.0, &exps(&[2.0, 1.0])).unwrap().count, 13);
        assert_eq!(count_unordered(0.5, &exps(&[1.0, 3.0])).unwrap().count, 0);
        assert_eq!(count_unordered(0.5, &exps(&[1.5])).unwrap().count, 0);
    }

    #[test]
    fn ordered_examples() {
        let e = exps(&[1.0, 1.0]);
        assert_eq!(count_ordered(6.0, &e, None).unwrap().count, 6);
        assert_eq!(count_ordered(6.0, &e, Some(3)).unwrap().count, 3);
        assert_eq!(count_ordered(6.0, &e, Some(7)).unwrap().count, 6);
    }

    #[test]
    fn counts_match_brute_force() {
        let cases: &[&[f64]] = &[
            &[1.0],
            &[2.0],
            &[1.0, 1.0],
            &[2.0, 1.0],
            &[1.0, 2.0],
            &[1.0, 1.0, 1.0],
            &[3.0, 1.0, 1.0],
            &[1.5, 0.7],
            &[0.5, 1.0, 2.5],
            &[1.0, 1.0, 1.0, 1.0],
        ];
        for e in cases {
            let e = exps(e);
            for x in [1.0, 2.0, 6.0, 17.5, 64.0, 100.0, 360.0, 1000.0] {
                let want_u = oracle::count_by_enumeration(x, e.values(), false, None);
                assert_eq!(count_unordered(x, &e).unwrap().count, want_u, "A {e:?} X={x}");
                for v in [None, Some(3), Some(10), Some(40)] {
                    let want_o = oracle::count_by_enumeration(x, e.values(), true, v);
                    assert_eq!(count_ordered(x, &e, v).unwrap().count, want_o, "N {e:?} X={x} v={v:?}");
                }
            }
        }
    }

    #[test]
    fn integer_boundaries_are_inclusive() {
        // 4 = 2^2 · 1 sits exactly on the boundary.
        let e = exps(&[2.0, 1.0]);
        assert_eq!(count_unordered(4.0, &e).unwrap().count, oracle::count_by_enumeration(4.0, &[2.0, 1.0], false, None));
        // X slightly below an integer because of a reciprocal round trip.
        let x = 1.0 / (1.0 / 6.0);
        assert_eq!(count_ordered(x, &exps(&[1.0, 1.0]), None).unwrap().count, 6);
        let x_low = 6.0 * (1.0 - 1e-15);
        assert_eq!(count_ordered(x_low, &exps(&[1.0, 1.0]), None).unwrap().count, 6);
    }

    #[test]
    fn budget_is_enforced() {
        let e = exps(&[1.0, 1.0, 1.0]);
        let err = count_unordered_with_budget(1e6, &e, 1000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 1000, .. }), "{err}");
        assert!(count_unordered_with_budget(100.0, &e, 100_000).is_ok());
    }

    #[test]
    fn strict_order_inequality() {
        for k in 2..=3usize {
            let e = exps(&vec![1.0; k]);
            let kfact: u64 = (1..=k as u64).product();
            for x in [10.0, 100.0, 1e3, 1e4] {
                let o = count_ordered(x, &e, None).unwrap().count;
                let u = count_unordered(x, &e).unwrap().count;
                assert!(kfact * o <= u, "k={k} X={x}");
            }
        }
    }

    #[test]
    fn exponents_validation() {
        assert!(Exponents::new(vec![]).is_err());
        assert!(Exponents::new(vec![1.0, -1.0]).is_err());
        assert!(Exponents::new(vec![f64::NAN]).is_err());
        let e = exps(&[2.0, 1.0, 1.0, 3.0]);
        assert_eq!(e.min(), 1.0);
        assert_eq!(e.multiplicity(), 2);
        assert!(count_unordered(f64::NAN, &e).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn monotone_in_x_and_v(a in 1u32..4, b in 1u32..4, x in 1.0f64..3000.0, dx in 0.0f64..500.0, v in 2u64..50) {
                let e = Exponents::from_parts(&[a, b]).unwrap();
                let lo = count_ordered(x, &e, Some(v)).unwrap().count;
                let hi_x = count_ordered(x + dx, &e, Some(v)).unwrap().count;
                let hi_v = count_ordered(x, &e, Some(v + 5)).unwrap().count;
                let unbounded = count_ordered(x, &e, None).unwrap().count;
                prop_assert!(lo <= hi_x);
                prop_assert!(lo <= hi_v);
                prop_assert!(hi_v <= unbounded);
                prop_assert!(count_unordered(x, &e).unwrap().count <= count_unordered(x + dx, &e).unwrap().count);
            }

            #[test]
            fn bounded_equals_unbounded_below_v(x in 1.0f64..200.0, parts in proptest::collection::vec(1u32..3, 1..4)) {
                let e = Exponents::from_parts(&parts).unwrap();
                let v = x.ceil() as u64;
                prop_assert_eq!(
                    count_ordered(x, &e, Some(v)).unwrap().count,
                    count_ordered(x, &e, None).unwrap().count
                );
            }
        }
    }
}

//! Slow, independent reference computations. Each function here recomputes a
//! quantity by brute force (full enumeration, quadrature, direct summation or
//! Monte Carlo) so the fast implementations elsewhere can be checked against
//! it. None of them share code paths with the routines they verify beyond the
//! matching enumerator and the Hermite recurrence.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::combinatorics::{for_each_matching, hermite_value, Composition, MAX_ENUMERATION_DEGREE};
use crate::error::{Error, Result};

fn check_degree(p: u32) -> Result<()> {
    if p == 0 {
        return Err(Error::EmptyInput("pairing degree"));
    }
    if p > MAX_ENUMERATION_DEGREE {
        return Err(Error::SizeLimit {
            what: "oracle enumeration degree",
            limit: MAX_ENUMERATION_DEGREE as u64,
            got: p as u64,
        });
    }
    Ok(())
}

/// Histogram of the cross-pair count over all perfect matchings of `2p`
/// vertices, where vertices `0..p` form the first half.
pub fn cross_count_histogram(p: u32) -> Result<BTreeMap<u32, u128>> {
    check_degree(p)?;
    let half = p as usize;
    let mut hist = BTreeMap::new();
    for_each_matching(2 * half, |pairs| {
        let cross = pairs.iter().filter(|&&(a, b)| (a < half) != (b < half)).count() as u32;
        *hist.entry(cross).or_insert(0u128) += 1;
    });
    Ok(hist)
}

/// `E[(aᵀz)^p (bᵀz)^p]` as the Isserlis sum over every matching of the `2p`
/// factors.
pub fn kernel_by_pairings(a: &[f64], b: &[f64], p: u32) -> Result<f64> {
    check_degree(p)?;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>();
    let aa = dot(a, a);
    let bb = dot(b, b);
    let ab = dot(a, b);
    let half = p as usize;
    let mut total = 0.0;
    for_each_matching(2 * half, |pairs| {
        total += pairs
            .iter()
            .map(|&(x, y)| match (x < half, y < half) {
                (true, true) => aa,
                (false, false) => bb,
                _ => ab,
            })
            .product::<f64>();
    });
    Ok(total)
}

/// Monte Carlo estimate of `E[(aᵀz)^p (bᵀz)^p]` over `m` standard Gaussian `z`.
pub fn kernel_monte_carlo(a: &[f64], b: &[f64], p: u32, m: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![0.0; a.len()];
    let mut acc = 0.0;
    for _ in 0..m {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        let ya: f64 = a.iter().zip(&z).map(|(x, y)| x * y).sum();
        let yb: f64 = b.iter().zip(&z).map(|(x, y)| x * y).sum();
        acc += (ya * yb).powi(p as i32);
    }
    acc / m as f64
}

/// Gauss–Hermite nodes and weights for the weight `exp(-x²)` (Newton
/// iteration on the orthonormal recurrence).
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `E[y^p He_k(y)] / k!` for standard Gaussian `y`, by 30-point Gauss–Hermite
/// quadrature (exact for `p + k ≤ 59`).
pub fn hermite_coefficient_by_quadrature(p: u32, k: u32) -> f64 {
    let (nodes, weights) = gauss_hermite(30);
    let sqrt2 = std::f64::consts::SQRT_2;
    let mean: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| {
            let y = sqrt2 * x;
            w * y.powi(p as i32) * hermite_value(k, y)
        })
        .sum::<f64>()
        / std::f64::consts::PI.sqrt();
    let k_fact: f64 = (1..=k).map(|i| i as f64).product();
    mean / k_fact
}

/// Tally of Feynman diagrams for `:g_1^{π_1}: ⋯ :g_ℓ^{π_ℓ}:` expanded into
/// ordinary products: every set of vertex-disjoint edges among the `Σπ_j`
/// labelled vertices, restricted to edges joining equal labels, keyed by the
/// per-label edge counts `η`.
pub fn feynman_diagram_histogram(composition: &Composition) -> BTreeMap<Vec<u32>, u128> {
    let labels: Vec<usize> = composition
        .parts()
        .iter()
        .enumerate()
        .flat_map(|(j, &p)| std::iter::repeat_n(j, p as usize))
        .collect();
    let mut hist = BTreeMap::new();
    let mut used = vec![false; labels.len()];
    let mut eta = vec![0u32; composition.len()];

    fn rec(
        start: usize,
        labels: &[usize],
        used: &mut [bool],
        eta: &mut [u32],
        hist: &mut BTreeMap<Vec<u32>, u128>,
    ) {
        let Some(first) = (start..labels.len()).find(|&i| !used[i]) else {
            *hist.entry(eta.to_vec()).or_insert(0) += 1;
            return;
        };
        // `first` stays unpaired.
        used[first] = true;
        rec(first + 1, labels, used, eta, hist);
        // `first` paired with a later free vertex of the same label.
        for partner in first + 1..labels.len() {
            if used[partner] || labels[partner] != labels[first] {
                continue;
            }
            used[partner] = true;
            eta[labels[first]] += 1;
            rec(first + 1, labels, used, eta, hist);
            eta[labels[first]] -= 1;
            used[partner] = false;
        }
        used[first] = false;
    }

    rec(0, &labels, &mut used, &mut eta, &mut hist);
    hist
}

/// `ζ(s)` by direct summation of `terms` terms (smallest first) plus the
/// integral tail `N^{1-s}/(s-1) - N^{-s}/2 + s N^{-s-1}/12`.
pub fn zeta_by_series(s: f64, terms: u64) -> f64 {
    let mut sum = 0.0;
    for n in (1..=terms).rev() {
        sum += (n as f64).powf(-s);
    }
    let n = terms as f64;
    sum + n.powf(1.0 - s) / (s - 1.0) - 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
}

/// Counts tuples with `Π s_i^{π_i} ≤ X` by enumerating every coordinate,
/// including the last one. `ordered` requires `s_1 < ⋯ < s_k`; `bound_v`
/// caps every coordinate.
pub fn count_by_enumeration(x: f64, exponents: &[f64], ordered: bool, bound_v: Option<u64>) -> u64 {
    fn rec(x: f64, e: &[f64], ordered: bool, v: u64, depth: usize, prod: f64, last: u64) -> u64 {
        if depth == e.len() {
            return 1;
        }
        let mut total = 0;
        let mut s = if ordered { last + 1 } else { 1 };
        while s <= v {
            let next = prod * (s as f64).powf(e[depth]);
            if next > x * (1.0 + 1e-12) {
                break;
            }
            total += rec(x, e, ordered, v, depth + 1, next, s);
            s += 1;
        }
        total
    }
    if x < 1.0 {
        return 0;
    }
    rec(x, exponents, ordered, bound_v.unwrap_or(u64::MAX), 0, 1.0, 0)
}

/// Every value `Π_j h[i_j]^{π_j}` over strictly increasing 1-based tuples
/// `i_1 < ⋯ < i_ℓ ≤ h.len()`, sorted by value descending and then by tuple.
pub fn tuple_products_sorted(h: &[f64], parts: &[u32]) -> Vec<(Vec<usize>, f64)> {
    fn rec(h: &[f64], parts: &[u32], tuple: &mut Vec<usize>, value: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        let depth = tuple.len();
        if depth == parts.len() {
            out.push((tuple.clone(), value));
            return;
        }
        let start = tuple.last().map_or(1, |&i| i + 1);
        for i in start..=h.len() {
            tuple.push(i);
            rec(h, parts, tuple, value * h[i - 1].powi(parts[depth] as i32), out);
            tuple.pop();
        }
    }
    let mut out = Vec::new();
    rec(h, parts, &mut Vec::with_capacity(parts.len()), 1.0, &mut out);
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

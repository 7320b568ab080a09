//! Spectra of the tuple-product operators `H^π`: entries
//! `H_{i_1}^{π_1} ⋯ H_{i_ℓ}^{π_ℓ}` over strictly increasing index tuples,
//! with `π_1` attached to the smallest index.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, Composition};
use crate::error::{Error, Result};
use crate::lattice::{ordered_shape, Exponents};

pub const MAX_TOP_K: usize = 10_000_000;
pub const MAX_TUPLE_LENGTH: usize = 4;
const THRESHOLD_SEARCH_STEPS: usize = 200;

/// Population spectrum `H`: positive, nonincreasing, with exponent `α > 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSpectrum {
    alpha: f64,
    eigenvalues: Vec<f64>,
}

impl PowerLawSpectrum {
    /// `H_j = j^{-α}` for `j = 1..=v`.
    pub fn new(alpha: f64, v: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if v == 0 {
            return Err(Error::EmptyInput("spectrum dimension"));
        }
        let eigenvalues = (1..=v).map(|j| (j as f64).powf(-alpha)).collect();
        Ok(Self { alpha, eigenvalues })
    }

    /// A custom spectrum; `alpha` is kept as a label for the decay rate.
    pub fn from_values(alpha: f64, eigenvalues: Vec<f64>) -> Result<Self> {
        check_alpha(alpha)?;
        if eigenvalues.is_empty() {
            return Err(Error::EmptyInput("spectrum"));
        }
        if let Some(index) = eigenvalues.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                context: "population spectrum",
                index,
            });
        }
        if let Some(i) = eigenvalues.iter().position(|&x| x <= 0.0) {
            return Err(Error::InvalidArgument(format!("eigenvalue {i} is not positive")));
        }
        if let Some(i) = eigenvalues.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument(format!("spectrum increases at index {}", i + 1)));
        }
        Ok(Self { alpha, eigenvalues })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn v(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must exceed 1, got {alpha}")))
    }
}

/// One entry of `H^π`; `tuple` holds strictly increasing 1-based indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleEigenvalue {
    pub tuple: Vec<usize>,
    pub value: f64,
}

/// Result of [`hpi_top_k`]. `truncated` is set when fewer than the requested
/// number of tuples exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopK {
    pub entries: Vec<TupleEigenvalue>,
    pub truncated: bool,
}

impl TopK {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }
}

/// Products are always formed left to right as `((H_{i_1}^{π_1}) H_{i_2}^{π_2}) ⋯`
/// so that counting and enumeration compare bit-identical values.
struct Table<'a> {
    h: &'a [f64],
    parts: &'a [u32],
}

impl Table<'_> {
    fn factor(&self, idx: usize, depth: usize) -> f64 {
        self.h[idx - 1].powi(self.parts[depth] as i32)
    }

    /// Largest value any completion of a prefix ending at `last` (at `depth`)
    /// can reach: the next consecutive indices.
    fn best_completion(&self, prefix: f64, depth: usize, last: usize) -> Option<f64> {
        let mut acc = prefix;
        for (r, d) in (depth..self.parts.len()).enumerate() {
            let idx = last + 1 + r;
            if idx > self.h.len() {
                return None;
            }
            acc *= self.factor(idx, d);
        }
        Some(acc)
    }
}

fn check_composition(h: &PowerLawSpectrum, composition: &Composition) -> Result<()> {
    if composition.len() > MAX_TUPLE_LENGTH {
        return Err(Error::SizeLimit {
            what: "composition length",
            limit: MAX_TUPLE_LENGTH as u64,
            got: composition.len() as u64,
        });
    }
    if composition.len() > h.v() {
        return Err(Error::OutOfRange(format!(
            "composition of length {} needs at least that many eigenvalues, have {}",
            composition.len(),
            h.v()
        )));
    }
    Ok(())
}

/// `#{i_1 < ⋯ < i_ℓ : Π H_{i_j}^{π_j} ≥ ε}`.
pub fn hpi_count_above(h: &PowerLawSpectrum, composition: &Composition, eps: f64) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be positive, got {eps}")));
    }
    check_composition(h, composition)?;
    let t = Table {
        h: h.eigenvalues(),
        parts: composition.parts(),
    };
    Ok(count_rec(&t, eps, 0, 1.0, 0))
}

fn count_rec(t: &Table, eps: f64, depth: usize, prefix: f64, last: usize) -> u64 {
    let v = t.h.len();
    if depth + 1 == t.parts.len() {
        // Values decrease in the index; binary-search the last one still ≥ ε.
        let (mut lo, mut hi) = (last, v);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if prefix * t.factor(mid, depth) >= eps {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        return (lo - last) as u64;
    }
    let mut total = 0;
    for i in last + 1..=v {
        match t.best_completion(prefix, depth, i - 1) {
            Some(best) if best >= eps => {}
            _ => break,
        }
        total += count_rec(t, eps, depth + 1, prefix * t.factor(i, depth), i);
    }
    total
}

fn collect_rec(t: &Table, eps: f64, tuple: &mut Vec<usize>, prefix: f64, out: &mut Vec<TupleEigenvalue>) {
    let depth = tuple.len();
    if depth == t.parts.len() {
        out.push(TupleEigenvalue {
            tuple: tuple.clone(),
            value: prefix,
        });
        return;
    }
    let last = tuple.last().copied().unwrap_or(0);
    for i in last + 1..=t.h.len() {
        match t.best_completion(prefix, depth, i - 1) {
            Some(best) if best >= eps => {}
            _ => break,
        }
        tuple.push(i);
        collect_rec(t, eps, tuple, prefix * t.factor(i, depth), out);
        tuple.pop();
    }
}

fn sort_entries(entries: &mut [TupleEigenvalue]) {
    entries.sort_by(|a, b| b.value.total_cmp(&a.value).then_with(|| a.tuple.cmp(&b.tuple)));
}

/// The `k` largest entries of `H^π`, descending, ties broken by tuple order.
///
/// A threshold with between `k` and `4k` entries above it is located by
/// geometric search on [`hpi_count_above`]; only entries above it are
/// enumerated.
pub fn hpi_top_k(h: &PowerLawSpectrum, composition: &Composition, k: usize) -> Result<TopK> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if k > MAX_TOP_K {
        return Err(Error::SizeLimit {
            what: "top-k size",
            limit: MAX_TOP_K as u64,
            got: k as u64,
        });
    }
    check_composition(h, composition)?;
    let t = Table {
        h: h.eigenvalues(),
        parts: composition.parts(),
    };
    let total = binomial(h.v() as u32, composition.len() as u32).unwrap_or(u128::MAX);

    let eps = if (k as u128) >= total {
        0.0
    } else {
        find_threshold(h, composition, k)?
    };
    let mut entries = Vec::new();
    collect_rec(&t, eps, &mut Vec::with_capacity(composition.len()), 1.0, &mut entries);
    sort_entries(&mut entries);
    let truncated = (k as u128) > total;
    entries.truncate(k);
    Ok(TopK { entries, truncated })
}

fn find_threshold(h: &PowerLawSpectrum, composition: &Composition, k: usize) -> Result<f64> {
    let count = |e: f64| hpi_count_above(h, composition, e);
    let k = k as u64;
    let t = Table {
        h: h.eigenvalues(),
        parts: composition.parts(),
    };
    let top = t.best_completion(1.0, 0, 0).expect("composition fits");
    // Invariant: count(hi) < k ≤ count(lo) once `lo` is found.
    let mut hi = top * 2.0;
    let mut lo = top;
    let mut steps = 0;
    while count(lo)? < k {
        hi = lo;
        lo *= 0.5;
        steps += 1;
        if steps > 4 * THRESHOLD_SEARCH_STEPS || lo == 0.0 {
            return Err(Error::BracketFailure(format!("no threshold with at least {k} entries")));
        }
    }
    // Tighten in log space until at most 4k entries lie above `lo`.
    for _ in 0..THRESHOLD_SEARCH_STEPS {
        if count(lo)? <= 4 * k {
            break;
        }
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid)? >= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `(log^{p-1}(j+1) / j)^α`.
pub fn envelope(j: usize, alpha: f64, p: u32) -> f64 {
    let j = j as f64;
    ((j + 1.0).ln().powi(p as i32 - 1) / j).powf(alpha)
}

/// `(log^{μ-1}(j+1) / j)^{α/θ*}` with `θ*`, `μ` from the tail sums of `π`.
pub fn composition_envelope(j: usize, alpha: f64, composition: &Composition) -> f64 {
    let exps = Exponents::from_parts(composition.parts()).expect("composition parts are positive");
    let shape = ordered_shape(&exps);
    let j = j as f64;
    ((j + 1.0).ln().powi(shape.mu as i32 - 1) / j).powf(alpha / shape.theta_star)
}

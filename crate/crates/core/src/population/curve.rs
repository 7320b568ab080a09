//! Predicted eigenvalue-counting functions `N(u)` for monomial degrees 1 to 3,
//! and the spectrum `ε_j = C u_j^{-α}` obtained by solving `N(u_j) = j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ordered_equal_leading, unordered_leading, zeta, Exponents};

const MAX_PREDICTED_INDEX: usize = 10_000_000;
const BISECTION_STEPS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    /// Strictly ordered count with `k` equal unit exponents.
    OrderedPrincipal,
    /// Unordered count with the term's exponents.
    Unordered,
    /// `#{s ≤ X} ≈ X`.
    Linear,
    /// `#{s : s^{π} ≤ X} ≈ X^{1/π}` for a single part.
    Diagonal,
}

/// `weight · count(arg_scale · u)` for one composition type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTerm {
    pub kind: TermKind,
    pub exponents: Vec<u32>,
    pub weight: f64,
    pub arg_scale: f64,
    /// Inactive terms are recorded but excluded from evaluation.
    pub active: bool,
}

impl CurveTerm {
    fn eval(&self, u: f64) -> f64 {
        let x = self.arg_scale * u;
        let value = match self.kind {
            TermKind::OrderedPrincipal => ordered_equal_leading(x, 1.0, self.exponents.len() as u32),
            TermKind::Unordered => {
                let e = Exponents::from_parts(&self.exponents).expect("term exponents are positive");
                unordered_leading(x, &e)
            }
            TermKind::Linear => x,
            TermKind::Diagonal => x.powf(1.0 / self.exponents[0] as f64),
        };
        self.weight * value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingCurve {
    pub p: u32,
    pub alpha: f64,
    /// Default scale `C` in `ε_j = C u_j^{-α}`: the coefficient of the
    /// principal term (36 for `p = 3`, matching its anchoring threshold).
    pub scale_c: f64,
    pub terms: Vec<CurveTerm>,
}

impl CountingCurve {
    pub fn evaluate(&self, u: f64) -> f64 {
        self.terms.iter().filter(|t| t.active).map(|t| t.eval(u)).sum()
    }

    /// Coefficient of the linear-in-`u` part (zero for `p ≤ 2`).
    pub fn linear_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.active && matches!(t.kind, TermKind::Unordered | TermKind::Linear))
            .map(|t| t.eval(1.0))
            .sum()
    }
}

/// `ζ(2)/2^{1/α} + 4^{-1/α}`.
pub fn b_theory(alpha: f64) -> Result<f64> {
    Ok(zeta(2.0)? * 2f64.powf(-1.0 / alpha) + 4f64.powf(-1.0 / alpha))
}

/// Counting curve for `f(y) = y^p`, `p ∈ {1, 2, 3}`.
///
/// `p = 1`: `N(u) = u`. `p = 2`: `N(u) = ½ u log u`. `p = 3`:
/// `N(u) = u log²u / 12 + b u`; the `O(u^{1/3})` diagonal term is kept as an
/// inactive entry.
pub fn theory_curve(p: u32, alpha: f64) -> Result<CountingCurve> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must exceed 1, got {alpha}")));
    }
    let principal = |k: usize| CurveTerm {
        kind: TermKind::OrderedPrincipal,
        exponents: vec![1; k],
        weight: 1.0,
        arg_scale: 1.0,
        active: true,
    };
    let scaled = |c: f64| c.powf(-1.0 / alpha);
    let (terms, scale_c) = match p {
        1 => (
            vec![CurveTerm {
                kind: TermKind::Linear,
                ..principal(1)
            }],
            1.0,
        ),
        2 => (vec![principal(2)], 2.0),
        3 => (
            vec![
                principal(3),
                CurveTerm {
                    kind: TermKind::Unordered,
                    exponents: vec![2, 1],
                    weight: 1.0,
                    arg_scale: scaled(2.0),
                    active: true,
                },
                CurveTerm {
                    kind: TermKind::Linear,
                    exponents: vec![1],
                    weight: 1.0,
                    arg_scale: scaled(4.0),
                    active: true,
                },
                CurveTerm {
                    kind: TermKind::Diagonal,
                    exponents: vec![3],
                    weight: 1.0,
                    arg_scale: scaled(6.0),
                    active: false,
                },
            ],
            36.0,
        ),
        0 => return Err(Error::InvalidArgument("degree must be positive".into())),
        _ => {
            return Err(Error::Unsupported(format!(
                "counting curves are only defined for degrees 1 to 3, got {p}"
            )))
        }
    };
    Ok(CountingCurve {
        p,
        alpha,
        scale_c,
        terms,
    })
}

/// `ε_j = C u_j^{-α}` for `j ∈ [j_min, j_max]`, where `N(u_j) = j` is solved
/// by bisection to `|N(u_j) - j| ≤ 1e-8 j`.
pub fn predicted_spectrum(curve: &CountingCurve, c: f64, j_min: usize, j_max: usize) -> Result<Vec<f64>> {
    if j_min == 0 || j_min > j_max || j_max > MAX_PREDICTED_INDEX {
        return Err(Error::InvalidArgument(format!(
            "index range {j_min}..={j_max} must lie within 1..={MAX_PREDICTED_INDEX}"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("scale C must be positive, got {c}")));
    }
    let mut out = Vec::with_capacity(j_max - j_min + 1);
    let mut prev_u = None;
    for j in j_min..=j_max {
        let u = solve_count(curve, j as f64, prev_u)?;
        out.push(c * u.powf(-curve.alpha));
        prev_u = Some(u);
    }
    if let Some(i) = out.windows(2).position(|w| w[1] >= w[0]) {
        return Err(Error::BracketFailure(format!(
            "predicted spectrum is not decreasing at j = {}",
            j_min + i + 1
        )));
    }
    Ok(out)
}

fn solve_count(curve: &CountingCurve, target: f64, start: Option<f64>) -> Result<f64> {
    let n = |u: f64| curve.evaluate(u);
    // N(1) ≤ 0 for p ≤ 2; for p = 3 N is increasing on (0, ∞) with N(1) = b,
    // so halving `lo` eventually drops below any target ≥ 1.
    let mut lo = start.unwrap_or(1.0);
    let mut halvings = 0;
    while n(lo) > target {
        lo *= 0.5;
        halvings += 1;
        if halvings > 200 {
            return Err(Error::BracketFailure(format!("no lower bracket for N(u) = {target}")));
        }
    }
    let mut hi = lo.max(1.0) * 2.0;
    let mut doublings = 0;
    while n(hi) < target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::BracketFailure(format!("no upper bracket for N(u) = {target}")));
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let val = n(mid);
        if (val - target).abs() <= 1e-10 * target {
            return Ok(mid);
        }
        if val < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let u = 0.5 * (lo + hi);
    if (n(u) - target).abs() <= 1e-8 * target {
        Ok(u)
    } else {
        Err(Error::NonConvergence {
            what: "counting-curve inversion",
            iterations: BISECTION_STEPS,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn closed_forms() {
        let c1 = theory_curve(1, 1.31).unwrap();
        assert_eq!(c1.evaluate(100.0), 100.0);
        let c2 = theory_curve(2, 1.31).unwrap();
        let e = std::f64::consts::E;
        assert!((c2.evaluate(e) - e / 2.0).abs() < 1e-14);
        assert_eq!(c2.linear_coefficient(), 0.0);
        let c3 = theory_curve(3, 1.31).unwrap();
        let u: f64 = 1e4;
        let b = b_theory(1.31).unwrap();
        let want = u * u.ln().powi(2) / 12.0 + b * u;
        assert!((c3.evaluate(u) - want).abs() <= 1e-12 * want);
        assert!((c3.linear_coefficient() - b).abs() < 1e-14);
        assert!(matches!(theory_curve(4, 1.31), Err(Error::Unsupported(_))));
    }

    #[test]
    fn b_theory_matches_series_zeta() {
        let alpha: f64 = 1.31;
        let z2 = oracle::zeta_by_series(2.0, 1_000_000);
        let want = z2 / 2f64.powf(1.0 / alpha) + 1.0 / 4f64.powf(1.0 / alpha);
        assert!((b_theory(alpha).unwrap() - want).abs() <= 1e-10);
    }

    #[test]
    fn linear_prediction_is_exact() {
        let c = theory_curve(1, 1.31).unwrap();
        let eps = predicted_spectrum(&c, 1.0, 1, 500).unwrap();
        for (i, e) in eps.iter().enumerate() {
            let want = ((i + 1) as f64).powf(-1.31);
            assert!((e - want).abs() <= 1e-9 * want, "j={}", i + 1);
        }
    }

    #[test]
    fn forward_round_trip() {
        for p in [2, 3] {
            let c = theory_curve(p, 1.31).unwrap();
            let eps = predicted_spectrum(&c, 1.0, 1, 2000).unwrap();
            for (i, e) in eps.iter().enumerate() {
                let j = (i + 1) as f64;
                let u = e.powf(-1.0 / 1.31);
                assert!((c.evaluate(u) - j).abs() <= 1e-7 * j, "p={p} j={j}");
            }
        }
    }

    #[test]
    fn rejects_bad_ranges() {
        let c = theory_curve(2, 2.0).unwrap();
        assert!(predicted_spectrum(&c, 1.0, 0, 5).is_err());
        assert!(predicted_spectrum(&c, 1.0, 5, 4).is_err());
        assert!(predicted_spectrum(&c, 0.0, 1, 4).is_err());
    }
}

//! Eigenvalues of a dense symmetric matrix: Householder reduction to
//! tridiagonal form followed by implicit QL iterations with Wilkinson-style
//! shifts. Eigenvectors are never formed.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Trailing-block size below which the reduction runs sequentially.
const PAR_MIN_DIM: usize = 192;
const MAX_QL_SWEEPS: usize = 60;

/// Reduces the row-major symmetric `a` (n×n) to tridiagonal form in place and
/// returns `(diagonal, subdiagonal)`, the latter padded with a trailing zero.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1; // size of the trailing block
        let base = k + 1;
        // x = A[k+1.., k]
        let mut norm2 = 0.0;
        for i in 0..m {
            let x = a[(base + i) * n + k];
            v[i] = x;
            norm2 += x * x;
        }
        diag[k] = a[k * n + k];
        let norm = norm2.sqrt();
        if norm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let alpha = if v[0] > 0.0 { -norm } else { norm };
        off[k] = alpha;
        v[0] -= alpha;
        let vtv: f64 = v[..m].iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        let tau = 2.0 / vtv;

        // p = τ A' v  (A' is the trailing block, rows contiguous)
        let v_ref = &v[..m];
        let compute_row = |i: usize| -> f64 {
            let row = &a[(base + i) * n + base..(base + i) * n + n];
            tau * row.iter().zip(v_ref).map(|(x, y)| x * y).sum::<f64>()
        };
        if m >= PAR_MIN_DIM {
            w[..m].par_iter_mut().enumerate().for_each(|(i, wi)| *wi = compute_row(i));
        } else {
            for (i, wi) in w[..m].iter_mut().enumerate() {
                *wi = compute_row(i);
            }
        }
        // w = p - (τ/2)(vᵀp) v
        let vtp: f64 = v[..m].iter().zip(&w[..m]).map(|(x, y)| x * y).sum();
        let half = 0.5 * tau * vtp;
        for i in 0..m {
            w[i] -= half * v[i];
        }
        // A' -= v wᵀ + w vᵀ
        let (v_ref, w_ref) = (&v[..m], &w[..m]);
        let update = |(i, row): (usize, &mut [f64])| {
            let (vi, wi) = (v_ref[i], w_ref[i]);
            let tail = &mut row[base..];
            for j in 0..m {
                tail[j] -= vi * w_ref[j] + wi * v_ref[j];
            }
        };
        let block = &mut a[base * n..];
        if m >= PAR_MIN_DIM {
            block.par_chunks_mut(n).enumerate().for_each(update);
        } else {
            block.chunks_mut(n).enumerate().for_each(update);
        }
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + n - 2];
        off[n - 2] = a[(n - 1) * n + n - 2];
    }
    if n >= 1 {
        diag[n - 1] = a[(n - 1) * n + n - 1];
    }
    (diag, off)
}

/// Implicit QL on a symmetric tridiagonal matrix. `off[i]` couples `i` and
/// `i+1`; `off[n-1]` is ignored. Eigenvalues are left in `diag`.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    // Off-diagonals below ε·‖T‖ are negligible; without this floor, blocks of
    // zero eigenvalues never deflate.
    let norm = (0..n).map(|i| diag[i].abs() + off[i].abs()).fold(0.0, f64::max);
    let floor = f64::EPSILON * norm;
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= (f64::EPSILON * dd).max(floor) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::NonConvergence {
                    what: "tridiagonal QL",
                    iterations: MAX_QL_SWEEPS,
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// All eigenvalues of the row-major symmetric matrix `a` (consumed as scratch),
/// in descending order.
pub(crate) fn symmetric_eigenvalues_row_major(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let (mut diag, mut off) = tridiagonalize(&mut a, n);
    tridiagonal_ql(&mut diag, &mut off)?;
    diag.sort_by(|x, y| y.total_cmp(x));
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_ql_on_known_spectrum() {
        // Path-graph Laplacian-like matrix: 2 on the diagonal, -1 off it.
        let n = 12;
        let mut d = vec![2.0; n];
        let mut e = vec![-1.0; n];
        tridiagonal_ql(&mut d, &mut e).unwrap();
        d.sort_by(|a, b| a.total_cmp(b));
        for (k, &got) in d.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((got - want).abs() < 1e-12, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn small_cases() {
        assert_eq!(symmetric_eigenvalues_row_major(vec![], 0).unwrap(), Vec::<f64>::new());
        assert_eq!(symmetric_eigenvalues_row_major(vec![5.0], 1).unwrap(), vec![5.0]);
        let e = symmetric_eigenvalues_row_major(vec![0.0, 1.0, 1.0, 0.0], 2).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-15 && (e[1] + 1.0).abs() < 1e-15);
    }
}

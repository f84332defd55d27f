//! One-sided (Hestenes) Jacobi SVD. Small singular values come out with
//! absolute accuracy near machine precision, which the null-space
//! computations in the structure module rely on.

use super::matrix::{inner, CMatrix, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

#[derive(Clone, Debug)]
pub struct Svd {
    /// Descending.
    pub singular_values: Vec<f64>,
    /// Left singular vectors for the nonzero singular values (rows x k).
    pub u: CMatrix,
    /// Right singular vectors, full unitary (cols x cols), column k pairs with `singular_values[k]`.
    pub v: CMatrix,
}

/// SVD of an `m x n` matrix with `m >= n`. Wider inputs go through the adjoint.
#[allow(clippy::needless_range_loop)]
pub fn svd(a: &CMatrix) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::invalid("svd input has non-finite entries"));
    }
    if a.rows() < a.cols() {
        // A = U S V^dagger  <=>  A^dagger = V S U^dagger; complete the short side
        let t = svd(&a.adjoint())?;
        let n = a.cols();
        let m = a.rows();
        // right vectors of A are left vectors of A^dagger, padded to a full basis
        let mut cols: Vec<Vec<C64>> = (0..t.u.cols()).map(|k| t.u.column(k)).collect();
        let mut candidates: Vec<Vec<C64>> = cols.clone();
        for k in 0..n {
            let mut e = vec![ZERO; n];
            e[k] = C64::new(1.0, 0.0);
            candidates.push(e);
        }
        let full = super::matrix::orthonormalize(&candidates, 1e-8);
        cols = full;
        cols.truncate(n);
        let v = CMatrix::from_columns(n, &cols);
        let u = CMatrix::from_fn(m, t.u.cols(), |i, j| t.v[(i, j)]);
        let mut sv = t.singular_values.clone();
        sv.resize(n, 0.0);
        return Ok(Svd {
            singular_values: sv,
            u,
            v,
        });
    }

    let m = a.rows();
    let n = a.cols();
    // work on columns: w[j] is column j
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();

    let eps = f64::EPSILON;
    let fro2: f64 = w.iter().flatten().map(|z| z.norm_sqr()).sum();
    // columns below this are numerically zero and only churn under rotation
    let negligible = (eps * eps) * fro2;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&w[p], &w[q]);
                let g = gamma.norm();
                if g == 0.0
                    || g <= eps * (alpha * beta).sqrt()
                    || alpha.min(beta) <= negligible
                {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let theta = (beta - alpha) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let j11 = C64::new(c, 0.0);
                let j12 = C64::new(s, 0.0);
                let j21 = -phase.conj() * s;
                let j22 = phase.conj() * c;
                for k in 0..m {
                    let x = w[p][k];
                    let y = w[q][k];
                    w[p][k] = x * j11 + y * j21;
                    w[q][k] = x * j12 + y * j22;
                }
                for k in 0..n {
                    let x = v[p][k];
                    let y = v[q][k];
                    v[p][k] = x * j11 + y * j21;
                    v[q][k] = x * j12 + y * j22;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Internal("Jacobi SVD did not converge".into()));
    }

    let norms: Vec<f64> = w
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let singular_values: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let vmat = CMatrix::from_fn(n, n, |i, j| v[order[j]][i]);
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let nonzero: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&k| norms[k] > smax * 1e-300 && norms[k] > 0.0)
        .collect();
    let u = CMatrix::from_fn(m, nonzero.len(), |i, j| w[nonzero[j]][i] / norms[nonzero[j]]);
    Ok(Svd {
        singular_values,
        u,
        v: vmat,
    })
}

/// Orthonormal basis of `{x : A x = 0}` using singular values at or below `threshold`.
pub fn null_space(a: &CMatrix, threshold: f64) -> Result<Vec<Vec<C64>>> {
    let s = svd(a)?;
    Ok((0..a.cols())
        .filter(|&k| s.singular_values[k] <= threshold)
        .map(|k| s.v.column(k))
        .collect())
}

/// Numerical rank: singular values above `rel_tol * sigma_max`.
pub fn rank(a: &CMatrix, rel_tol: f64) -> Result<usize> {
    let s = svd(a)?;
    let smax = s.singular_values.first().copied().unwrap_or(0.0);
    Ok(s.singular_values.iter().filter(|&&x| x > rel_tol * smax && x > 0.0).count())
}

/// Trace norm (sum of singular values) of a general matrix.
pub fn trace_norm(a: &CMatrix) -> Result<f64> {
    Ok(svd(a)?.singular_values.iter().sum())
}

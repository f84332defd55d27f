//! Finite-dimensional *-algebras of matrices, stored as a Hilbert-Schmidt
//! orthonormal basis.

use crate::error::{Error, Result};
use crate::linalg::{inner, svd, vec_norm, CMatrix, C64};

/// Generators whose relative norm after projection falls below this are
/// linearly dependent on the current basis. Generators usually come out of a
/// null-space solve with errors near 1e-11, so this sits well above that.
pub const GS_DROP_TOL: f64 = 1e-7;
/// A product of two basis elements is outside the span when its projection
/// residual exceeds this.
pub const CLOSURE_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct OperatorAlgebra {
    ambient_dim: usize,
    basis: Vec<CMatrix>,
}

impl OperatorAlgebra {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Residual of `x` after orthogonal projection onto the span.
    pub fn projection_residual(&self, x: &CMatrix) -> f64 {
        let mut r = x.clone();
        for b in &self.basis {
            let c = b.hs_inner(&r);
            r.axpy(-c, b);
        }
        r.frobenius_norm()
    }

    /// Largest relative residual over adjoints and pairwise products of the basis.
    pub fn closure_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.basis {
            worst = worst.max(self.projection_residual(&a.adjoint()));
            for b in &self.basis {
                let p = a.matmul(b);
                let n = p.frobenius_norm();
                if n > 0.0 {
                    worst = worst.max(self.projection_residual(&p) / n);
                }
            }
        }
        worst
    }
}

struct SpanBuilder {
    basis: Vec<Vec<C64>>,
}

impl SpanBuilder {
    /// Adds `v` if its residual is above `tol * reference`. Two passes of
    /// modified Gram-Schmidt keep the basis orthonormal to machine precision.
    fn push(&mut self, v: Vec<C64>, tol: f64, reference: f64) -> bool {
        let n0 = reference;
        if n0 == 0.0 || vec_norm(&v) == 0.0 {
            return false;
        }
        let mut r = v;
        for _ in 0..2 {
            for b in &self.basis {
                let c = inner(b, &r);
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let n = vec_norm(&r);
        if n <= tol * n0 {
            return false;
        }
        for x in &mut r {
            *x /= n;
        }
        self.basis.push(r);
        true
    }
}

/// Smallest adjoint- and product-closed subspace containing `generators`.
pub fn algebra_closure(generators: &[CMatrix], ambient_dim: usize) -> Result<OperatorAlgebra> {
    for g in generators {
        if g.rows() != ambient_dim || g.cols() != ambient_dim {
            return Err(Error::dims(format!(
                "algebra generator is {}x{}, ambient dimension {ambient_dim}",
                g.rows(),
                g.cols()
            )));
        }
    }
    let d = ambient_dim;
    let mut span = SpanBuilder { basis: Vec::new() };
    // Splitting each generator separately promotes the noise in a tiny
    // Hermitian or anti-Hermitian part, so the parts are ranked jointly
    let mut parts = Vec::new();
    for g in generators {
        let n = g.frobenius_norm();
        if n == 0.0 {
            continue;
        }
        let h = g.hermitian_part();
        let ah = (g - &h).scale_c(C64::new(0.0, -1.0));
        parts.push(h.scale(1.0 / n).vectorize());
        parts.push(ah.scale(1.0 / n).vectorize());
    }
    if !parts.is_empty() {
        let stacked = CMatrix::from_columns(d * d, &parts);
        let s = svd(&stacked)?;
        let top = s.singular_values[0];
        for k in 0..s.u.cols() {
            if s.singular_values[k] > GS_DROP_TOL * top {
                span.push(s.u.column(k), GS_DROP_TOL, 1.0);
            }
        }
    }

    let max_rounds = d * d + 1;
    let mut checked = 0usize;
    for _ in 0..max_rounds {
        let n = span.basis.len();
        if checked == n {
            let basis = span
                .basis
                .iter()
                .map(|v| CMatrix::unvectorize(d, d, v))
                .collect();
            return Ok(OperatorAlgebra {
                ambient_dim: d,
                basis,
            });
        }
        let mats: Vec<CMatrix> = span
            .basis
            .iter()
            .map(|v| CMatrix::unvectorize(d, d, v))
            .collect();
        // products involving at least one element added since the last round
        for i in 0..n {
            for j in 0..n {
                if i < checked && j < checked {
                    continue;
                }
                // basis elements have unit norm, so rounding in the product is
                // relative to 1 and not to the (possibly tiny) product norm;
                // the span is adjoint-closed, so products need no splitting
                let p = mats[i].matmul(&mats[j]);
                span.push(p.vectorize(), CLOSURE_TOL, 1.0);
            }
        }
        checked = n;
        if span.basis.len() > d * d {
            return Err(Error::Internal("algebra span exceeded the ambient matrix space".into()));
        }
    }
    Err(Error::Internal("algebra closure did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::pauli_matrices;

    #[test]
    fn identity_generates_scalars() {
        let a = algebra_closure(&[CMatrix::identity(3)], 3).unwrap();
        assert_eq!(a.dim(), 1);
    }

    #[test]
    fn x_and_z_generate_everything() {
        let p = pauli_matrices();
        let a = algebra_closure(&[p[1].clone(), p[3].clone()], 2).unwrap();
        assert_eq!(a.dim(), 4);
        assert!(a.closure_defect() < 1e-12);
    }

    #[test]
    fn basis_is_orthonormal() {
        let p = pauli_matrices();
        let a = algebra_closure(&[p[1].clone()], 2).unwrap();
        for (i, x) in a.basis().iter().enumerate() {
            for (j, y) in a.basis().iter().enumerate() {
                let g = x.hs_inner(y);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_projector_generates_two_dim_algebra() {
        let p = CMatrix::diag_real(&[1.0, 1.0, 0.0]);
        let a = algebra_closure(&[p], 3).unwrap();
        assert_eq!(a.dim(), 1);
        let a = algebra_closure(&[CMatrix::diag_real(&[1.0, 2.0, 0.0])], 3).unwrap();
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn rejects_wrong_shape() {
        assert!(algebra_closure(&[CMatrix::identity(2)], 3).is_err());
    }
}

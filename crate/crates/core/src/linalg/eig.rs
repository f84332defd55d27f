//! Cyclic Jacobi eigensolver for Hermitian matrices and the spectral
//! functions built on it (PSD roots, trace norm, support projectors).

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Input Hermiticity tolerance (Frobenius norm of `H - H^dagger`).
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Off-diagonal Frobenius mass at which sweeps stop, relative to `max(1, ||H||_F)`.
pub const JACOBI_TOL: f64 = 1e-12;
/// Eigenvalues at or below this fraction of the largest one are outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub basis: CMatrix,
}

impl SpectralDecomposition {
    pub fn reassemble(&self) -> CMatrix {
        self.map_eigenvalues(|x| x)
    }

    /// `U f(diag) U^dagger`
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let u = &self.basis;
        let fv: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let mut out = CMatrix::zeros(n, n);
        for (k, &w) in fv.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = u[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += a * u[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.basis.column(k)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Absolute threshold for support decisions on this spectrum.
    pub fn support_threshold(&self) -> f64 {
        SUPPORT_CUTOFF * self.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Indices (ascending eigenvalue order) of eigenvalues above the support cutoff.
    pub fn support_indices(&self) -> Vec<usize> {
        let thr = self.support_threshold();
        (0..self.eigenvalues.len())
            .filter(|&k| self.eigenvalues[k] > thr)
            .collect()
    }

    /// Isometry whose columns span the support, in ascending eigenvalue order.
    pub fn support_isometry(&self) -> CMatrix {
        let idx = self.support_indices();
        CMatrix::from_fn(self.basis.rows(), idx.len(), |i, j| self.basis[(i, idx[j])])
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is Hermitized by averaging with its adjoint first; inputs whose
/// defect exceeds [`HERMITIAN_TOL`] are rejected.
pub fn hermitian_eig(h: &CMatrix) -> Result<SpectralDecomposition> {
    if !h.is_square() {
        return Err(Error::dims(format!("eig of a {}x{} matrix", h.rows(), h.cols())));
    }
    if !h.is_finite() {
        return Err(Error::invalid("eig input has non-finite entries"));
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    for _sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off < JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if mag < 1e-18 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] in the (p, q) plane
                let j11 = C64::new(c, 0.0);
                let j12 = C64::new(s, 0.0);
                let j21 = -phase.conj() * s;
                let j22 = phase.conj() * c;
                rotate(&mut a, &mut v, p, q, [j11, j12, j21, j22]);
                a[(p, p)] = C64::new(app - t * mag, 0.0);
                a[(q, q)] = C64::new(aqq + t * mag, 0.0);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
            }
        }
    }
    let off = off_diagonal_norm(&a);
    if off >= JACOBI_TOL * scale * 1e3 {
        return Err(Error::Internal(format!(
            "Jacobi eigensolver did not converge (off-diagonal mass {off:.3e})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let basis = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SpectralDecomposition { eigenvalues, basis })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// `A <- J^dagger A J`, `V <- V J` for a rotation acting on columns p, q.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, j: [C64; 4]) {
    let [j11, j12, j21, j22] = j;
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j11 + akq * j21;
        a[(k, q)] = akp * j12 + akq * j22;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j11.conj() * apk + j21.conj() * aqk;
        a[(q, k)] = j12.conj() * apk + j22.conj() * aqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j11 + vkq * j21;
        v[(k, q)] = vkp * j12 + vkq * j22;
    }
}

/// Most negative eigenvalue tolerated (and clamped to zero) by `psd_roots`.
pub const PSD_NEGATIVE_TOL: f64 = 1e-10;

/// Square root and support pseudo-inverse square root of a PSD matrix.
#[derive(Clone, Debug)]
pub struct PsdRoots {
    pub sqrt: CMatrix,
    pub pinv_sqrt: CMatrix,
}

pub fn psd_roots(p: &CMatrix) -> Result<PsdRoots> {
    let eig = hermitian_eig(p)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -PSD_NEGATIVE_TOL {
        return Err(Error::NotPsd(min));
    }
    let thr = eig.support_threshold();
    Ok(PsdRoots {
        // rounding-level eigenvalues would otherwise contribute ~1e-8 entries
        sqrt: eig.map_eigenvalues(|x| if x > thr { x.sqrt() } else { 0.0 }),
        pinv_sqrt: eig.map_eigenvalues(|x| if x > thr { 1.0 / x.sqrt() } else { 0.0 }),
    })
}

/// Orthogonal projector onto the support of a PSD matrix.
pub fn support_projector(p: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(p)?;
    let thr = eig.support_threshold();
    Ok(eig.map_eigenvalues(|x| if x > thr { 1.0 } else { 0.0 }))
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(h: &CMatrix) -> Result<f64> {
    Ok(hermitian_eig(h)?.eigenvalues.iter().map(|x| x.abs()).sum())
}

/// `||a - b||_1 / 2` for Hermitian `a`, `b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(0.5 * trace_norm_hermitian(&(a - b))?)
}

/// `U^dagger U - I` Frobenius norm.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let g = u.adjoint().matmul(u);
    (&g - &CMatrix::identity(g.rows())).frobenius_norm()
}

/// Checks `W^dagger W = I` and returns the defect.
pub fn isometry_defect(w: &CMatrix) -> f64 {
    unitarity_defect(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_x_spectrum() {
        let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = hermitian_eig(&x).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(unitarity_defect(&e.basis) < 1e-12);
    }

    #[test]
    fn diagonal_input_keeps_identity_basis() {
        let d = CMatrix::diag_real(&[0.2, 0.8]);
        let e = hermitian_eig(&d).unwrap();
        assert_eq!(e.eigenvalues, vec![0.2, 0.8]);
        assert_eq!(e.basis, CMatrix::identity(2));
        let d = CMatrix::diag_real(&[0.8, 0.2]);
        let e = hermitian_eig(&d).unwrap();
        assert_eq!(e.eigenvalues, vec![0.2, 0.8]);
        assert_eq!(e.basis, CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn complex_hermitian() {
        let y = CMatrix::from_rows(&[
            vec![ZERO, C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), ZERO],
        ])
        .unwrap();
        let e = hermitian_eig(&y).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!(e.reassemble().max_abs_diff(&y) < 1e-14);
    }

    #[test]
    fn psd_roots_identity_and_kernel() {
        let r = psd_roots(&CMatrix::identity(3)).unwrap();
        assert!(r.sqrt.max_abs_diff(&CMatrix::identity(3)) < 1e-15);
        assert!(r.pinv_sqrt.max_abs_diff(&CMatrix::identity(3)) < 1e-15);
        let r = psd_roots(&CMatrix::diag_real(&[4.0, 0.0])).unwrap();
        assert!(r.sqrt.max_abs_diff(&CMatrix::diag_real(&[2.0, 0.0])) < 1e-15);
        assert!(r.pinv_sqrt.max_abs_diff(&CMatrix::diag_real(&[0.5, 0.0])) < 1e-15);
    }

    #[test]
    fn psd_roots_rejects_negative() {
        let m = CMatrix::diag_real(&[1.0, -1e-6]);
        assert!(matches!(psd_roots(&m), Err(Error::NotPsd(_))));
        // tiny negatives are clamped
        let m = CMatrix::diag_real(&[1.0, -1e-12]);
        let r = psd_roots(&m).unwrap();
        assert_eq!(r.sqrt[(1, 1)], ZERO);
    }
}

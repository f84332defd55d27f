//! Density matrices on labeled multipartite spaces, von Neumann entropy and purification.

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, CMatrix, C64, ZERO};

/// Hermiticity, trace and positivity tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-9;
/// Eigenvalues at or below this contribute nothing to the entropy.
pub const ENTROPY_EIG_FLOOR: f64 = 1e-12;

/// A density matrix together with its tensor-factor dimensions and labels.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipartiteState {
    matrix: CMatrix,
    dims: Vec<usize>,
    labels: Vec<String>,
}

/// Checks the density-matrix invariants of a bare matrix.
pub fn validate_density(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::dims(format!("density matrix is {}x{}", m.rows(), m.cols())));
    }
    if !m.is_finite() {
        return Err(Error::invalid("density matrix has non-finite entries"));
    }
    let defect = m.hermiticity_defect();
    if defect > DENSITY_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
        return Err(Error::InvalidTrace(tr.re));
    }
    let eig = hermitian_eig(m)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -DENSITY_TOL {
        return Err(Error::NotPsd(min));
    }
    Ok(())
}

impl MultipartiteState {
    pub fn new(matrix: CMatrix, dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        let state = Self::from_parts_unchecked(matrix, dims, labels)?;
        validate_density(&state.matrix)?;
        Ok(state)
    }

    /// Shape checks only; the density invariants are the caller's responsibility.
    pub(crate) fn from_parts_unchecked(
        matrix: CMatrix,
        dims: Vec<usize>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if dims.len() != labels.len() {
            return Err(Error::dims(format!(
                "{} dims but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::dims(format!("invalid subsystem dims {dims:?}")));
        }
        let total: usize = dims.iter().product();
        if !matrix.is_square() || matrix.rows() != total {
            return Err(Error::dims(format!(
                "dims {dims:?} need a {total}x{total} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::invalid(format!("duplicate subsystem label {l:?}")));
            }
        }
        Ok(Self {
            matrix,
            dims,
            labels,
        })
    }

    /// Convenience constructor with `&str` labels.
    pub fn with_labels(matrix: CMatrix, dims: &[usize], labels: &[&str]) -> Result<Self> {
        Self::new(
            matrix,
            dims.to_vec(),
            labels.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub(crate) fn with_labels_unchecked(matrix: CMatrix, dims: &[usize], labels: &[&str]) -> Result<Self> {
        Self::from_parts_unchecked(
            matrix,
            dims.to_vec(),
            labels.iter().map(|s| s.to_string()).collect(),
        )
    }

    /// Pure state `|psi><psi|` from a (not necessarily normalized) ket.
    pub fn pure(ket: &[C64], dims: &[usize], labels: &[&str]) -> Result<Self> {
        let n = linalg::vec_norm(ket);
        if n == 0.0 {
            return Err(Error::invalid("zero ket"));
        }
        let v: Vec<C64> = ket.iter().map(|z| z / n).collect();
        Self::with_labels(CMatrix::projector(&v), dims, labels)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::invalid(format!("unknown subsystem label {label:?}")))
    }

    pub(crate) fn require_arity(&self, n: usize, what: &str) -> Result<()> {
        if self.arity() != n {
            return Err(Error::invalid(format!(
                "{what} needs {n} subsystems, state has {} ({:?})",
                self.arity(),
                self.labels
            )));
        }
        Ok(())
    }

    /// Reduced state on the given subsystem indices, in the order listed.
    pub fn marginal(&self, keep: &[usize]) -> Result<MultipartiteState> {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        let reduced = linalg::partial_trace(&self.matrix, &self.dims, &sorted)?;
        let sorted_dims: Vec<usize> = sorted.iter().map(|&k| self.dims[k]).collect();
        // undo the ascending order imposed by partial_trace
        let perm: Vec<usize> = keep
            .iter()
            .map(|k| sorted.iter().position(|s| s == k).unwrap())
            .collect();
        let matrix = if perm.iter().enumerate().all(|(i, &p)| i == p) {
            reduced
        } else {
            linalg::permute_subsystems(&reduced, &sorted_dims, &perm)?
        };
        Self::from_parts_unchecked(
            matrix,
            keep.iter().map(|&k| self.dims[k]).collect(),
            keep.iter().map(|&k| self.labels[k].clone()).collect(),
        )
    }

    pub fn marginal_by_labels(&self, labels: &[&str]) -> Result<MultipartiteState> {
        let idx: Vec<usize> = labels
            .iter()
            .map(|l| self.index_of(l))
            .collect::<Result<_>>()?;
        self.marginal(&idx)
    }

    /// Entropy (bits) of the marginal on the given subsystem indices; the empty set has entropy 0.
    pub fn entropy_of(&self, subsystems: &[usize]) -> Result<f64> {
        if subsystems.is_empty() {
            return Ok(0.0);
        }
        let m = self.marginal(subsystems)?;
        von_neumann_entropy(m.matrix())
    }

    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(&self.matrix)
    }

    /// Reorders subsystems: new subsystem `k` is old subsystem `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<MultipartiteState> {
        let matrix = linalg::permute_subsystems(&self.matrix, &self.dims, perm)?;
        Self::from_parts_unchecked(
            matrix,
            perm.iter().map(|&p| self.dims[p]).collect(),
            perm.iter().map(|&p| self.labels[p].clone()).collect(),
        )
    }

    pub fn relabeled(&self, labels: &[&str]) -> Result<MultipartiteState> {
        Self::from_parts_unchecked(
            self.matrix.clone(),
            self.dims.clone(),
            labels.iter().map(|s| s.to_string()).collect(),
        )
    }

    /// Largest eigenvalue; 1 for pure states.
    pub fn purity_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eig(&self.matrix)?.max_eigenvalue())
    }
}

/// `S(rho) = -Tr rho log2 rho` in bits.
///
/// Eigenvalues in `[-1e-9, 0)` count as zero; more negative ones reject the input.
pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    let eig = hermitian_eig(rho)?;
    entropy_of_spectrum(&eig.eigenvalues)
}

pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &x in eigenvalues {
        if x < -DENSITY_TOL {
            return Err(Error::NotPsd(x));
        }
        if x > ENTROPY_EIG_FLOOR {
            s -= x * x.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Purification `|Omega> = sum_k sqrt(lambda_k) |v_k>|k>` over the support,
/// eigenvectors taken in ascending eigenvalue order. The new subsystem is appended last.
pub fn purify(rho: &MultipartiteState, new_label: &str) -> Result<MultipartiteState> {
    if rho.labels().iter().any(|l| l == new_label) {
        return Err(Error::invalid(format!("label {new_label:?} already in use")));
    }
    let ket = purification_ket(rho.matrix())?;
    let r = ket.len() / rho.dim();
    let mut dims = rho.dims().to_vec();
    dims.push(r);
    let mut labels = rho.labels().to_vec();
    labels.push(new_label.to_string());
    MultipartiteState::from_parts_unchecked(CMatrix::projector(&ket), dims, labels)
}

/// The purifying ket itself (length `dim * rank`).
pub fn purification_ket(rho: &CMatrix) -> Result<Vec<C64>> {
    let eig = hermitian_eig(rho)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -DENSITY_TOL {
        return Err(Error::NotPsd(min));
    }
    let support = eig.support_indices();
    let r = support.len().max(1);
    let n = rho.rows();
    let mut ket = vec![ZERO; n * r];
    for (k, &idx) in support.iter().enumerate() {
        let w = eig.eigenvalues[idx].max(0.0).sqrt();
        for i in 0..n {
            ket[i * r + k] = eig.basis[(i, idx)] * w;
        }
    }
    // renormalize away the discarded tail
    let norm = linalg::vec_norm(&ket);
    if norm == 0.0 {
        return Err(Error::invalid("cannot purify the zero operator"));
    }
    Ok(ket.into_iter().map(|z| z / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn entropy_unit_values() {
        assert_eq!(von_neumann_entropy(&CMatrix::diag_real(&[1.0, 0.0])).unwrap(), 0.0);
        let s = von_neumann_entropy(&CMatrix::identity(2).scale(0.5)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        let s = von_neumann_entropy(&CMatrix::diag_real(&[0.5, 0.25, 0.25])).unwrap();
        assert!((s - 1.5).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_negative() {
        let m = CMatrix::diag_real(&[1.1, -0.1]);
        assert!(matches!(von_neumann_entropy(&m), Err(Error::NotPsd(_))));
    }

    #[test]
    fn validation_catches_bad_trace() {
        let m = CMatrix::diag_real(&[0.5, 0.4]);
        let err = MultipartiteState::with_labels(m, &[2], &["A"]).unwrap_err();
        assert!(matches!(err, Error::InvalidTrace(_)));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let m = CMatrix::identity(4).scale(0.25);
        assert!(MultipartiteState::with_labels(m, &[2, 2], &["A", "A"]).is_err());
    }

    #[test]
    fn purify_pure_input_has_trivial_reference() {
        let psi = MultipartiteState::pure(&[c(0.6), c(0.8)], &[2], &["A"]).unwrap();
        let p = purify(&psi, "D").unwrap();
        assert_eq!(p.dims(), &[2, 1]);
        assert!(p.matrix().max_abs_diff(psi.matrix()) < 1e-12);
    }

    #[test]
    fn purify_maximally_mixed_gives_bell() {
        let rho = MultipartiteState::with_labels(CMatrix::identity(2).scale(0.5), &[2], &["A"]).unwrap();
        let p = purify(&rho, "D").unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CMatrix::projector(&[c(s), c(0.0), c(0.0), c(s)]);
        assert!(p.matrix().max_abs_diff(&bell) < 1e-12);
    }

    #[test]
    fn marginal_respects_requested_order() {
        let a = CMatrix::diag_real(&[1.0, 0.0]);
        let b = CMatrix::diag_real(&[0.0, 0.0, 1.0]);
        let ab = linalg::kron(&a, &b).unwrap();
        let st = MultipartiteState::with_labels(ab, &[2, 3], &["A", "B"]).unwrap();
        let ba = st.marginal(&[1, 0]).unwrap();
        assert_eq!(ba.dims(), &[3, 2]);
        assert_eq!(ba.labels(), &["B".to_string(), "A".to_string()]);
        assert_eq!(ba.matrix(), &linalg::kron(&b, &a).unwrap());
    }
}

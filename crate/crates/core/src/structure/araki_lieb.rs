//! Factorization of states with `S(BC) = S(B) - S(C)` into
//! `omega_L (x) |psi><psi|_RC` with `H_B = H_L (x) H_R`.

use serde::{Deserialize, Serialize};

use super::markov::REASSEMBLY_TOL;
use super::theorem1::PURITY_TOL;
use crate::error::{Error, Result};
use crate::gaps::araki_lieb_gap;
use crate::linalg::{hermitian_eig, isometry_defect, kron, trace_distance, CMatrix, C64};
use crate::state::MultipartiteState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArakiLiebStructure {
    pub dim_l: usize,
    pub dim_r: usize,
    /// Maps `H_L (x) H_R` (L-major) into `H_B`.
    pub isometry: CMatrix,
    pub omega_l: CMatrix,
    /// Pure state on `H_R (x) H_C`.
    pub psi_rc: CMatrix,
    pub dims: [usize; 2],
    pub reassembly_error: f64,
}

impl ArakiLiebStructure {
    pub fn reassemble(&self) -> Result<CMatrix> {
        let local = kron(&self.omega_l, &self.psi_rc)?;
        let emb = kron(&self.isometry, &CMatrix::identity(self.dims[1]))?;
        Ok(emb.conjugate(&local))
    }
}

pub fn araki_lieb_decompose(omega: &MultipartiteState, tol: f64) -> Result<ArakiLiebStructure> {
    omega.require_arity(2, "araki_lieb_decompose")?;
    let gap = araki_lieb_gap(omega, tol)?;
    if !gap.saturated {
        return Err(Error::NotSaturated {
            identity: "araki_lieb".into(),
            gap: gap.gap_bits,
            detail: format!("gap {:.6e} bits exceeds tolerance {tol:.1e}", gap.gap_bits),
        });
    }
    let (db, dc) = (omega.dims()[0], omega.dims()[1]);
    let w = omega.matrix();

    let eig_c = hermitian_eig(omega.marginal(&[1])?.matrix())?;
    let support = eig_c.support_indices();
    // descending eigenvalue order for a stable R basis
    let support: Vec<usize> = support.into_iter().rev().collect();
    let s: Vec<f64> = support.iter().map(|&k| eig_c.eigenvalues[k]).collect();
    let cvecs: Vec<Vec<C64>> = support.iter().map(|&k| eig_c.eigenvector(k)).collect();
    let r = support.len();

    // N_i1 = <c_i| omega |c_1> / sqrt(s_i s_1)
    let partial = |i: usize, j: usize| {
        let scale = 1.0 / (s[i] * s[j]).sqrt();
        CMatrix::from_fn(db, db, |x, y| {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..dc {
                for c2 in 0..dc {
                    acc += cvecs[i][c].conj() * w[(x * dc + c, y * dc + c2)] * cvecs[j][c2];
                }
            }
            acc * scale
        })
    };
    let n11 = partial(0, 0).hermitian_part();
    let eig_l = hermitian_eig(&n11)?;
    let lsup: Vec<usize> = eig_l.support_indices().into_iter().rev().collect();
    let wl: Vec<f64> = lsup.iter().map(|&k| eig_l.eigenvalues[k]).collect();
    let l = lsup.len();
    let n_i1: Vec<CMatrix> = (0..r).map(|i| partial(i, 0)).collect();

    let mut cols = vec![Vec::new(); l * r];
    for (a, &k) in lsup.iter().enumerate() {
        let v = eig_l.eigenvector(k);
        for (i, n) in n_i1.iter().enumerate() {
            cols[a * r + i] = n.mul_vec(&v).into_iter().map(|z| z / wl[a]).collect();
        }
    }
    let isometry = CMatrix::from_columns(db, &cols);
    let defect = isometry_defect(&isometry);
    if defect > 1e-6 {
        return Err(Error::verification("araki_lieb isometry", defect));
    }

    let total: f64 = wl.iter().sum();
    let omega_l = CMatrix::diag_real(&wl.iter().map(|x| x / total).collect::<Vec<_>>());
    let mut ket = vec![C64::new(0.0, 0.0); r * dc];
    for i in 0..r {
        for c in 0..dc {
            ket[i * dc + c] = cvecs[i][c] * s[i].sqrt();
        }
    }
    let psi_rc = CMatrix::projector(&ket);
    let purity = hermitian_eig(&psi_rc)?.max_eigenvalue();
    let mut st = ArakiLiebStructure {
        dim_l: l,
        dim_r: r,
        isometry,
        omega_l,
        psi_rc,
        dims: [db, dc],
        reassembly_error: 0.0,
    };
    if purity < 1.0 - PURITY_TOL {
        return Err(Error::verification("araki_lieb purity", 1.0 - purity));
    }
    let err = trace_distance(&st.reassemble()?, w)?;
    if err > REASSEMBLY_TOL {
        return Err(Error::verification("araki_lieb reassembly", err));
    }
    st.reassembly_error = err;
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaps::DEFAULT_GAP_TOL;

    fn bc(m: CMatrix, dims: &[usize]) -> MultipartiteState {
        MultipartiteState::with_labels(m, dims, &["B", "C"]).unwrap()
    }

    #[test]
    fn pure_state_has_trivial_l() {
        let ket = [
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.8),
        ];
        let st = bc(CMatrix::projector(&ket), &[2, 2]);
        let r = araki_lieb_decompose(&st, DEFAULT_GAP_TOL).unwrap();
        assert_eq!((r.dim_l, r.dim_r), (1, 2));
        assert!(r.reassembly_error < 1e-10);
    }

    #[test]
    fn maximally_mixed_l_with_bell() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CMatrix::projector(&[
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
        ]);
        let m = kron(&CMatrix::identity(2).scale(0.5), &bell).unwrap();
        let r = araki_lieb_decompose(&bc(m, &[4, 2]), DEFAULT_GAP_TOL).unwrap();
        assert_eq!((r.dim_l, r.dim_r), (2, 2));
        assert!(r.reassembly_error < 1e-10);
    }

    #[test]
    fn mixed_c_is_not_saturated() {
        let m = kron(&CMatrix::diag_real(&[0.3, 0.7]), &CMatrix::diag_real(&[0.4, 0.6])).unwrap();
        assert!(matches!(
            araki_lieb_decompose(&bc(m, &[2, 2]), DEFAULT_GAP_TOL),
            Err(Error::NotSaturated { .. })
        ));
    }
}

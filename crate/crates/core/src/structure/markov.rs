//! Block structure of states saturating `S(AB) + S(BC) >= S(ABC) + S(B)`.

use serde::{Deserialize, Serialize};

use super::algebra::algebra_closure;
use super::petz::petz_markov_error;
use super::wedderburn::{wedderburn_blocks, FactorDecomposition};
use crate::error::{Error, Result};
use crate::gaps::ssa_gap_v1;
use crate::linalg::{kron, null_space, psd_roots, trace_distance, CMatrix, C64};
use crate::state::MultipartiteState;

/// Trace-distance gate on every reassembled structure.
pub const REASSEMBLY_TOL: f64 = 1e-7;
/// Petz-recovery error above which a state is refused before decomposition.
pub const PETZ_GATE: f64 = 1e-6;
/// Singular values of `Lambda* - id` at or below this span the fixed points.
pub const FIXED_POINT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovStructure {
    pub b_decomposition: FactorDecomposition,
    pub weights: Vec<f64>,
    /// States on `A (x) b^L_j`.
    pub left_states: Vec<CMatrix>,
    /// States on `b^R_j (x) C`.
    pub right_states: Vec<CMatrix>,
    pub dims: [usize; 3],
    pub reassembly_error: f64,
}

impl MarkovStructure {
    /// `sum_j lambda_j (I (x) W_j (x) I)(left_j (x) right_j)(...)^dagger`
    pub fn reassemble(&self) -> Result<CMatrix> {
        let [da, db, dc] = self.dims;
        let d = da * db * dc;
        let mut out = CMatrix::zeros(d, d);
        for (k, blk) in self.b_decomposition.blocks.iter().enumerate() {
            let local = kron(&self.left_states[k], &self.right_states[k])?;
            let emb = kron(
                &CMatrix::identity(da),
                &kron(&blk.isometry, &CMatrix::identity(dc))?,
            )?;
            out.axpy(C64::new(self.weights[k], 0.0), &emb.conjugate(&local));
        }
        Ok(out)
    }
}

/// Matrix of `Y -> rho_B^{-1/2} Tr_C[S (Y (x) I) S] rho_B^{-1/2} - Y` on
/// row-major vectorized operators of B, where `S = rho_BC^{1/2}`.
pub fn dual_recovery_minus_identity(rho_b: &CMatrix, rho_bc: &CMatrix, db: usize, dc: usize) -> Result<CMatrix> {
    let s = psd_roots(rho_bc)?.sqrt;
    let pb = psd_roots(rho_b)?.pinv_sqrt;
    let n = db * db;
    let mut m = CMatrix::zeros(n, n);
    let idx = |b: usize, c: usize| b * dc + c;
    for a in 0..db {
        for b in 0..db {
            // Tr_C[S (E_ab (x) I) S]_{xy} = sum_{c,c'} S[(x,c'),(a,c)] S[(b,c),(y,c')]
            let t = CMatrix::from_fn(db, db, |x, y| {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..dc {
                    for c2 in 0..dc {
                        acc += s[(idx(x, c2), idx(a, c))] * s[(idx(b, c), idx(y, c2))];
                    }
                }
                acc
            });
            let img = pb.matmul(&t).matmul(&pb);
            let col = a * db + b;
            for (row, z) in img.as_slice().iter().enumerate() {
                m[(row, col)] = *z;
            }
            m[(col, col)] -= C64::new(1.0, 0.0);
        }
    }
    Ok(m)
}

/// Fixed-point algebra of the dual of `Tr_C o R_{B->BC}`, decomposed into blocks.
pub fn markov_algebra_blocks(rho: &MultipartiteState) -> Result<FactorDecomposition> {
    rho.require_arity(3, "markov_decompose")?;
    let (db, dc) = (rho.dims()[1], rho.dims()[2]);
    let rho_b = rho.marginal(&[1])?;
    let rho_bc = rho.marginal(&[1, 2])?;
    let m = dual_recovery_minus_identity(rho_b.matrix(), rho_bc.matrix(), db, dc)?;
    let fixed: Vec<CMatrix> = null_space(&m, FIXED_POINT_TOL)?
        .iter()
        .map(|v| CMatrix::unvectorize(db, db, v))
        .collect();
    if fixed.is_empty() {
        return Err(Error::verification("fixed-point algebra", f64::INFINITY));
    }
    let alg = algebra_closure(&fixed, db)?;
    let mut fd = wedderburn_blocks(&alg)?;
    fd.system_label = rho.labels()[1].clone();
    Ok(fd)
}

/// Recovers `rho_ABC = (+)_j lambda_j rho_{A b^L_j} (x) rho_{b^R_j C}`.
///
/// `tol` gates the SSA gap in bits. The structure is returned only after its
/// reassembly matches `rho` within [`REASSEMBLY_TOL`] trace distance.
pub fn markov_decompose(rho: &MultipartiteState, tol: f64) -> Result<MarkovStructure> {
    rho.require_arity(3, "markov_decompose")?;
    let gap = ssa_gap_v1(rho, tol)?;
    if !gap.saturated {
        return Err(Error::NotSaturated {
            identity: "ssa_v1".into(),
            gap: gap.gap_bits,
            detail: format!("conditional mutual information {:.6e} bits exceeds tolerance {tol:.1e}", gap.gap_bits),
        });
    }
    let petz = petz_markov_error(rho)?;
    if petz > PETZ_GATE {
        return Err(Error::NotSaturated {
            identity: "ssa_v1".into(),
            gap: gap.gap_bits,
            detail: format!("Petz recovery error {petz:.3e} exceeds {PETZ_GATE:.0e}"),
        });
    }
    let fd = markov_algebra_blocks(rho)?;
    let (da, dc) = (rho.dims()[0], rho.dims()[2]);
    let db = rho.dims()[1];

    let mut parts = Vec::new();
    for blk in &fd.blocks {
        let (l, r) = (blk.dim_l, blk.dim_r);
        let emb = kron(
            &CMatrix::identity(da),
            &kron(&blk.isometry, &CMatrix::identity(dc))?,
        )?;
        let local = rho.matrix().compress(&emb).hermitian_part();
        let w = local.trace().re;
        if w <= 0.0 {
            return Err(Error::verification("markov block weight", w));
        }
        let st = MultipartiteState::from_parts_unchecked(
            local.scale(1.0 / w),
            vec![da, l, r, dc],
            vec!["A".into(), "bL".into(), "bR".into(), "C".into()],
        )?;
        let left = st.marginal(&[0, 1])?.into_matrix();
        let right = st.marginal(&[2, 3])?.into_matrix();
        parts.push((w, blk.clone(), left, right));
    }
    parts.sort_by(|x, y| y.0.total_cmp(&x.0).then(y.1.dim_l.cmp(&x.1.dim_l)));

    let total: f64 = parts.iter().map(|p| p.0).sum();
    let mut structure = MarkovStructure {
        b_decomposition: FactorDecomposition {
            system_label: fd.system_label.clone(),
            blocks: parts.iter().map(|p| p.1.clone()).collect(),
        },
        weights: parts.iter().map(|p| p.0 / total).collect(),
        left_states: parts.iter().map(|p| p.2.clone()).collect(),
        right_states: parts.iter().map(|p| p.3.clone()).collect(),
        dims: [da, db, dc],
        reassembly_error: 0.0,
    };
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::verification("markov block weights", (total - 1.0).abs()));
    }
    let err = trace_distance(&structure.reassemble()?, rho.matrix())?;
    if err > REASSEMBLY_TOL {
        return Err(Error::verification("markov reassembly", err));
    }
    structure.reassembly_error = err;
    Ok(structure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaps::DEFAULT_GAP_TOL;

    fn st(m: CMatrix, dims: &[usize]) -> MultipartiteState {
        MultipartiteState::with_labels(m, dims, &["A", "B", "C"]).unwrap()
    }

    fn mixed2() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.7, 0.2], &[0.2, 0.3]])
    }

    fn mixed4() -> CMatrix {
        let mut m = kron(&mixed2(), &CMatrix::diag_real(&[0.4, 0.6])).unwrap();
        m[(0, 3)] = C64::new(0.05, 0.02);
        m[(3, 0)] = C64::new(0.05, -0.02);
        m
    }

    #[test]
    fn product_across_c_is_one_left_block() {
        let s = st(kron(&mixed4(), &mixed2()).unwrap(), &[2, 2, 2]);
        let m = markov_decompose(&s, DEFAULT_GAP_TOL).unwrap();
        assert_eq!(m.b_decomposition.dim_multiset(), vec![(2, 1)]);
        assert!(m.reassembly_error < 1e-9);
        assert!((m.weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_across_a_is_one_right_block() {
        let s = st(kron(&mixed2(), &mixed4()).unwrap(), &[2, 2, 2]);
        let m = markov_decompose(&s, DEFAULT_GAP_TOL).unwrap();
        assert_eq!(m.b_decomposition.dim_multiset(), vec![(1, 2)]);
    }

    #[test]
    fn ghz_is_refused() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[0] = C64::new(s, 0.0);
        v[7] = C64::new(s, 0.0);
        let g = MultipartiteState::pure(&v, &[2, 2, 2], &["A", "B", "C"]).unwrap();
        assert!(matches!(
            markov_decompose(&g, DEFAULT_GAP_TOL),
            Err(Error::NotSaturated { .. })
        ));
    }

    #[test]
    fn classical_markov_chain() {
        // A = B = C for a classical bit: two one-dimensional blocks
        let mut m = CMatrix::zeros(8, 8);
        m[(0, 0)] = C64::new(0.3, 0.0);
        m[(7, 7)] = C64::new(0.7, 0.0);
        let s = st(m, &[2, 2, 2]);
        let r = markov_decompose(&s, DEFAULT_GAP_TOL).unwrap();
        assert_eq!(r.b_decomposition.dim_multiset(), vec![(1, 1), (1, 1)]);
        assert!((r.weights[0] - 0.7).abs() < 1e-12);
    }
}

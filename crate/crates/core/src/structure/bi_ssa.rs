//! States saturating SSA for both orderings (A,B,C) and (B,A,C).

use serde::{Deserialize, Serialize};

use super::markov::{markov_decompose, MarkovStructure, REASSEMBLY_TOL};
use crate::error::{Error, Result};
use crate::gaps::{ssa_gap_v1, GapReport};
use crate::linalg::{kron, partial_trace, trace_distance, CMatrix, C64};
use crate::state::MultipartiteState;

/// C-marginals closer than this (trace distance) belong to the same sector.
pub const SECTOR_TOL: f64 = 1e-7;
/// Block overlaps above this must agree on their sector.
const OVERLAP_CUTOFF: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiSsaSectors {
    pub abc: MarkovStructure,
    pub bac: MarkovStructure,
    /// Sector of each B-block of the (A,B,C) decomposition.
    pub sector_of_b_block: Vec<usize>,
    /// Sector of each A-block of the (B,A,C) decomposition.
    pub sector_of_a_block: Vec<usize>,
    /// `overlap[i][j]`: mass of A-block `i` and B-block `j` together.
    pub overlap: Vec<Vec<f64>>,
    pub sector_weights: Vec<f64>,
    pub sector_c_states: Vec<CMatrix>,
    pub reassembly_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiSsaReport {
    pub gap_abc: GapReport,
    pub gap_bac: GapReport,
    pub sectors: BiSsaSectors,
}

fn c_marginal(right: &CMatrix, dim_r: usize, dc: usize) -> Result<CMatrix> {
    partial_trace(right, &[dim_r, dc], &[1])
}

/// Index of the sector matching `state`, adding a new one if none does.
fn assign(sectors: &mut Vec<CMatrix>, state: &CMatrix) -> Result<usize> {
    for (k, s) in sectors.iter().enumerate() {
        if trace_distance(s, state)? <= SECTOR_TOL {
            return Ok(k);
        }
    }
    sectors.push(state.clone());
    Ok(sectors.len() - 1)
}

/// SSA gaps for (A,B,C) and (B,A,C); when both vanish, the sector structure
/// `(+)_k p_k rho_AB^(k) (x) rho_C^(k)` read off from both Markov decompositions.
pub fn bi_ssa_report(rho: &MultipartiteState, tol: f64) -> Result<BiSsaReport> {
    rho.require_arity(3, "bi_ssa_report")?;
    let swapped = rho.permuted(&[1, 0, 2])?;
    let gap_abc = ssa_gap_v1(rho, tol)?;
    let gap_bac = ssa_gap_v1(&swapped, tol)?;
    if !(gap_abc.saturated && gap_bac.saturated) {
        return Err(Error::NotSaturated {
            identity: "bi_ssa_pair".into(),
            gap: gap_abc.gap_bits.max(gap_bac.gap_bits),
            detail: format!(
                "gaps {:.6e} (A,B,C) and {:.6e} (B,A,C) bits, tolerance {tol:.1e}",
                gap_abc.gap_bits, gap_bac.gap_bits
            ),
        });
    }
    let (da, db, dc) = (rho.dims()[0], rho.dims()[1], rho.dims()[2]);
    let abc = markov_decompose(rho, tol)?;
    let bac = markov_decompose(&swapped, tol)?;

    let mut reps: Vec<CMatrix> = Vec::new();
    let mut sector_of_b_block = Vec::new();
    for (blk, right) in abc.b_decomposition.blocks.iter().zip(&abc.right_states) {
        sector_of_b_block.push(assign(&mut reps, &c_marginal(right, blk.dim_r, dc)?)?);
    }
    let mut sector_of_a_block = Vec::new();
    for (blk, right) in bac.b_decomposition.blocks.iter().zip(&bac.right_states) {
        sector_of_a_block.push(assign(&mut reps, &c_marginal(right, blk.dim_r, dc)?)?);
    }

    let a_blocks = &bac.b_decomposition.blocks;
    let b_blocks = &abc.b_decomposition.blocks;
    let mut overlap = vec![vec![0.0; b_blocks.len()]; a_blocks.len()];
    for (i, ab) in a_blocks.iter().enumerate() {
        for (j, bb) in b_blocks.iter().enumerate() {
            let emb = kron(&ab.isometry, &kron(&bb.isometry, &CMatrix::identity(dc))?)?;
            let p = rho.matrix().compress(&emb).trace().re;
            overlap[i][j] = p;
            if p > OVERLAP_CUTOFF && sector_of_a_block[i] != sector_of_b_block[j] {
                return Err(Error::verification("bi_ssa sector map", p));
            }
        }
    }

    // p_k rho_AB^(k) = Tr_C[(I (x) Pi_k (x) I) rho (I (x) Pi_k (x) I)]
    let d = da * db * dc;
    let mut reassembled = CMatrix::zeros(d, d);
    let mut sector_weights = vec![0.0; reps.len()];
    for (k, rep) in reps.iter().enumerate() {
        let mut pi = CMatrix::zeros(db, db);
        for (j, bb) in b_blocks.iter().enumerate() {
            if sector_of_b_block[j] == k {
                pi = &pi + &bb.isometry.matmul(&bb.isometry.adjoint());
            }
        }
        let big = kron(&CMatrix::identity(da), &kron(&pi, &CMatrix::identity(dc))?)?;
        let part = big.conjugate(rho.matrix());
        let ab = partial_trace(&part, &[da, db, dc], &[0, 1])?;
        sector_weights[k] = ab.trace().re;
        reassembled.axpy(C64::new(1.0, 0.0), &kron(&ab, rep)?);
    }
    let err = trace_distance(&reassembled, rho.matrix())?;
    if err > REASSEMBLY_TOL {
        return Err(Error::verification("bi_ssa reassembly", err));
    }
    Ok(BiSsaReport {
        gap_abc,
        gap_bac,
        sectors: BiSsaSectors {
            abc,
            bac,
            sector_of_b_block,
            sector_of_a_block,
            overlap,
            sector_weights,
            sector_c_states: reps,
            reassembly_error: err,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaps::DEFAULT_GAP_TOL;

    #[test]
    fn product_with_c_is_one_sector() {
        let ab = CMatrix::from_real_rows(&[
            &[0.4, 0.1, 0.0, 0.05],
            &[0.1, 0.2, 0.0, 0.0],
            &[0.0, 0.0, 0.1, 0.0],
            &[0.05, 0.0, 0.0, 0.3],
        ]);
        let m = kron(&ab, &CMatrix::diag_real(&[0.25, 0.75])).unwrap();
        let st = MultipartiteState::with_labels(m, &[2, 2, 2], &["A", "B", "C"]).unwrap();
        let r = bi_ssa_report(&st, DEFAULT_GAP_TOL).unwrap();
        let s = r.sectors;
        assert_eq!(s.sector_weights.len(), 1);
        assert!(s.reassembly_error < 1e-9);
    }

    #[test]
    fn ghz_has_no_sectors() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[0] = C64::new(s, 0.0);
        v[7] = C64::new(s, 0.0);
        let g = MultipartiteState::pure(&v, &[2, 2, 2], &["A", "B", "C"]).unwrap();
        match bi_ssa_report(&g, DEFAULT_GAP_TOL) {
            Err(Error::NotSaturated { gap, .. }) => assert!((gap - 1.0).abs() < 1e-9),
            other => panic!("expected NotSaturated, got {other:?}"),
        }
    }
}

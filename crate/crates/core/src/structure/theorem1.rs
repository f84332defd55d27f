//! Block structure of states saturating `S(A) + S(C) <= S(AB) + S(CB)`.
//!
//! The state is purified to ABCD. The SSA gap of the (B, A, D) grouping and
//! of the (B, C, D) grouping both equal the original gap, so each grouping is
//! a Markov chain whose middle-system decomposition splits A (resp. C) into
//! `a^L (x) a^R` (resp. `c^L (x) c^R`) blocks. Compressing the state onto every
//! pair of blocks gives the cells `mu_ij psi_{a^L B c^L} (x) sigma_{a^R c^R}`.

use serde::{Deserialize, Serialize};

use super::markov::{markov_decompose, REASSEMBLY_TOL};
use super::wedderburn::{FactorBlock, FactorDecomposition};
use crate::error::{Error, Result};
use crate::gaps::ssa_gap_v2;
use crate::linalg::{kron, permute_subsystems, trace_distance, CMatrix, C64};
use crate::state::{purify, MultipartiteState};

/// Block states whose largest eigenvalue is at least `1 - PURITY_TOL` count as pure.
pub const PURITY_TOL: f64 = 1e-7;
/// Maximum number of nested refinements of an impure cell.
pub const MAX_REFINEMENT_DEPTH: usize = 3;
/// Cells with less mass than this are treated as empty.
const CELL_CUTOFF: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremOneCell {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
    /// Pure state on `a^L_i (x) B (x) c^L_j`.
    pub pure_block: CMatrix,
    /// State on `a^R_i (x) c^R_j`.
    pub residual_state: CMatrix,
    /// Largest eigenvalue of `pure_block`.
    pub purity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremOneStructure {
    pub a_decomposition: FactorDecomposition,
    pub c_decomposition: FactorDecomposition,
    /// `joint_weights[i][j] = mu_ij`
    pub joint_weights: Vec<Vec<f64>>,
    /// Nonempty cells, row-major in `(i, j)`.
    pub cells: Vec<TheoremOneCell>,
    pub dims: [usize; 3],
    pub reassembly_error: f64,
    pub refinement_depth: usize,
}

impl TheoremOneStructure {
    pub fn worst_purity(&self) -> f64 {
        self.cells.iter().map(|c| c.purity).fold(1.0, f64::min)
    }

    /// Embedding `W_a,i (x) I_B (x) W_c,j` of cell `(i, j)`.
    fn cell_embedding(&self, i: usize, j: usize) -> Result<CMatrix> {
        cell_embedding(
            &self.a_decomposition.blocks[i],
            self.dims[1],
            &self.c_decomposition.blocks[j],
        )
    }

    /// `sum_ij mu_ij psi_ij (x) sigma_ij` pushed through the block isometries.
    pub fn reassemble(&self) -> Result<CMatrix> {
        let d: usize = self.dims.iter().product();
        let mut out = CMatrix::zeros(d, d);
        for cell in &self.cells {
            let local = self.cell_state(cell)?;
            let emb = self.cell_embedding(cell.i, cell.j)?;
            out.axpy(C64::new(cell.weight, 0.0), &emb.conjugate(&local));
        }
        Ok(out)
    }

    /// Normalized cell state in `(a^L, a^R, B, c^L, c^R)` order.
    fn cell_state(&self, cell: &TheoremOneCell) -> Result<CMatrix> {
        let a = &self.a_decomposition.blocks[cell.i];
        let c = &self.c_decomposition.blocks[cell.j];
        let prod = kron(&cell.pure_block, &cell.residual_state)?;
        // (aL, B, cL, aR, cR) -> (aL, aR, B, cL, cR)
        permute_subsystems(
            &prod,
            &[a.dim_l, self.dims[1], c.dim_l, a.dim_r, c.dim_r],
            &[0, 3, 1, 2, 4],
        )
    }

    /// Marginal of the structure on A: weights and `a^L (x) a^R` states per A-block.
    pub fn a_sectors(&self) -> Result<Vec<(f64, CMatrix)>> {
        let mut out = Vec::new();
        for (i, blk) in self.a_decomposition.blocks.iter().enumerate() {
            let d = blk.dim_l * blk.dim_r;
            let mut acc = CMatrix::zeros(d, d);
            let mut w = 0.0;
            for cell in self.cells.iter().filter(|c| c.i == i) {
                let c = &self.c_decomposition.blocks[cell.j];
                let st = MultipartiteState::from_parts_unchecked(
                    self.cell_state(cell)?,
                    vec![blk.dim_l, blk.dim_r, self.dims[1], c.dim_l, c.dim_r],
                    ["aL", "aR", "B", "cL", "cR"].map(String::from).to_vec(),
                )?;
                acc.axpy(C64::new(cell.weight, 0.0), st.marginal(&[0, 1])?.matrix());
                w += cell.weight;
            }
            if w > 0.0 {
                out.push((w, acc.scale(1.0 / w)));
            } else {
                out.push((0.0, acc));
            }
        }
        Ok(out)
    }
}

fn cell_embedding(a: &FactorBlock, db: usize, c: &FactorBlock) -> Result<CMatrix> {
    kron(&a.isometry, &kron(&CMatrix::identity(db), &c.isometry)?)
}

struct Cells {
    weights: Vec<Vec<f64>>,
    cells: Vec<TheoremOneCell>,
    /// Normalized cell states on `a_i (x) B (x) c_j` for refinement.
    raw: Vec<CMatrix>,
}

fn compute_cells(sigma: &CMatrix, db: usize, a: &[FactorBlock], c: &[FactorBlock]) -> Result<Cells> {
    let mut weights = vec![vec![0.0; c.len()]; a.len()];
    let mut cells = Vec::new();
    let mut raw = Vec::new();
    for (i, ab) in a.iter().enumerate() {
        for (j, cb) in c.iter().enumerate() {
            let emb = cell_embedding(ab, db, cb)?;
            let local = sigma.compress(&emb).hermitian_part();
            let w = local.trace().re;
            if w <= CELL_CUTOFF {
                continue;
            }
            weights[i][j] = w;
            let local = local.scale(1.0 / w);
            let st = MultipartiteState::from_parts_unchecked(
                local.clone(),
                vec![ab.dim_l, ab.dim_r, db, cb.dim_l, cb.dim_r],
                ["aL", "aR", "B", "cL", "cR"].map(String::from).to_vec(),
            )?;
            let psi = st.marginal(&[0, 2, 3])?;
            let purity = psi.purity_eigenvalue()?;
            let res = st.marginal(&[1, 4])?;
            cells.push(TheoremOneCell {
                i,
                j,
                weight: w,
                pure_block: psi.into_matrix(),
                residual_state: res.into_matrix(),
                purity,
            });
            raw.push(local);
        }
    }
    Ok(Cells {
        weights,
        cells,
        raw,
    })
}

fn compose(outer: &FactorBlock, inner: &FactorBlock) -> FactorBlock {
    FactorBlock {
        dim_l: inner.dim_l,
        dim_r: inner.dim_r,
        isometry: outer.isometry.matmul(&inner.isometry),
    }
}

/// Recovers the block structure of a state with vanishing `ssa_gap_v2`.
///
/// `tol` gates the entropy gap in bits. Impure cells that sit alone in their
/// row and column are refined by decomposing the cell again, at most
/// [`MAX_REFINEMENT_DEPTH`] levels deep; otherwise `RefinementExhausted` is
/// returned. The structure is returned only after its reassembly matches the
/// input within `1e-7` trace distance.
pub fn theorem1_decompose(sigma: &MultipartiteState, tol: f64) -> Result<TheoremOneStructure> {
    sigma.require_arity(3, "theorem1_decompose")?;
    let gap = ssa_gap_v2(sigma, tol)?;
    if !gap.saturated {
        return Err(Error::NotSaturated {
            identity: "ssa_v2".into(),
            gap: gap.gap_bits,
            detail: format!("gap {:.6e} bits exceeds tolerance {tol:.1e}", gap.gap_bits),
        });
    }
    decompose_at(sigma, tol, 0)
}

fn decompose_at(sigma: &MultipartiteState, tol: f64, depth: usize) -> Result<TheoremOneStructure> {
    let dims = [sigma.dims()[0], sigma.dims()[1], sigma.dims()[2]];
    let db = dims[1];
    let full = purify(sigma, "__D")?;
    let bad = full.marginal(&[1, 0, 3])?;
    let bcd = full.marginal(&[1, 2, 3])?;
    let mut a_blocks = markov_decompose(&bad, tol)?.b_decomposition.blocks;
    let mut c_blocks = markov_decompose(&bcd, tol)?.b_decomposition.blocks;

    let mut used_depth = depth;
    let mut cells = compute_cells(sigma.matrix(), db, &a_blocks, &c_blocks)?;
    loop {
        let impure: Vec<usize> = (0..cells.cells.len())
            .filter(|&k| cells.cells[k].purity < 1.0 - PURITY_TOL)
            .collect();
        if impure.is_empty() {
            break;
        }
        let worst = cells.cells.iter().map(|c| c.purity).fold(1.0, f64::min);
        if used_depth >= MAX_REFINEMENT_DEPTH {
            return Err(Error::RefinementExhausted {
                depth: used_depth,
                worst_purity: worst,
            });
        }
        let mut new_a: Vec<FactorBlock> = Vec::new();
        let mut new_c: Vec<FactorBlock> = Vec::new();
        let mut refined_rows = vec![false; a_blocks.len()];
        let mut refined_cols = vec![false; c_blocks.len()];
        for &k in &impure {
            let cell = &cells.cells[k];
            let (i, j) = (cell.i, cell.j);
            let row_alone = cells.weights[i].iter().filter(|&&w| w > 0.0).count() == 1;
            let col_alone = cells.weights.iter().filter(|r| r[j] > 0.0).count() == 1;
            if !(row_alone && col_alone) {
                return Err(Error::RefinementExhausted {
                    depth: used_depth,
                    worst_purity: worst,
                });
            }
            let (ab, cb) = (&a_blocks[i], &c_blocks[j]);
            let sub = MultipartiteState::from_parts_unchecked(
                cells.raw[k].clone(),
                vec![ab.dim_l * ab.dim_r, db, cb.dim_l * cb.dim_r],
                sigma.labels().to_vec(),
            )?;
            let inner = decompose_at(&sub, tol, used_depth + 1)?;
            if inner.a_decomposition.blocks.len() == 1 && inner.c_decomposition.blocks.len() == 1 {
                // same coarse blocks again: no progress is possible
                return Err(Error::RefinementExhausted {
                    depth: used_depth + 1,
                    worst_purity: worst,
                });
            }
            new_a.extend(inner.a_decomposition.blocks.iter().map(|b| compose(ab, b)));
            new_c.extend(inner.c_decomposition.blocks.iter().map(|b| compose(cb, b)));
            refined_rows[i] = true;
            refined_cols[j] = true;
            used_depth = used_depth.max(inner.refinement_depth);
        }
        a_blocks = a_blocks
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !refined_rows[*i])
            .map(|(_, b)| b)
            .chain(new_a)
            .collect();
        c_blocks = c_blocks
            .into_iter()
            .enumerate()
            .filter(|(j, _)| !refined_cols[*j])
            .map(|(_, b)| b)
            .chain(new_c)
            .collect();
        used_depth += 1;
        cells = compute_cells(sigma.matrix(), db, &a_blocks, &c_blocks)?;
    }

    let total: f64 = cells.weights.iter().flatten().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::verification("theorem1 joint weights", (total - 1.0).abs()));
    }
    let mut structure = TheoremOneStructure {
        a_decomposition: FactorDecomposition {
            system_label: sigma.labels()[0].clone(),
            blocks: a_blocks,
        },
        c_decomposition: FactorDecomposition {
            system_label: sigma.labels()[2].clone(),
            blocks: c_blocks,
        },
        joint_weights: cells.weights,
        cells: cells.cells,
        dims,
        reassembly_error: 0.0,
        refinement_depth: used_depth,
    };
    let err = trace_distance(&structure.reassemble()?, sigma.matrix())?;
    if err > REASSEMBLY_TOL {
        return Err(Error::verification("theorem1 reassembly", err));
    }
    structure.reassembly_error = err;
    Ok(structure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaps::DEFAULT_GAP_TOL;

    fn ghz() -> MultipartiteState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[0] = C64::new(s, 0.0);
        v[7] = C64::new(s, 0.0);
        MultipartiteState::pure(&v, &[2, 2, 2], &["A", "B", "C"]).unwrap()
    }

    #[test]
    fn ghz_is_a_single_pure_cell() {
        let t = theorem1_decompose(&ghz(), DEFAULT_GAP_TOL).unwrap();
        assert_eq!(t.a_decomposition.dim_multiset(), vec![(2, 1)]);
        assert_eq!(t.c_decomposition.dim_multiset(), vec![(2, 1)]);
        assert_eq!(t.cells.len(), 1);
        assert!((t.joint_weights[0][0] - 1.0).abs() < 1e-12);
        assert!(t.cells[0].purity > 1.0 - 1e-9);
        assert!(t.reassembly_error < 1e-9);
    }

    #[test]
    fn mixed_product_is_refused() {
        let m = CMatrix::identity(8).scale(0.125);
        let s = MultipartiteState::with_labels(m, &[2, 2, 2], &["A", "B", "C"]).unwrap();
        assert!(matches!(
            theorem1_decompose(&s, DEFAULT_GAP_TOL),
            Err(Error::NotSaturated { .. })
        ));
    }

    #[test]
    fn classical_copies() {
        // sum_mu p_mu |mu mu mu><mu mu mu|: each value of mu is its own cell
        let mut m = CMatrix::zeros(8, 8);
        m[(0, 0)] = C64::new(0.3, 0.0);
        m[(7, 7)] = C64::new(0.7, 0.0);
        let s = MultipartiteState::with_labels(m, &[2, 2, 2], &["A", "B", "C"]).unwrap();
        let t = theorem1_decompose(&s, DEFAULT_GAP_TOL).unwrap();
        assert_eq!(t.a_decomposition.dim_multiset(), vec![(1, 1), (1, 1)]);
        assert_eq!(t.cells.len(), 2);
        let sectors = t.a_sectors().unwrap();
        let mut w: Vec<f64> = sectors.iter().map(|s| s.0).collect();
        w.sort_by(f64::total_cmp);
        assert!((w[0] - 0.3).abs() < 1e-12 && (w[1] - 0.7).abs() < 1e-12);
    }
}

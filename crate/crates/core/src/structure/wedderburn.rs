//! Block decomposition of a finite-dimensional *-algebra into
//! `(full matrix algebra on H_L) (x) I_R` summands.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::algebra::OperatorAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, isometry_defect, null_space, CMatrix, C64};

/// Block-algebra residual accepted before a decomposition is returned.
pub const BLOCK_TOL: f64 = 1e-8;
/// Eigenvalues of a random central or block element closer than this
/// (relative to the spread) are treated as one cluster.
const CLUSTER_TOL: f64 = 1e-6;
const ATTEMPTS: u64 = 6;
const RNG_SEED: u64 = 0x5eed_b10c;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorBlock {
    pub dim_l: usize,
    pub dim_r: usize,
    /// Maps `H_L (x) H_R` (L-major) into the system space.
    pub isometry: CMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorDecomposition {
    pub system_label: String,
    pub blocks: Vec<FactorBlock>,
}

impl FactorDecomposition {
    pub fn system_dim(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.isometry.rows())
    }

    /// `(dim_l, dim_r)` pairs, sorted, for gauge-free comparison.
    pub fn dim_multiset(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.blocks.iter().map(|b| (b.dim_l, b.dim_r)).collect();
        v.sort_unstable();
        v
    }

    /// Largest violation of `W^dagger W = I` and of range orthogonality.
    pub fn isometry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.blocks.iter().enumerate() {
            worst = worst.max(isometry_defect(&a.isometry));
            for b in &self.blocks[i + 1..] {
                worst = worst.max(a.isometry.adjoint().matmul(&b.isometry).frobenius_norm());
            }
        }
        worst
    }

    /// Projector onto the union of the block ranges.
    pub fn support_projector(&self) -> CMatrix {
        let d = self.system_dim();
        let mut p = CMatrix::zeros(d, d);
        for b in &self.blocks {
            p = &p + &b.isometry.matmul(&b.isometry.adjoint());
        }
        p
    }
}

/// Splits `values` (ascending) into runs whose consecutive gaps are at most `tol`.
fn cluster_sorted(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(run) if v - values[*run.last().unwrap()] <= tol => run.push(k),
            _ => out.push(vec![k]),
        }
    }
    out
}

fn random_hermitian_combination(mats: &[CMatrix], rng: &mut ChaCha8Rng) -> CMatrix {
    let d = mats[0].rows();
    let mut x = CMatrix::zeros(d, d);
    for m in mats {
        let g: f64 = rng.gen_range(-1.0..1.0);
        x.axpy(C64::new(g, 0.0), &m.hermitian_part());
    }
    x
}

fn random_combination(mats: &[CMatrix], rng: &mut ChaCha8Rng) -> CMatrix {
    let d = mats[0].rows();
    let mut x = CMatrix::zeros(d, d);
    for m in mats {
        let g = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        x.axpy(g, m);
    }
    x
}

/// Dimension of the complex span of `mats`.
fn span_dim(mats: &[CMatrix]) -> usize {
    let vecs: Vec<Vec<C64>> = mats.iter().map(|m| m.vectorize()).collect();
    crate::linalg::orthonormalize(&vecs, 1e-7).len()
}

/// Eigen-clusters of a Hermitian matrix: columns spanning each cluster.
fn eigen_clusters(h: &CMatrix) -> Result<Vec<CMatrix>> {
    let eig = hermitian_eig(h)?;
    let spread = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1e-300);
    Ok(cluster_sorted(&eig.eigenvalues, CLUSTER_TOL * spread)
        .into_iter()
        .map(|run| CMatrix::from_fn(h.rows(), run.len(), |i, j| eig.basis[(i, run[j])]))
        .collect())
}

/// One randomized attempt; `Ok(None)` means the random elements were degenerate.
fn attempt(alg: &OperatorAlgebra, rng: &mut ChaCha8Rng) -> Result<Option<Vec<FactorBlock>>> {
    let basis = alg.basis();
    let d = alg.ambient_dim();

    // support of the algebra
    let mut gram = CMatrix::zeros(d, d);
    for b in basis {
        gram = &gram + &b.matmul(&b.adjoint());
    }
    let s = hermitian_eig(&gram)?.support_isometry();
    let comp: Vec<CMatrix> = basis.iter().map(|b| b.compress(&s)).collect();
    let sd = s.cols();
    if sd == 0 {
        return Err(Error::invalid("algebra is zero"));
    }

    // center: coefficient vectors c with [sum c_m B_m, B_k] = 0 for all k
    let n = comp.len();
    let mut cm = CMatrix::zeros(n * sd * sd, n);
    for (m, bm) in comp.iter().enumerate() {
        for (k, bk) in comp.iter().enumerate() {
            let comm = &bm.matmul(bk) - &bk.matmul(bm);
            for (r, z) in comm.as_slice().iter().enumerate() {
                cm[(k * sd * sd + r, m)] = *z;
            }
        }
    }
    let center_coeffs = null_space(&cm, 1e-8)?;
    if center_coeffs.is_empty() {
        return Err(Error::Internal("algebra has a trivial center".into()));
    }
    let center: Vec<CMatrix> = center_coeffs
        .iter()
        .map(|c| {
            let mut z = CMatrix::zeros(sd, sd);
            for (cm, bm) in c.iter().zip(&comp) {
                z.axpy(*cm, bm);
            }
            z
        })
        .collect();

    let z = random_hermitian_combination(&center, rng);
    let sectors = eigen_clusters(&z)?;
    if sectors.len() != center.len() {
        return Ok(None);
    }

    let mut blocks = Vec::new();
    for v in &sectors {
        let local: Vec<CMatrix> = comp.iter().map(|b| b.compress(v)).collect();
        let a_dim = span_dim(&local);
        let l = (a_dim as f64).sqrt().round() as usize;
        let m = v.cols();
        if l == 0 || l * l != a_dim || m % l != 0 {
            return Ok(None);
        }
        let r = m / l;

        let x = random_hermitian_combination(&local, rng);
        let levels = eigen_clusters(&x)?;
        if levels.len() != l || levels.iter().any(|e| e.cols() != r) {
            return Ok(None);
        }
        // matrix units carry the first level onto the others
        let y = random_combination(&local, rng);
        let ynorm = y.frobenius_norm().max(1e-300);
        let mut frames: Vec<CMatrix> = vec![levels[0].clone()];
        for e in &levels[1..] {
            let t = e.adjoint().matmul(&y).matmul(&levels[0]);
            let c = (t.hs_inner(&t).re / r as f64).sqrt();
            if c <= 1e-6 * ynorm {
                return Ok(None);
            }
            frames.push(e.matmul(&t).scale(1.0 / c));
        }
        let full = s.matmul(v);
        let cols: Vec<Vec<C64>> = frames
            .iter()
            .flat_map(|f| (0..r).map(move |j| f.column(j)))
            .map(|col| full.mul_vec(&col))
            .collect();
        blocks.push(FactorBlock {
            dim_l: l,
            dim_r: r,
            isometry: CMatrix::from_columns(d, &cols),
        });
    }
    Ok(Some(blocks))
}

/// Residual of `W^dagger B W = x (x) I_R`, off-block vanishing, and the dimension count.
fn verify(alg: &OperatorAlgebra, blocks: &[FactorBlock]) -> f64 {
    let mut worst = 0.0f64;
    let total: usize = blocks.iter().map(|b| b.dim_l * b.dim_l).sum();
    if total != alg.dim() {
        return f64::INFINITY;
    }
    for b in alg.basis() {
        let scale = b.frobenius_norm().max(1e-300);
        for (i, bi) in blocks.iter().enumerate() {
            let c = b.compress(&bi.isometry);
            let (l, r) = (bi.dim_l, bi.dim_r);
            let mut x = CMatrix::zeros(l, l);
            for p in 0..l {
                for q in 0..l {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..r {
                        acc += c[(p * r + k, q * r + k)];
                    }
                    x[(p, q)] = acc / r as f64;
                }
            }
            let model = crate::linalg::kron(&x, &CMatrix::identity(r)).expect("small block");
            worst = worst.max((&c - &model).frobenius_norm() / scale);
            for bj in &blocks[i + 1..] {
                let off = bi.isometry.adjoint().matmul(b).matmul(&bj.isometry);
                worst = worst.max(off.frobenius_norm() / scale);
                let off = bj.isometry.adjoint().matmul(b).matmul(&bi.isometry);
                worst = worst.max(off.frobenius_norm() / scale);
            }
        }
    }
    let fd = FactorDecomposition {
        system_label: String::new(),
        blocks: blocks.to_vec(),
    };
    worst.max(fd.isometry_residual())
}

/// Wedderburn decomposition of `alg` on the algebra's support.
///
/// Blocks are ordered by descending `dim_l * dim_r`, then descending `dim_l`.
/// The result is returned only after the block-algebra residual is at most
/// [`BLOCK_TOL`].
pub fn wedderburn_blocks(alg: &OperatorAlgebra) -> Result<FactorDecomposition> {
    if alg.dim() == 0 {
        return Err(Error::invalid("cannot decompose the zero algebra"));
    }
    let mut best = f64::INFINITY;
    for a in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
        rng.set_stream(a);
        let Some(mut blocks) = attempt(alg, &mut rng)? else {
            continue;
        };
        let residual = verify(alg, &blocks);
        if residual <= BLOCK_TOL {
            blocks.sort_by(|x, y| {
                (y.dim_l * y.dim_r, y.dim_l).cmp(&(x.dim_l * x.dim_r, x.dim_l))
            });
            return Ok(FactorDecomposition {
                system_label: String::new(),
                blocks,
            });
        }
        best = best.min(residual);
    }
    Err(Error::verification("wedderburn_blocks", best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::pauli_matrices;
    use crate::linalg::kron;
    use crate::structure::algebra::algebra_closure;

    #[test]
    fn full_matrix_algebra_is_one_block() {
        let p = pauli_matrices();
        let a = algebra_closure(&[p[1].clone(), p[3].clone()], 2).unwrap();
        let f = wedderburn_blocks(&a).unwrap();
        assert_eq!(f.dim_multiset(), vec![(2, 1)]);
    }

    #[test]
    fn diagonal_algebra_splits_into_points() {
        let a = algebra_closure(&[CMatrix::diag_real(&[1.0, 2.0, 3.0, 0.0])], 4).unwrap();
        let f = wedderburn_blocks(&a).unwrap();
        assert_eq!(f.dim_multiset(), vec![(1, 1); 3]);
        // support excludes the kernel direction
        let p = f.support_projector();
        assert!(p[(3, 3)].norm() < 1e-12);
    }

    #[test]
    fn tensor_with_identity() {
        let p = pauli_matrices();
        let gens: Vec<CMatrix> = [&p[1], &p[3]]
            .iter()
            .map(|m| kron(m, &CMatrix::identity(3)).unwrap())
            .collect();
        let a = algebra_closure(&gens, 6).unwrap();
        assert_eq!(a.dim(), 4);
        let f = wedderburn_blocks(&a).unwrap();
        assert_eq!(f.dim_multiset(), vec![(2, 3)]);
        assert!(f.isometry_residual() < 1e-10);
    }

    #[test]
    fn clustering() {
        assert_eq!(
            cluster_sorted(&[0.0, 1e-9, 1.0, 2.0, 2.0], 1e-6),
            vec![vec![0, 1], vec![2], vec![3, 4]]
        );
    }
}

//! Tensor-product bookkeeping on labeled subsystems: Kronecker products,
//! partial traces and subsystem permutations. Subsystem 0 is the most
//! significant digit of the row/column index.

use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Largest matrix side `kron` will build.
pub const MAX_DIM: usize = 4096;

pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    match (rows, cols) {
        (Some(r), Some(c)) if r <= MAX_DIM && c <= MAX_DIM => {}
        _ => {
            return Err(Error::invalid(format!(
                "kron of {}x{} and {}x{} exceeds max dimension {MAX_DIM}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )))
        }
    }
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = CMatrix::zeros(a.rows() * rb, a.cols() * cb);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list, left to right.
pub fn kron_all(factors: &[&CMatrix]) -> Result<CMatrix> {
    let mut acc = CMatrix::identity(1);
    for f in factors {
        acc = kron(&acc, f)?;
    }
    Ok(acc)
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn check_dims(m: &CMatrix, dims: &[usize]) -> Result<()> {
    if !m.is_square() {
        return Err(Error::dims(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if dims.contains(&0) {
        return Err(Error::dims("subsystem dimension 0"));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() {
        return Err(Error::dims(format!(
            "subsystem dims {dims:?} multiply to {total}, matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems appear in
/// ascending index order in the result.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_dims(m, dims)?;
    let mut keep_mask = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::dims(format!(
                "subsystem index {k} out of range for {} subsystems",
                dims.len()
            )));
        }
        if keep_mask[k] {
            return Err(Error::dims(format!("subsystem {k} listed twice")));
        }
        keep_mask[k] = true;
    }
    let kept_dims: Vec<usize> = (0..dims.len()).filter(|&k| keep_mask[k]).map(|k| dims[k]).collect();
    let traced_dims: Vec<usize> = (0..dims.len()).filter(|&k| !keep_mask[k]).map(|k| dims[k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // group full indices by their traced digits
    let full_strides = strides(dims);
    let kept_strides = strides(&kept_dims);
    let traced_strides = strides(&traced_dims);
    let n = m.rows();
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(kept_total); traced_total];
    for idx in 0..n {
        let (mut ki, mut ti, mut kpos, mut tpos) = (0, 0, 0, 0);
        for k in 0..dims.len() {
            let digit = (idx / full_strides[k]) % dims[k];
            if keep_mask[k] {
                ki += digit * kept_strides[kpos];
                kpos += 1;
            } else {
                ti += digit * traced_strides[tpos];
                tpos += 1;
            }
        }
        groups[ti].push((idx, ki));
    }

    let mut out = CMatrix::zeros(kept_total, kept_total);
    for group in &groups {
        for &(r, kr) in group {
            for &(c, kc) in group {
                out[(kr, kc)] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Index map for reordering subsystems: output subsystem `k` is input subsystem `perm[k]`.
fn permutation_index_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() {
        return Err(Error::dims("permutation length differs from subsystem count"));
    }
    for &p in perm {
        if p >= dims.len() || seen[p] {
            return Err(Error::dims(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_strides = strides(dims);
    let new_strides = strides(&new_dims);
    let n: usize = dims.iter().product();
    // map[new_index] = old_index
    let mut map = vec![0; n];
    for (new_idx, slot) in map.iter_mut().enumerate() {
        let mut old = 0;
        for (k, &p) in perm.iter().enumerate() {
            let digit = (new_idx / new_strides[k]) % new_dims[k];
            old += digit * old_strides[p];
        }
        *slot = old;
    }
    Ok(map)
}

/// Reorders the tensor factors of a square operator.
pub fn permute_subsystems(m: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    check_dims(m, dims)?;
    let map = permutation_index_map(dims, perm)?;
    let n = m.rows();
    Ok(CMatrix::from_fn(n, n, |i, j| m[(map[i], map[j])]))
}

pub fn permute_ket(v: &[C64], dims: &[usize], perm: &[usize]) -> Result<Vec<C64>> {
    let map = permutation_index_map(dims, perm)?;
    if v.len() != map.len() {
        return Err(Error::dims("ket length does not match dims"));
    }
    Ok(map.iter().map(|&old| v[old]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_identities() {
        let i2 = CMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), CMatrix::identity(4));
    }

    #[test]
    fn kron_diagonals() {
        let a = CMatrix::diag_real(&[1.0, 2.0]);
        let b = CMatrix::diag_real(&[3.0, 4.0]);
        assert_eq!(kron(&a, &b).unwrap(), CMatrix::diag_real(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn kron_rejects_oversize() {
        let a = CMatrix::zeros(100, 1);
        let b = CMatrix::zeros(100, 1);
        assert!(matches!(kron(&a, &b), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CMatrix::projector(&[c(s), c(0.0), c(0.0), c(s)]);
        let r = partial_trace(&bell, &[2, 2], &[0]).unwrap();
        assert!(r.max_abs_diff(&CMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_dims_mismatch() {
        let m = CMatrix::identity(6);
        assert!(matches!(partial_trace(&m, &[2, 2], &[0]), Err(Error::DimensionMismatch(_))));
        assert!(partial_trace(&m, &[2, 3], &[2]).is_err());
    }

    #[test]
    fn permutation_swaps_factors() {
        let a = CMatrix::diag_real(&[1.0, 2.0]);
        let b = CMatrix::diag_real(&[3.0, 4.0, 5.0]);
        let ab = kron(&a, &b).unwrap();
        let ba = kron(&b, &a).unwrap();
        assert_eq!(permute_subsystems(&ab, &[2, 3], &[1, 0]).unwrap(), ba);
    }
}

//! Petz recovery, used as an independent test of the Markov condition.

use crate::error::Result;
use crate::linalg::{kron, psd_roots, trace_norm_hermitian, CMatrix};
use crate::state::MultipartiteState;

/// `(id_A (x) R_{B->BC})(rho_AB)` with
/// `R(X) = rho_BC^{1/2} (rho_B^{-1/2} X rho_B^{-1/2} (x) I_C) rho_BC^{1/2}`.
pub fn petz_recover(rho: &MultipartiteState) -> Result<CMatrix> {
    rho.require_arity(3, "petz_recover")?;
    let (da, dc) = (rho.dims()[0], rho.dims()[2]);
    let rho_ab = rho.marginal(&[0, 1])?;
    let rho_bc = rho.marginal(&[1, 2])?;
    let rho_b = rho.marginal(&[1])?;
    let inner = psd_roots(rho_b.matrix())?.pinv_sqrt;
    let outer = psd_roots(rho_bc.matrix())?.sqrt;
    let ia = CMatrix::identity(da);
    let x = kron(&ia, &inner)?.conjugate(rho_ab.matrix());
    let x = kron(&x, &CMatrix::identity(dc))?;
    Ok(kron(&ia, &outer)?.conjugate(&x))
}

/// Trace-norm distance between `rho` and its Petz recovery from `rho_AB`.
pub fn petz_markov_error(rho: &MultipartiteState) -> Result<f64> {
    let rec = petz_recover(rho)?;
    trace_norm_hermitian(&(rho.matrix() - &rec).hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn product_across_c_is_recovered() {
        let ab = CMatrix::from_real_rows(&[
            &[0.4, 0.1, 0.0, 0.05],
            &[0.1, 0.2, 0.0, 0.0],
            &[0.0, 0.0, 0.1, 0.0],
            &[0.05, 0.0, 0.0, 0.3],
        ]);
        let c = CMatrix::diag_real(&[0.6, 0.4]);
        let st = MultipartiteState::with_labels(kron(&ab, &c).unwrap(), &[2, 2, 2], &["A", "B", "C"])
            .unwrap();
        assert!(petz_markov_error(&st).unwrap() < 1e-9);
    }

    #[test]
    fn ghz_is_far_from_markov() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[0] = C64::new(s, 0.0);
        v[7] = C64::new(s, 0.0);
        let g = MultipartiteState::pure(&v, &[2, 2, 2], &["A", "B", "C"]).unwrap();
        let e = petz_markov_error(&g).unwrap();
        // recovery gives (|000><000| + |111><111|)/2 + cross terms damped to zero:
        // the difference is the off-diagonal coherence with trace norm 1
        assert!((e - 1.0).abs() < 1e-9, "{e}");
    }
}

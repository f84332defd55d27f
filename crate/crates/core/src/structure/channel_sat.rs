//! Saturation analysis for the channel entropy bounds.
//!
//! The average-entropy bound is examined through its individual conditions
//! (rank-one Gram matrix, recovery by `M`, product form of the Stinespring
//! output). Each is reported on its own; none is inferred from another.

use serde::{Deserialize, Serialize};

use super::markov::REASSEMBLY_TOL;
use super::theorem1::{theorem1_decompose, TheoremOneStructure};
use crate::channel::{
    coherent_information, exchange_bound_report, omega_state, CoherentInformation, KrausChannel,
};
use crate::error::{Error, Result};
use crate::gaps::GapReport;
use crate::linalg::{
    hermitian_eig, kron, partial_trace, svd, trace_distance, trace_norm_hermitian, CMatrix, C64,
};
use crate::state::validate_density;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSaturationReport {
    /// `G_{mu nu} = Tr[K_mu rho K_nu^dagger]`
    pub gram: CMatrix,
    pub gram_singular_values: Vec<f64>,
    pub gram_second_singular: f64,
    pub rank_one: bool,
    /// Present when `rank_one`.
    pub lambda: Option<Vec<C64>>,
    /// `M = sum_mu lambda_mu K_mu^dagger`, present when `rank_one`.
    pub m: Option<CMatrix>,
    /// `||rho - M Phi(rho) M^dagger||_1`, present when `rank_one`.
    pub reconstruction_error: Option<f64>,
    /// `||sum_{mu nu} A_{mu nu} (x) |mu><nu| - Phi(rho) (x) Phi^(rho)||_1`
    pub product_identity_error: f64,
}

fn check_dims(phi: &KrausChannel, rho: &CMatrix) -> Result<()> {
    if rho.rows() != phi.dim_in() || rho.cols() != phi.dim_in() {
        return Err(Error::dims(format!(
            "channel input dimension {} but state is {}x{}",
            phi.dim_in(),
            rho.rows(),
            rho.cols()
        )));
    }
    validate_density(rho)
}

/// Principal vector scaled to unit norm, with its first largest-modulus entry
/// made real and nonnegative.
fn gauge_fix(v: &[C64]) -> Vec<C64> {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut best = 0;
    for (k, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = k;
        }
    }
    let phase = if v[best].norm() > 0.0 {
        v[best].conj() / v[best].norm()
    } else {
        C64::new(1.0, 0.0)
    };
    v.iter().map(|z| z * phase / n).collect()
}

pub fn channel_saturation_analyze(
    phi: &KrausChannel,
    rho: &CMatrix,
    tol: f64,
) -> Result<ChannelSaturationReport> {
    check_dims(phi, rho)?;
    let gram = phi.complementary_unchecked(rho);
    let sv = svd(&gram)?.singular_values;
    let s1 = sv.first().copied().unwrap_or(0.0);
    let s2 = sv.get(1).copied().unwrap_or(0.0);
    let rank_one = s2 <= tol * s1;

    let out = phi.apply_unchecked(rho);
    let (lambda, m, reconstruction_error) = if rank_one {
        let eig = hermitian_eig(&gram)?;
        let top = eig.eigenvector(eig.eigenvalues.len() - 1);
        let lambda = gauge_fix(&top);
        let mut m = CMatrix::zeros(phi.dim_in(), phi.dim_out());
        for (l, k) in lambda.iter().zip(phi.kraus()) {
            m.axpy(*l, &k.adjoint());
        }
        let rec = m.conjugate(&out);
        let err = trace_norm_hermitian(&(rho - &rec).hermitian_part())?;
        (Some(lambda), Some(m), Some(err))
    } else {
        (None, None, None)
    };

    // Stinespring output with the environment read off the B register
    let n = phi.n_kraus();
    let d = phi.dim_out();
    let mut joint = CMatrix::zeros(d * n, d * n);
    for mu in 0..n {
        for nu in 0..n {
            let blk = phi.block(rho, mu, nu);
            for i in 0..d {
                for j in 0..d {
                    joint[(i * n + mu, j * n + nu)] = blk[(i, j)];
                }
            }
        }
    }
    let product = kron(&out, &gram)?;
    let product_identity_error = trace_norm_hermitian(&(&joint - &product).hermitian_part())?;

    Ok(ChannelSaturationReport {
        gram,
        gram_singular_values: sv,
        gram_second_singular: s2,
        rank_one,
        lambda,
        m,
        reconstruction_error,
        product_identity_error,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSector {
    pub dim_l: usize,
    pub dim_r: usize,
    pub weight: f64,
    /// State on `H_L (x) H_R`.
    pub state: CMatrix,
    pub isometry: CMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolevoSaturationReport {
    pub exchange: GapReport,
    pub omega_structure: TheoremOneStructure,
    /// Block decomposition of `Phi(rho) = omega_A`.
    pub output_sectors: Vec<OutputSector>,
    pub output_reassembly_error: f64,
}

/// When the Holevo quantity of the induced ensemble equals the exchange
/// entropy, decompose `omega_ABC` and read off the block form of `Phi(rho)`.
pub fn holevo_saturation_analyze(
    phi: &KrausChannel,
    rho: &CMatrix,
    tol: f64,
) -> Result<HolevoSaturationReport> {
    check_dims(phi, rho)?;
    let exchange = exchange_bound_report(phi, rho, tol)?;
    if !exchange.saturated {
        return Err(Error::NotSaturated {
            identity: "exchange_bound".into(),
            gap: exchange.gap_bits,
            detail: format!(
                "Holevo quantity {:.6e} below exchange entropy {:.6e} bits",
                exchange.lhs_bits, exchange.rhs_bits
            ),
        });
    }
    let omega = omega_state(phi, rho)?;
    let structure = theorem1_decompose(&omega.state, tol)?;
    let out = phi.apply_unchecked(rho);
    let d = out.rows();
    let mut rebuilt = CMatrix::zeros(d, d);
    let mut sectors = Vec::new();
    for (blk, (w, st)) in structure
        .a_decomposition
        .blocks
        .iter()
        .zip(structure.a_sectors()?)
    {
        if w <= 0.0 {
            continue;
        }
        rebuilt.axpy(C64::new(w, 0.0), &blk.isometry.conjugate(&st));
        sectors.push(OutputSector {
            dim_l: blk.dim_l,
            dim_r: blk.dim_r,
            weight: w,
            state: st,
            isometry: blk.isometry.clone(),
        });
    }
    let err = trace_distance(&rebuilt, &out)?;
    if err > REASSEMBLY_TOL {
        return Err(Error::verification("holevo output reassembly", err));
    }
    Ok(HolevoSaturationReport {
        exchange,
        omega_structure: structure,
        output_sectors: sectors,
        output_reassembly_error: err,
    })
}

/// A candidate split `H_out ~ H_L (x) H_R` given by an isometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProposedFactorization {
    pub dim_l: usize,
    pub dim_r: usize,
    pub isometry: CMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductCheck {
    pub rho_l: CMatrix,
    pub rho_r: CMatrix,
    /// `||W^dagger Phi(rho) W - rho_L (x) rho_R||_1`
    pub error: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentSaturationReport {
    pub coherent: CoherentInformation,
    /// `|I_c - S(rho)|`
    pub gap_bits: f64,
    pub product_check: Option<ProductCheck>,
}

pub fn coherent_saturation_check(
    phi: &KrausChannel,
    rho: &CMatrix,
    proposed: Option<&ProposedFactorization>,
    tol: f64,
) -> Result<CoherentSaturationReport> {
    check_dims(phi, rho)?;
    let coherent = coherent_information(phi, rho, tol)?;
    let gap_bits = (coherent.value_bits - coherent.input_entropy_bits).abs();
    let product_check = match proposed {
        None => None,
        Some(p) => {
            let w = &p.isometry;
            if w.rows() != phi.dim_out() || w.cols() != p.dim_l * p.dim_r {
                return Err(Error::dims(format!(
                    "proposed isometry is {}x{}, expected {}x{}",
                    w.rows(),
                    w.cols(),
                    phi.dim_out(),
                    p.dim_l * p.dim_r
                )));
            }
            let defect = crate::linalg::isometry_defect(w);
            if defect > 1e-9 {
                return Err(Error::invalid(format!(
                    "proposed map is not an isometry (defect {defect:.3e})"
                )));
            }
            let x = phi.apply_unchecked(rho).compress(w).hermitian_part();
            let dims = [p.dim_l, p.dim_r];
            let rho_l = partial_trace(&x, &dims, &[0])?;
            let rho_r = partial_trace(&x, &dims, &[1])?;
            // mass outside the range of W also counts against the split
            let outside = 1.0 - x.trace().re;
            let error = trace_norm_hermitian(&(&x - &kron(&rho_l, &rho_r)?))? + outside.abs();
            Some(ProductCheck {
                rho_l,
                rho_r,
                error,
                passes: error <= REASSEMBLY_TOL,
            })
        }
    };
    Ok(CoherentSaturationReport {
        coherent,
        gap_bits,
        product_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaps::DEFAULT_GAP_TOL;

    fn plus() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])
    }

    #[test]
    fn unitary_channel_is_rank_one() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = CMatrix::from_real_rows(&[&[h, h], &[h, -h]]);
        let phi = KrausChannel::unitary(u.clone()).unwrap();
        let rho = CMatrix::from_real_rows(&[&[0.6, 0.1], &[0.1, 0.4]]);
        let r = channel_saturation_analyze(&phi, &rho, DEFAULT_GAP_TOL).unwrap();
        assert!(r.rank_one);
        assert!((r.lambda.as_ref().unwrap()[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(r.m.as_ref().unwrap().max_abs_diff(&u.adjoint()) < 1e-12);
        assert!(r.reconstruction_error.unwrap() <= 1e-9);
    }

    #[test]
    fn split_identity_channel() {
        let t: f64 = 0.3;
        let phi = KrausChannel::new(vec![
            CMatrix::identity(2).scale(t.sqrt()),
            CMatrix::identity(2).scale((1.0 - t).sqrt()),
        ])
        .unwrap();
        let r = channel_saturation_analyze(&phi, &plus(), DEFAULT_GAP_TOL).unwrap();
        assert!(r.rank_one);
        let l = r.lambda.unwrap();
        assert!((l[0] - C64::new(t.sqrt(), 0.0)).norm() < 1e-10);
        assert!((l[1] - C64::new((1.0 - t).sqrt(), 0.0)).norm() < 1e-10);
        assert!(r.m.unwrap().max_abs_diff(&CMatrix::identity(2)) < 1e-10);
        assert!(r.reconstruction_error.unwrap() <= 1e-9);
    }

    #[test]
    fn dephasing_plus_is_not_rank_one() {
        let r = channel_saturation_analyze(&KrausChannel::dephasing(2), &plus(), DEFAULT_GAP_TOL)
            .unwrap();
        assert!(!r.rank_one);
        assert!((r.gram_second_singular - 0.5).abs() < 1e-12);
        assert!(r.lambda.is_none());
    }

    #[test]
    fn dephasing_holevo_sectors() {
        let p = 0.3;
        let rho = CMatrix::diag_real(&[p, 1.0 - p]);
        let r = holevo_saturation_analyze(&KrausChannel::dephasing(2), &rho, DEFAULT_GAP_TOL)
            .unwrap();
        let mut w: Vec<f64> = r.output_sectors.iter().map(|s| s.weight).collect();
        w.sort_by(f64::total_cmp);
        assert_eq!(w.len(), 2);
        assert!((w[0] - p).abs() < 1e-10);
        assert!(r.output_reassembly_error <= 1e-7);
        assert!(r.output_sectors.iter().all(|s| s.dim_l * s.dim_r == 1));
    }

    #[test]
    fn unitary_holevo_single_block() {
        let rho = CMatrix::from_real_rows(&[&[0.6, 0.1], &[0.1, 0.4]]);
        let r = holevo_saturation_analyze(&KrausChannel::identity(2), &rho, DEFAULT_GAP_TOL).unwrap();
        assert_eq!(r.output_sectors.len(), 1);
    }

    #[test]
    fn coherent_checks() {
        let rho = CMatrix::identity(2).scale(0.5);
        let prop = ProposedFactorization {
            dim_l: 2,
            dim_r: 1,
            isometry: CMatrix::identity(2),
        };
        let r = coherent_saturation_check(&KrausChannel::identity(2), &rho, Some(&prop), DEFAULT_GAP_TOL)
            .unwrap();
        assert!(r.coherent.saturated);
        let pc = r.product_check.unwrap();
        assert!(pc.passes);
        assert_eq!(pc.rho_r.dim(), 1);

        let rl = CMatrix::diag_real(&[0.2, 0.8]);
        let rr = CMatrix::from_real_rows(&[&[0.5, 0.1], &[0.1, 0.5]]);
        let rho = kron(&rl, &rr).unwrap();
        let prop = ProposedFactorization {
            dim_l: 2,
            dim_r: 2,
            isometry: CMatrix::identity(4),
        };
        let r = coherent_saturation_check(&KrausChannel::identity(4), &rho, Some(&prop), DEFAULT_GAP_TOL)
            .unwrap();
        assert!(r.product_check.unwrap().passes);

        let r = coherent_saturation_check(&KrausChannel::dephasing(2), &CMatrix::diag_real(&[0.3, 0.7]), None, DEFAULT_GAP_TOL)
            .unwrap();
        assert!(!r.coherent.saturated);
    }

    #[test]
    fn product_identity_holds_for_rank_one_gram() {
        let rho = CMatrix::from_real_rows(&[&[0.6, 0.1], &[0.1, 0.4]]);
        let r = channel_saturation_analyze(&KrausChannel::identity(2), &rho, DEFAULT_GAP_TOL).unwrap();
        assert!(r.product_identity_error < 1e-12);
    }
}

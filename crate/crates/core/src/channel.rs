//! Kraus channels, complementary channels, induced ensembles and the
//! entropy bounds built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaps::{GapIdentity, GapReport};
use crate::linalg::{kron, CMatrix, C64, ZERO};
use crate::state::{validate_density, von_neumann_entropy, MultipartiteState};

/// Completeness tolerance `||sum K^dagger K - I||_F`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Ensemble branches with weight at or below this are dropped.
pub const BRANCH_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::invalid("a channel needs at least one Kraus operator"))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != dim_out || k.cols() != dim_in) {
            return Err(Error::dims("Kraus operators have differing shapes"));
        }
        let mut sum = CMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            sum = &sum + &k.adjoint().matmul(k);
        }
        let defect = (&sum - &CMatrix::identity(dim_in)).frobenius_norm();
        if defect > COMPLETENESS_TOL {
            return Err(Error::invalid(format!(
                "Kraus operators are not trace preserving (||sum K^dagger K - I||_F = {defect:.3e})"
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn identity(d: usize) -> Self {
        Self::new(vec![CMatrix::identity(d)]).expect("identity is a channel")
    }

    /// Projective dephasing in the computational basis.
    pub fn dephasing(d: usize) -> Self {
        let kraus = (0..d)
            .map(|k| {
                let mut p = CMatrix::zeros(d, d);
                p[(k, k)] = C64::new(1.0, 0.0);
                p
            })
            .collect();
        Self::new(kraus).expect("projectors resolve the identity")
    }

    /// Qubit Pauli channel with Kraus operators `sqrt(p_i) sigma_i`.
    pub fn pauli(probs: [f64; 4]) -> Result<Self> {
        let paulis = pauli_matrices();
        let kraus = probs
            .iter()
            .zip(paulis.iter())
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, s)| s.scale(p.sqrt()))
            .collect();
        Self::new(kraus)
    }

    /// Fully depolarizing qubit channel, Kraus `{sigma_i / 2}`.
    pub fn fully_depolarizing_qubit() -> Self {
        Self::pauli([0.25; 4]).expect("valid Pauli channel")
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn n_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    fn check_input(&self, rho: &CMatrix) -> Result<()> {
        if rho.rows() != self.dim_in || rho.cols() != self.dim_in {
            return Err(Error::dims(format!(
                "channel input dimension {} but state is {}x{}",
                self.dim_in,
                rho.rows(),
                rho.cols()
            )));
        }
        validate_density(rho)
    }

    /// `A_{mu nu} = K_mu rho K_nu^dagger`
    pub fn block(&self, rho: &CMatrix, mu: usize, nu: usize) -> CMatrix {
        self.kraus[mu].matmul(rho).matmul(&self.kraus[nu].adjoint())
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.check_input(rho)?;
        Ok(self.apply_unchecked(rho))
    }

    pub(crate) fn apply_unchecked(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = &out + &k.conjugate(rho);
        }
        out
    }

    /// Environment output `sum_{mu nu} Tr[K_mu rho K_nu^dagger] |mu><nu|`.
    pub fn complementary(&self, rho: &CMatrix) -> Result<CMatrix> {
        self.check_input(rho)?;
        Ok(self.complementary_unchecked(rho))
    }

    pub(crate) fn complementary_unchecked(&self, rho: &CMatrix) -> CMatrix {
        let n = self.kraus.len();
        let mut g = CMatrix::zeros(n, n);
        let kr: Vec<CMatrix> = self.kraus.iter().map(|k| k.matmul(rho)).collect();
        for mu in 0..n {
            for nu in 0..n {
                // Tr[K_mu rho K_nu^dagger] = sum_ij (K_mu rho)_ij conj(K_nu)_ij
                g[(mu, nu)] = self.kraus[nu].hs_inner(&kr[mu]);
            }
        }
        g
    }

    pub fn induced_ensemble(&self, rho: &CMatrix) -> Result<Ensemble> {
        self.check_input(rho)?;
        let mut items = Vec::new();
        for mu in 0..self.kraus.len() {
            let a = self.block(rho, mu, mu);
            let q = a.trace().re;
            if q > BRANCH_CUTOFF {
                items.push((q, a.scale(1.0 / q)));
            }
        }
        if items.is_empty() {
            return Err(Error::invalid("channel annihilates the state numerically"));
        }
        // renormalize after dropping negligible branches
        let total: f64 = items.iter().map(|(q, _)| q).sum();
        for item in &mut items {
            item.0 /= total;
        }
        Ok(Ensemble { items })
    }

    /// Sequential composition `other after self`.
    pub fn then(&self, other: &KrausChannel) -> Result<KrausChannel> {
        if other.dim_in != self.dim_out {
            return Err(Error::dims("composed channel dimensions do not chain"));
        }
        let mut kraus = Vec::new();
        for b in &other.kraus {
            for a in &self.kraus {
                kraus.push(b.matmul(a));
            }
        }
        KrausChannel::new(kraus)
    }

    /// Parallel composition `self (x) other`.
    pub fn tensor(&self, other: &KrausChannel) -> Result<KrausChannel> {
        let mut kraus = Vec::new();
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(kron(a, b)?);
            }
        }
        KrausChannel::new(kraus)
    }
}

pub fn pauli_matrices() -> [CMatrix; 4] {
    let i = C64::new(0.0, 1.0);
    [
        CMatrix::identity(2),
        CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        CMatrix::from_rows(&[vec![ZERO, -i], vec![i, ZERO]]).expect("2x2"),
        CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
    ]
}

/// Weighted family of states with positive weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    items: Vec<(f64, CMatrix)>,
}

impl Ensemble {
    pub fn new(items: Vec<(f64, CMatrix)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::invalid("empty ensemble"));
        }
        let d = items[0].1.rows();
        let mut total = 0.0;
        for (p, rho) in &items {
            if !(*p > 0.0 && *p <= 1.0) {
                return Err(Error::invalid(format!("ensemble weight {p} outside (0, 1]")));
            }
            if rho.rows() != d {
                return Err(Error::dims("ensemble states differ in dimension"));
            }
            validate_density(rho)?;
            total += p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("ensemble weights sum to {total}")));
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[(f64, CMatrix)] {
        &self.items
    }

    pub fn average(&self) -> CMatrix {
        let d = self.items[0].1.rows();
        let mut avg = CMatrix::zeros(d, d);
        for (p, rho) in &self.items {
            avg.axpy(C64::new(*p, 0.0), rho);
        }
        avg
    }

    /// `sum_mu p_mu S(rho_mu)`
    pub fn average_entropy(&self) -> Result<f64> {
        self.items
            .iter()
            .map(|(p, rho)| Ok(p * von_neumann_entropy(rho)?))
            .sum()
    }
}

/// Holevo quantity `S(sum p rho) - sum p S(rho)` in bits.
pub fn holevo(e: &Ensemble) -> Result<f64> {
    Ok(von_neumann_entropy(&e.average())? - e.average_entropy()?)
}

/// Holevo quantity of the induced ensemble against the exchange entropy `S(Phi^(rho))`.
pub fn exchange_bound_report(phi: &KrausChannel, rho: &CMatrix, tol: f64) -> Result<GapReport> {
    let ens = phi.induced_ensemble(rho)?;
    let chi = holevo(&ens)?;
    let exchange = von_neumann_entropy(&phi.complementary_unchecked(rho))?;
    Ok(GapReport::new(GapIdentity::ExchangeBound, chi, exchange, tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageEntropyReport {
    pub gap: GapReport,
    /// `sum q S(rho'_mu) - (S(omega_AC) - S(omega_B))`
    pub omega_identity_residual: f64,
}

/// Average output entropy of the induced ensemble against `S(rho)`, with the
/// `S(omega_AC) - S(omega_B)` cross-check.
pub fn average_entropy_report(
    phi: &KrausChannel,
    rho: &CMatrix,
    tol: f64,
) -> Result<AverageEntropyReport> {
    let ens = phi.induced_ensemble(rho)?;
    let avg = ens.average_entropy()?;
    let s_rho = von_neumann_entropy(rho)?;
    let omega = omega_state(phi, rho)?;
    let st = &omega.state;
    let via_omega = st.entropy_of(&[0, 2])? - st.entropy_of(&[1])?;
    Ok(AverageEntropyReport {
        gap: GapReport::new(GapIdentity::AverageEntropy, avg, s_rho, tol),
        omega_identity_residual: avg - via_omega,
    })
}

/// Tripartite state `sum_{mu nu} A_{mu nu} (x) |mu><nu| (x) |mu><nu|` on (A, B, C).
#[derive(Clone, Debug)]
pub struct OmegaState {
    pub state: MultipartiteState,
    /// `blocks[mu][nu] = K_mu rho K_nu^dagger`
    pub blocks: Vec<Vec<CMatrix>>,
}

pub fn omega_state(phi: &KrausChannel, rho: &CMatrix) -> Result<OmegaState> {
    phi.check_input(rho)?;
    let n = phi.n_kraus();
    let d = phi.dim_out();
    let blocks: Vec<Vec<CMatrix>> = (0..n)
        .map(|mu| (0..n).map(|nu| phi.block(rho, mu, nu)).collect())
        .collect();
    let total = d * n * n;
    let mut m = CMatrix::zeros(total, total);
    // index (a, b, c) -> a * n^2 + b * n + c; only b == c entries are populated
    for mu in 0..n {
        for nu in 0..n {
            let blk = &blocks[mu][nu];
            for i in 0..d {
                for j in 0..d {
                    m[(i * n * n + mu * n + mu, j * n * n + nu * n + nu)] = blk[(i, j)];
                }
            }
        }
    }
    let state = MultipartiteState::with_labels_unchecked(m, &[d, n, n], &["A", "B", "C"])?;
    Ok(OmegaState { state, blocks })
}

/// Stinespring-type isometry `|psi> -> sum_mu K_mu |psi> |mu> |mu>`.
pub fn omega_isometry(phi: &KrausChannel) -> CMatrix {
    let n = phi.n_kraus();
    let d = phi.dim_out();
    let mut v = CMatrix::zeros(d * n * n, phi.dim_in());
    for (mu, k) in phi.kraus().iter().enumerate() {
        for i in 0..d {
            for j in 0..phi.dim_in() {
                v[(i * n * n + mu * n + mu, j)] = k[(i, j)];
            }
        }
    }
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentInformation {
    pub value_bits: f64,
    pub input_entropy_bits: f64,
    pub saturated: bool,
}

/// `I_c = S(Phi(rho)) - S(Phi^(rho))` and whether it reaches `S(rho)`.
pub fn coherent_information(
    phi: &KrausChannel,
    rho: &CMatrix,
    tol: f64,
) -> Result<CoherentInformation> {
    phi.check_input(rho)?;
    let out = von_neumann_entropy(&phi.apply_unchecked(rho))?;
    let env = von_neumann_entropy(&phi.complementary_unchecked(rho))?;
    let s_rho = von_neumann_entropy(rho)?;
    let value = out - env;
    Ok(CoherentInformation {
        value_bits: value,
        input_entropy_bits: s_rho,
        saturated: (value - s_rho).abs() <= tol,
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
    fn dephasing_kills_coherence() {
        let out = KrausChannel::dephasing(2).apply(&plus()).unwrap();
        assert!(out.max_abs_diff(&CMatrix::diag_real(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn complementary_of_dephasing_is_diagonal() {
        let rho = CMatrix::diag_real(&[0.3, 0.7]);
        let g = KrausChannel::dephasing(2).complementary(&rho).unwrap();
        assert!(g.max_abs_diff(&rho) < 1e-15);
        let u = KrausChannel::identity(2).complementary(&rho).unwrap();
        assert!((u[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn induced_ensemble_of_dephasing() {
        let rho = CMatrix::diag_real(&[0.3, 0.7]);
        let e = KrausChannel::dephasing(2).induced_ensemble(&rho).unwrap();
        assert_eq!(e.items().len(), 2);
        assert!((e.items()[0].0 - 0.3).abs() < 1e-15);
        assert!(e.items()[1].1.max_abs_diff(&CMatrix::diag_real(&[0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn holevo_examples() {
        let zero = CMatrix::diag_real(&[1.0, 0.0]);
        let one = CMatrix::diag_real(&[0.0, 1.0]);
        let single = Ensemble::new(vec![(1.0, zero.clone())]).unwrap();
        assert!(holevo(&single).unwrap().abs() < 1e-12);
        let e = Ensemble::new(vec![(0.5, zero.clone()), (0.5, one)]).unwrap();
        assert!((holevo(&e).unwrap() - 1.0).abs() < 1e-12);
        // {|0>, |+>}: average state has eigenvalues (1 +- 1/sqrt 2)/2
        let e = Ensemble::new(vec![(0.5, zero), (0.5, plus())]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (l1, l2) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
        let oracle = -(l1 * l1.log2() + l2 * l2.log2());
        assert!((holevo(&e).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 0.6009).abs() < 1e-4);
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(vec![]).is_err());
        let z = CMatrix::diag_real(&[1.0, 0.0]);
        assert!(Ensemble::new(vec![(0.5, z.clone())]).is_err());
        assert!(Ensemble::new(vec![(0.0, z.clone()), (1.0, z)]).is_err());
    }

    #[test]
    fn rejects_incomplete_kraus() {
        let k = CMatrix::diag_real(&[1.0, 0.5]);
        assert!(KrausChannel::new(vec![k]).is_err());
        assert!(KrausChannel::new(vec![]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let ch = KrausChannel::identity(2);
        let rho = CMatrix::identity(3).scale(1.0 / 3.0);
        assert!(matches!(ch.apply(&rho), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn dephasing_bounds_are_tight() {
        let p = 0.3;
        let rho = CMatrix::diag_real(&[p, 1.0 - p]);
        let r = exchange_bound_report(&KrausChannel::dephasing(2), &rho, DEFAULT_GAP_TOL).unwrap();
        let h = -(p * p.log2() + (1.0 - p) * (1.0 - p).log2());
        assert!((r.lhs_bits - h).abs() < 1e-12);
        assert!(r.gap_bits.abs() < 1e-12);
        let a = average_entropy_report(&KrausChannel::dephasing(2), &plus(), DEFAULT_GAP_TOL).unwrap();
        assert!(a.gap.gap_bits.abs() < 1e-12);
        assert!(a.omega_identity_residual.abs() < 1e-10);
    }

    #[test]
    fn coherent_information_examples() {
        let rho = CMatrix::diag_real(&[0.3, 0.7]);
        let ic = coherent_information(&KrausChannel::identity(2), &rho, DEFAULT_GAP_TOL).unwrap();
        assert!(ic.saturated);
        let ic = coherent_information(
            &KrausChannel::fully_depolarizing_qubit(),
            &CMatrix::identity(2).scale(0.5),
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        assert!((ic.value_bits + 1.0).abs() < 1e-12);
        // a pure input survives dephasing with I_c = 0 = S(rho)
        let ic = coherent_information(&KrausChannel::dephasing(2), &plus(), DEFAULT_GAP_TOL).unwrap();
        assert!(ic.value_bits.abs() < 1e-12);
        assert!(ic.saturated);
        let ic = coherent_information(&KrausChannel::dephasing(2), &rho, DEFAULT_GAP_TOL).unwrap();
        assert!(ic.value_bits.abs() < 1e-12);
        assert!(!ic.saturated);
    }

    #[test]
    fn omega_of_dephasing_is_classical() {
        let rho = CMatrix::diag_real(&[0.3, 0.7]);
        let om = omega_state(&KrausChannel::dephasing(2), &rho).unwrap();
        assert_eq!(om.state.dims(), &[2, 2, 2]);
        let mut expect = CMatrix::zeros(8, 8);
        expect[(0, 0)] = C64::new(0.3, 0.0);
        expect[(7, 7)] = C64::new(0.7, 0.0);
        assert!(om.state.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn composition_helpers() {
        let d = KrausChannel::dephasing(2);
        let dd = d.then(&d).unwrap();
        assert_eq!(dd.n_kraus(), 4);
        let t = d.tensor(&KrausChannel::identity(2)).unwrap();
        assert_eq!((t.dim_in(), t.dim_out()), (4, 4));
    }
}

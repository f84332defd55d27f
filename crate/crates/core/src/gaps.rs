//! Entropy-gap functionals. Every gap is written `rhs - lhs` for an
//! inequality `lhs <= rhs`, so valid states give nonnegative gaps.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::state::{purify, MultipartiteState};

/// Default saturation tolerance, in bits.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapIdentity {
    /// `S(ABC) + S(B) <= S(AB) + S(BC)`
    SsaV1,
    /// `S(A) + S(C) <= S(AB) + S(CB)`
    SsaV2,
    /// `S(B) - S(C) <= S(BC)`
    ArakiLieb,
    /// SSA for both orderings (A,B,C) and (B,A,C); the gap is the larger one.
    BiSsaPair,
    /// Holevo quantity of the induced ensemble vs. exchange entropy.
    ExchangeBound,
    /// Average output entropy of the induced ensemble vs. input entropy.
    AverageEntropy,
}

impl GapIdentity {
    pub fn name(self) -> &'static str {
        match self {
            GapIdentity::SsaV1 => "ssa_v1",
            GapIdentity::SsaV2 => "ssa_v2",
            GapIdentity::ArakiLieb => "araki_lieb",
            GapIdentity::BiSsaPair => "bi_ssa_pair",
            GapIdentity::ExchangeBound => "exchange_bound",
            GapIdentity::AverageEntropy => "average_entropy",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub identity: GapIdentity,
    pub lhs_bits: f64,
    pub rhs_bits: f64,
    pub gap_bits: f64,
    pub saturated: bool,
}

impl GapReport {
    pub fn new(identity: GapIdentity, lhs_bits: f64, rhs_bits: f64, tol: f64) -> Self {
        let gap_bits = rhs_bits - lhs_bits;
        Self {
            identity,
            lhs_bits,
            rhs_bits,
            gap_bits,
            saturated: gap_bits.abs() <= tol,
        }
    }
}

/// Conditional mutual information `I(A:C|B)` of a tripartite state.
pub fn ssa_gap_v1(rho: &MultipartiteState, tol: f64) -> Result<GapReport> {
    rho.require_arity(3, "ssa_gap_v1")?;
    let s_abc = rho.entropy()?;
    let s_b = rho.entropy_of(&[1])?;
    let s_ab = rho.entropy_of(&[0, 1])?;
    let s_bc = rho.entropy_of(&[1, 2])?;
    Ok(GapReport::new(GapIdentity::SsaV1, s_abc + s_b, s_ab + s_bc, tol))
}

pub fn ssa_gap_v2(sigma: &MultipartiteState, tol: f64) -> Result<GapReport> {
    sigma.require_arity(3, "ssa_gap_v2")?;
    let s_a = sigma.entropy_of(&[0])?;
    let s_c = sigma.entropy_of(&[2])?;
    let s_ab = sigma.entropy_of(&[0, 1])?;
    let s_cb = sigma.entropy_of(&[1, 2])?;
    Ok(GapReport::new(GapIdentity::SsaV2, s_a + s_c, s_ab + s_cb, tol))
}

/// Gap of `S(B) - S(C) <= S(BC)` for a bipartite state on (B, C).
pub fn araki_lieb_gap(omega: &MultipartiteState, tol: f64) -> Result<GapReport> {
    omega.require_arity(2, "araki_lieb_gap")?;
    let s_bc = omega.entropy()?;
    let s_b = omega.entropy_of(&[0])?;
    let s_c = omega.entropy_of(&[1])?;
    Ok(GapReport::new(GapIdentity::ArakiLieb, s_b - s_c, s_bc, tol))
}

/// Residuals of the three purified forms of the second SSA version.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurificationResiduals {
    /// `S(CD) + S(AD) - S(A) - S(C)`
    pub eq7_bits: f64,
    /// `S(AB) + S(AD) - S(A) - S(ABD)`, the SSA gap of the (B, A, D) grouping.
    pub eq8_bits: f64,
    /// `S(CD) + S(CB) - S(C) - S(CBD)`, the SSA gap of the (B, C, D) grouping.
    pub eq9_bits: f64,
    /// Dimension of the purifying system D.
    pub reference_dim: usize,
}

pub fn purification_identities(sigma: &MultipartiteState) -> Result<PurificationResiduals> {
    sigma.require_arity(3, "purification_identities")?;
    let full = purify(sigma, "__D")?;
    let (a, b, c, d) = (0, 1, 2, 3);
    let s = |idx: &[usize]| full.entropy_of(idx);
    let eq7 = s(&[c, d])? + s(&[a, d])? - s(&[a])? - s(&[c])?;
    let eq8 = s(&[a, b])? + s(&[a, d])? - s(&[a])? - s(&[a, b, d])?;
    let eq9 = s(&[c, d])? + s(&[b, c])? - s(&[c])? - s(&[b, c, d])?;
    Ok(PurificationResiduals {
        eq7_bits: eq7,
        eq8_bits: eq8,
        eq9_bits: eq9,
        reference_dim: full.dims()[3],
    })
}

/// The purified four-party state regrouped as `(B, A, D)`; its SSA gap equals `ssa_gap_v2`.
pub fn purified_bad_grouping(sigma: &MultipartiteState) -> Result<MultipartiteState> {
    sigma.require_arity(3, "purified_bad_grouping")?;
    let full = purify(sigma, "__D")?;
    full.marginal(&[1, 0, 3])
}

//! Decomposition engines for saturated entropy inequalities.

pub mod algebra;
pub mod araki_lieb;
pub mod bi_ssa;
pub mod channel_sat;
pub mod markov;
pub mod petz;
pub mod theorem1;
pub mod wedderburn;

pub use algebra::{algebra_closure, OperatorAlgebra};
pub use araki_lieb::{araki_lieb_decompose, ArakiLiebStructure};
pub use bi_ssa::{bi_ssa_report, BiSsaReport, BiSsaSectors};
pub use channel_sat::{
    channel_saturation_analyze, coherent_saturation_check, holevo_saturation_analyze,
    ChannelSaturationReport, CoherentSaturationReport, HolevoSaturationReport, OutputSector,
    ProductCheck, ProposedFactorization,
};
pub use markov::{dual_recovery_minus_identity, markov_algebra_blocks, markov_decompose, MarkovStructure, REASSEMBLY_TOL};
pub use petz::{petz_markov_error, petz_recover};
pub use theorem1::{theorem1_decompose, TheoremOneCell, TheoremOneStructure};
pub use wedderburn::{wedderburn_blocks, FactorBlock, FactorDecomposition};

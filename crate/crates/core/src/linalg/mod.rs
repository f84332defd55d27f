//! Dense complex linear algebra.

pub mod eig;
pub mod matrix;
pub mod svd;
pub mod tensor;

pub use eig::{
    hermitian_eig, isometry_defect, psd_roots, support_projector, trace_distance,
    trace_norm_hermitian, unitarity_defect, PsdRoots, SpectralDecomposition, SUPPORT_CUTOFF,
};
pub use matrix::{inner, orthonormalize, vec_norm, CMatrix, C64, ONE, ZERO};
pub use svd::{null_space, rank, svd, trace_norm, Svd};
pub use tensor::{kron, kron_all, kron_vec, partial_trace, permute_ket, permute_subsystems, MAX_DIM};

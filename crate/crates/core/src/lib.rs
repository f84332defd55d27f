//! Entropy saturation gaps and block-structure recovery.
//!
//! The crate evaluates the strong subadditivity (SSA) gaps, the Araki-Lieb gap
//! and the entropy bounds attached to a Kraus channel. When a gap vanishes it
//! recovers the block decomposition that forces equality.

pub mod channel;
pub mod error;
pub mod gaps;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod state;
pub mod structure;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use state::MultipartiteState;

//! Typed report payloads. Typing them (instead of building JSON by hand)
//! lets `ReportFile::new` catch non-finite numbers.

use serde::{Deserialize, Serialize};
use ssa_structure::channel::AverageEntropyReport;
use ssa_structure::gaps::GapReport;
use ssa_structure::structure::{
    ArakiLiebStructure, BiSsaReport, ChannelSaturationReport, CoherentSaturationReport,
    HolevoSaturationReport, MarkovStructure, TheoremOneStructure,
};

pub const OK: &str = "ok";
pub const NOT_SATURATED: &str = "not_saturated";

#[derive(Serialize, Deserialize)]
pub struct Gaps {
    pub status: String,
    pub gaps: Vec<GapReport>,
}

#[derive(Serialize, Deserialize)]
pub struct NotSaturated {
    pub status: String,
    pub identity: String,
    pub gap_bits: f64,
    pub detail: String,
}

#[derive(Serialize, Deserialize)]
pub struct Markov {
    pub status: String,
    pub block_dims: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
    pub reassembly_error: f64,
    pub structure: MarkovStructure,
}

#[derive(Serialize, Deserialize)]
pub struct Theorem1 {
    pub status: String,
    pub a_block_dims: Vec<(usize, usize)>,
    pub c_block_dims: Vec<(usize, usize)>,
    pub joint_weights: Vec<Vec<f64>>,
    pub worst_purity: f64,
    pub refinement_depth: usize,
    pub reassembly_error: f64,
    pub structure: TheoremOneStructure,
}

#[derive(Serialize, Deserialize)]
pub struct ArakiLieb {
    pub status: String,
    pub dim_l: usize,
    pub dim_r: usize,
    pub reassembly_error: f64,
    pub structure: ArakiLiebStructure,
}

#[derive(Serialize, Deserialize)]
pub struct BiSsa {
    pub status: String,
    pub sector_weights: Vec<f64>,
    pub reassembly_error: f64,
    pub report: BiSsaReport,
}

#[derive(Serialize, Deserialize)]
pub struct Holevo {
    pub status: String,
    pub exchange: GapReport,
    /// `(dim_l, dim_r, weight)` per output block.
    pub output_blocks: Vec<(usize, usize, f64)>,
    pub output_reassembly_error: f64,
    pub structure: HolevoSaturationReport,
}

#[derive(Serialize, Deserialize)]
pub struct HolevoGapOnly {
    pub status: String,
    pub exchange: GapReport,
}

#[derive(Serialize, Deserialize)]
pub struct AverageEntropy {
    pub status: String,
    pub report: AverageEntropyReport,
    pub saturation: ChannelSaturationReport,
}

#[derive(Serialize, Deserialize)]
pub struct Coherent {
    pub status: String,
    pub report: CoherentSaturationReport,
}

#[derive(Serialize, Deserialize)]
pub struct Saturation {
    pub status: String,
    pub report: ChannelSaturationReport,
}

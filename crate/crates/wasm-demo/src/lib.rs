//! Three operations for the static demo page in `www/`. Each takes plain
//! numbers or a state file and returns a JSON string.

use serde::Serialize;
use ssa_structure::channel::KrausChannel;
use ssa_structure::gaps::{araki_lieb_gap, ssa_gap_v1, ssa_gap_v2, GapReport, DEFAULT_GAP_TOL};
use ssa_structure::generators::{planted_markov, random_markov_spec, scramble_local, Seed};
use ssa_structure::io::{parse, StateFile};
use ssa_structure::structure::{holevo_saturation_analyze, markov_decompose};
use ssa_structure::CMatrix;
use wasm_bindgen::prelude::*;

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Gaps {
    dims: Vec<usize>,
    gaps: Vec<GapReport>,
}

/// Gaps of a pasted state file: both SSA forms for three parties, Araki-Lieb for two.
pub fn gaps_of(state_json: &str) -> Result<String, String> {
    let st = parse::<StateFile>(state_json)
        .and_then(StateFile::into_state)
        .map_err(|e| e.to_string())?;
    let t = DEFAULT_GAP_TOL;
    let gaps = match st.arity() {
        3 => vec![ssa_gap_v1(&st, t), ssa_gap_v2(&st, t)],
        2 => vec![araki_lieb_gap(&st, t)],
        n => return Err(format!("need 2 or 3 subsystems, got {n}")),
    };
    let gaps = gaps.into_iter().collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    json(&Gaps {
        dims: st.dims().to_vec(),
        gaps,
    })
}

#[derive(Serialize)]
struct MarkovDemo {
    planted: Vec<(usize, usize)>,
    planted_weights: Vec<f64>,
    recovered: Vec<(usize, usize)>,
    recovered_weights: Vec<f64>,
    gap_bits: f64,
    reassembly_error: f64,
}

/// Plants a Markov chain from `seed`, hides it behind a random unitary on B
/// and recovers the blocks.
pub fn markov_round_trip(seed: u64) -> Result<String, String> {
    let run = || -> ssa_structure::Result<MarkovDemo> {
        let spec = random_markov_spec(&mut Seed(seed).rng(10))?;
        let p = planted_markov(&spec, Seed(seed))?;
        let st = scramble_local(&p.state, &["B"], Seed(seed ^ 0x9e37))?;
        let m = markov_decompose(&st, DEFAULT_GAP_TOL)?;
        Ok(MarkovDemo {
            planted: p.decomposition.blocks.iter().map(|b| (b.dim_l, b.dim_r)).collect(),
            planted_weights: p.weights,
            recovered: m.b_decomposition.blocks.iter().map(|b| (b.dim_l, b.dim_r)).collect(),
            recovered_weights: m.weights.clone(),
            gap_bits: ssa_gap_v1(&st, DEFAULT_GAP_TOL)?.gap_bits,
            reassembly_error: m.reassembly_error,
        })
    };
    json(&run().map_err(|e| e.to_string())?)
}

#[derive(Serialize)]
struct DephasingDemo {
    holevo_bits: f64,
    exchange_bits: f64,
    gap_bits: f64,
    output_blocks: Vec<(usize, usize, f64)>,
}

/// Dephasing on `diag(p, 1 - p)`: the Holevo quantity meets the exchange entropy.
pub fn dephasing_holevo(p: f64) -> Result<String, String> {
    if !(0.0..=1.0).contains(&p) {
        return Err(format!("p must lie in [0, 1], got {p}"));
    }
    let rho = CMatrix::diag_real(&[p, 1.0 - p]);
    let h = holevo_saturation_analyze(&KrausChannel::dephasing(2), &rho, DEFAULT_GAP_TOL)
        .map_err(|e| e.to_string())?;
    json(&DephasingDemo {
        holevo_bits: h.exchange.lhs_bits,
        exchange_bits: h.exchange.rhs_bits,
        gap_bits: h.exchange.gap_bits,
        output_blocks: h.output_sectors.iter().map(|s| (s.dim_l, s.dim_r, s.weight)).collect(),
    })
}

#[wasm_bindgen(js_name = gapsOf)]
pub fn gaps_of_js(state_json: &str) -> Result<String, JsValue> {
    gaps_of(state_json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = markovRoundTrip)]
pub fn markov_round_trip_js(seed: u32) -> Result<String, JsValue> {
    markov_round_trip(seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = dephasingHolevo)]
pub fn dephasing_holevo_js(p: f64) -> Result<String, JsValue> {
    dephasing_holevo(p).map_err(|e| JsValue::from_str(&e))
}

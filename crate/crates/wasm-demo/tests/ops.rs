use serde_json::Value;
use ssa_wasm_demo::{dephasing_holevo, gaps_of, markov_round_trip};

#[test]
fn ghz_gaps() {
    let h = [0.5, 0.0];
    let z = [0.0, 0.0];
    let mut rows = vec![vec![z; 8]; 8];
    for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
        rows[i][j] = h;
    }
    let text = serde_json::json!({"format_version": "1", "labels": ["A", "B", "C"], "dims": [2, 2, 2], "matrix": rows});
    let v: Value = serde_json::from_str(&gaps_of(&text.to_string()).unwrap()).unwrap();
    let g1 = v["gaps"][0]["gap_bits"].as_f64().unwrap();
    let g2 = v["gaps"][1]["gap_bits"].as_f64().unwrap();
    assert!((g1 - 1.0).abs() < 1e-9);
    assert!(g2.abs() < 1e-9);
}

#[test]
fn bad_state_is_reported() {
    assert!(gaps_of("{\"format_version\": \"1\"}").is_err());
}

#[test]
fn markov_blocks_come_back() {
    for seed in 0..5 {
        let v: Value = serde_json::from_str(&markov_round_trip(seed).unwrap()).unwrap();
        let mut a = v["planted"].as_array().unwrap().clone();
        let mut b = v["recovered"].as_array().unwrap().clone();
        a.sort_by_key(|x| x.to_string());
        b.sort_by_key(|x| x.to_string());
        assert_eq!(a, b);
        assert!(v["reassembly_error"].as_f64().unwrap() <= 1e-7);
    }
}

#[test]
fn dephasing_gap_vanishes() {
    let v: Value = serde_json::from_str(&dephasing_holevo(0.3).unwrap()).unwrap();
    assert!(v["gap_bits"].as_f64().unwrap().abs() <= 1e-9);
    assert!(dephasing_holevo(1.5).is_err());
}

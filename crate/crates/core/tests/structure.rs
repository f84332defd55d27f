use ssa_structure::gaps::DEFAULT_GAP_TOL;
use ssa_structure::generators::{
    planted_araki_lieb, planted_bi_ssa, planted_markov, scramble_local, BiSsaSpec, MarkovSpec, Seed,
};
use ssa_structure::linalg::trace_distance;
use ssa_structure::structure::{araki_lieb_decompose, bi_ssa_report, markov_decompose, theorem1_decompose};
use ssa_structure::{CMatrix, Error, MultipartiteState, C64};

#[test]
fn markov_blocks_survive_scrambling_of_b() {
    let spec = MarkovSpec {
        dim_a: 2,
        dim_c: 2,
        blocks: vec![(1, 2), (2, 1)],
        weights: Some(vec![0.3, 0.7]),
    };
    let planted = planted_markov(&spec, Seed(3)).unwrap();
    let st = scramble_local(&planted.state, &["B"], Seed(4)).unwrap();
    let m = markov_decompose(&st, DEFAULT_GAP_TOL).unwrap();
    assert_eq!(m.b_decomposition.dim_multiset(), vec![(1, 2), (2, 1)]);
    let mut w = m.weights.clone();
    w.sort_by(f64::total_cmp);
    assert!((w[0] - 0.3).abs() < 1e-8 && (w[1] - 0.7).abs() < 1e-8, "{w:?}");
    assert!(trace_distance(&m.reassemble().unwrap(), st.matrix()).unwrap() < 1e-7);
}

#[test]
fn araki_lieb_factor_dimensions_are_recovered() {
    let p = planted_araki_lieb(2, 3, 3, Seed(9)).unwrap();
    let st = scramble_local(&p.state, &["B"], Seed(10)).unwrap();
    let s = araki_lieb_decompose(&st, DEFAULT_GAP_TOL).unwrap();
    assert_eq!((s.dim_l, s.dim_r), (2, 3));
    assert!(trace_distance(&s.reassemble().unwrap(), st.matrix()).unwrap() < 1e-7);
}

#[test]
fn bi_ssa_sectors_follow_the_planted_map() {
    let spec = BiSsaSpec {
        a_blocks: vec![(1, 2), (2, 1)],
        b_blocks: vec![(2, 1), (1, 2)],
        dim_c: 2,
        p: vec![vec![0.4, 0.0], vec![0.0, 0.6]],
        k: vec![vec![0, 0], vec![0, 1]],
    };
    let planted = planted_bi_ssa(&spec, Seed(1)).unwrap();
    let r = bi_ssa_report(&planted.state, DEFAULT_GAP_TOL).unwrap();
    assert_eq!(r.sectors.sector_weights.len(), planted.sector_count);
    let mut w = r.sectors.sector_weights.clone();
    w.sort_by(f64::total_cmp);
    assert!((w[0] - 0.4).abs() < 1e-8 && (w[1] - 0.6).abs() < 1e-8);
}

#[test]
fn ghz_is_rejected_as_not_saturated() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut ket = vec![C64::new(0.0, 0.0); 8];
    ket[0] = C64::new(s, 0.0);
    ket[7] = C64::new(s, 0.0);
    let ghz = MultipartiteState::pure(&ket, &[2, 2, 2], &["A", "B", "C"]).unwrap();
    assert!(matches!(markov_decompose(&ghz, DEFAULT_GAP_TOL), Err(Error::NotSaturated { .. })));
    assert!(matches!(bi_ssa_report(&ghz, DEFAULT_GAP_TOL), Err(Error::NotSaturated { .. })));
}

#[test]
fn product_state_gives_trivial_theorem1_structure() {
    let rho = |d: usize| CMatrix::identity(d).scale(1.0 / d as f64);
    let pure_b = CMatrix::diag_real(&[1.0, 0.0]);
    let m = ssa_structure::linalg::kron_all(&[&rho(2), &pure_b, &rho(2)]).unwrap();
    let st = MultipartiteState::with_labels(m, &[2, 2, 2], &["A", "B", "C"]).unwrap();
    let t = theorem1_decompose(&st, DEFAULT_GAP_TOL).unwrap();
    assert!(t.worst_purity() > 1.0 - 1e-7);
    assert!(trace_distance(&t.reassemble().unwrap(), st.matrix()).unwrap() < 1e-7);
}

#[test]
fn mismatched_arity_is_an_input_error() {
    let st = MultipartiteState::with_labels(CMatrix::identity(4).scale(0.25), &[2, 2], &["A", "B"]).unwrap();
    let e = markov_decompose(&st, DEFAULT_GAP_TOL).unwrap_err();
    assert_eq!(e.exit_code(), 1);
}

use std::fs;
use std::path::Path;

use ssa_structure::channel::{average_entropy_report, exchange_bound_report, KrausChannel};
use ssa_structure::gaps::{araki_lieb_gap, ssa_gap_v1, ssa_gap_v2, DEFAULT_GAP_TOL};
use ssa_structure::generators::{
    apply_local_unitaries, planted_araki_lieb, planted_bi_ssa, planted_markov, planted_theorem1,
    random_channel, random_density, random_markov_spec, random_theorem1_spec, scramble_local,
    BiSsaSpec, MarkovSpec, Seed, Theorem1Spec,
};
use ssa_structure::io::{
    load_channel, load_state, parse, to_pretty_text, to_text, ChannelFile, ReportFile, ReportKind,
    StateFile,
};
use ssa_structure::structure::{
    araki_lieb_decompose, bi_ssa_report, channel_saturation_analyze, coherent_saturation_check,
    holevo_saturation_analyze, markov_decompose, theorem1_decompose,
};
use ssa_structure::{CMatrix, Error, MultipartiteState, Result, C64};

use crate::payload::{self, NOT_SATURATED, OK};
use crate::{Analyze, Cli, Command, GenFamily, Mode, Which};

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Gen(f) => gen(cli, f),
        Command::Check { state, which } => check(cli, state, *which),
        Command::Decompose { state, mode } => decompose(cli, state, *mode),
        Command::Channel {
            channel,
            state,
            analyze,
        } => channel_cmd(cli, channel, state, *analyze),
        Command::Selftest => selftest(cli),
    }
}

fn tol(cli: &Cli) -> Result<f64> {
    let t = cli.tol.unwrap_or(DEFAULT_GAP_TOL);
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!("--tol must be a nonnegative number, got {t}")));
    }
    Ok(t)
}

fn seed(cli: &Cli) -> Seed {
    Seed(cli.seed.unwrap_or(0))
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn note(cli: &Cli, msg: &str) {
    if !cli.quiet {
        eprintln!("{msg}");
    }
}

fn read_spec<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

fn emit_state(cli: &Cli, st: &MultipartiteState) -> Result<u8> {
    emit(cli, &to_text(&StateFile::from_state(st))?)?;
    note(cli, &format!("state dims {:?} labels {:?}", st.dims(), st.labels()));
    Ok(0)
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|k| ((b'A' + k as u8) as char).to_string()).collect()
}

fn ghz(parties: usize) -> Result<MultipartiteState> {
    if !(1..=8).contains(&parties) {
        return Err(Error::InvalidInput("GHZ needs 1 to 8 parties".into()));
    }
    let d = 1usize << parties;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut ket = vec![C64::new(0.0, 0.0); d];
    ket[0] = C64::new(s, 0.0);
    ket[d - 1] = C64::new(s, 0.0);
    let labels = default_labels(parties);
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    MultipartiteState::pure(&ket, &vec![2; parties], &refs)
}

/// Two A blocks, two B blocks, two C sectors.
fn default_bi_ssa_spec() -> BiSsaSpec {
    BiSsaSpec {
        a_blocks: vec![(1, 2), (2, 1)],
        b_blocks: vec![(2, 1), (1, 2)],
        dim_c: 2,
        p: vec![vec![0.4, 0.0], vec![0.0, 0.6]],
        k: vec![vec![0, 0], vec![0, 1]],
    }
}

fn gen(cli: &Cli, family: &GenFamily) -> Result<u8> {
    let seed = seed(cli);
    match family {
        GenFamily::State { dims, labels, rank } => {
            let d: usize = dims.iter().product();
            let m = random_density(d, rank.unwrap_or(d), seed)?;
            let labels = labels.clone().unwrap_or_else(|| default_labels(dims.len()));
            emit_state(cli, &MultipartiteState::new(m, dims.clone(), labels)?)
        }
        GenFamily::Channel {
            d_in,
            d_out,
            n_kraus,
        } => {
            let ch = random_channel(*d_in, *d_out, *n_kraus, seed)?;
            emit(cli, &to_text(&ChannelFile::from_channel(&ch))?)?;
            note(cli, &format!("channel {d_in} -> {d_out}, {n_kraus} Kraus operators"));
            Ok(0)
        }
        GenFamily::Dephasing { dim } => {
            if *dim == 0 {
                return Err(Error::InvalidInput("dimension must be positive".into()));
            }
            let ch = KrausChannel::dephasing(*dim);
            emit(cli, &to_text(&ChannelFile::from_channel(&ch))?)?;
            Ok(0)
        }
        GenFamily::Ghz { parties } => emit_state(cli, &ghz(*parties)?),
        GenFamily::Markov(s) => {
            let spec: MarkovSpec = match &s.spec {
                Some(p) => read_spec(p)?,
                None => random_markov_spec(&mut seed.rng(10))?,
            };
            let p = planted_markov(&spec, seed)?;
            note(cli, &format!("planted B blocks {:?}", p.decomposition.dim_multiset()));
            emit_state(cli, &p.state)
        }
        GenFamily::Theorem1(s) => {
            let spec: Theorem1Spec = match &s.spec {
                Some(p) => read_spec(p)?,
                None => random_theorem1_spec(&mut seed.rng(11))?,
            };
            let p = planted_theorem1(&spec, seed)?;
            note(
                cli,
                &format!(
                    "planted A blocks {:?}, C blocks {:?}",
                    p.a_decomposition.dim_multiset(),
                    p.c_decomposition.dim_multiset()
                ),
            );
            emit_state(cli, &p.state)
        }
        GenFamily::ArakiLieb {
            dim_l,
            dim_r,
            dim_c,
        } => emit_state(cli, &planted_araki_lieb(*dim_l, *dim_r, *dim_c, seed)?.state),
        GenFamily::BiSsa(s) => {
            let spec: BiSsaSpec = match &s.spec {
                Some(p) => read_spec(p)?,
                None => default_bi_ssa_spec(),
            };
            let p = planted_bi_ssa(&spec, seed)?;
            note(cli, &format!("{} C sectors", p.sector_count));
            emit_state(cli, &p.state)
        }
        GenFamily::Scramble { input, labels } => {
            let st = load_state(input)?;
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            emit_state(cli, &scramble_local(&st, &refs, seed)?)
        }
    }
}

fn write_report(cli: &Cli, report: &ReportFile) -> Result<()> {
    emit(cli, &to_pretty_text(report)?)
}

fn check(cli: &Cli, path: &Path, which: Which) -> Result<u8> {
    let tol = tol(cli)?;
    let st = load_state(path)?;
    let gaps = match which {
        Which::Ssa1 => vec![ssa_gap_v1(&st, tol)?],
        Which::Ssa2 => vec![ssa_gap_v2(&st, tol)?],
        Which::ArakiLieb => vec![araki_lieb_gap(&st, tol)?],
        Which::All => match st.arity() {
            3 => vec![ssa_gap_v1(&st, tol)?, ssa_gap_v2(&st, tol)?],
            2 => vec![araki_lieb_gap(&st, tol)?],
            n => {
                return Err(Error::InvalidInput(format!(
                    "no gap identities for a state with {n} subsystems"
                )))
            }
        },
    };
    for g in &gaps {
        note(cli, &format!("{:?}: gap {:.3e} bits, saturated {}", g.identity, g.gap_bits, g.saturated));
    }
    let payload = payload::Gaps {
        status: OK.into(),
        gaps,
    };
    let r = ReportFile::new(ReportKind::Gap, &payload, &[("gap_bits", tol)], cli.seed)?;
    write_report(cli, &r)?;
    Ok(0)
}

fn not_saturated_report(cli: &Cli, kind: ReportKind, err: &Error, tol: f64) -> Result<u8> {
    if let Error::NotSaturated {
        identity,
        gap,
        detail,
    } = err
    {
        let p = payload::NotSaturated {
            status: NOT_SATURATED.into(),
            identity: identity.clone(),
            gap_bits: *gap,
            detail: detail.clone(),
        };
        write_report(cli, &ReportFile::new(kind, &p, &[("gap_bits", tol)], cli.seed)?)?;
        note(cli, &format!("not saturated: {detail}"));
        return Ok(2);
    }
    Err(err.clone())
}

fn decompose(cli: &Cli, path: &Path, mode: Mode) -> Result<u8> {
    let tol = tol(cli)?;
    let st = load_state(path)?;
    let tols = [("gap_bits", tol), ("reassembly_trace_distance", 1e-7)];
    let kind = match mode {
        Mode::Markov => ReportKind::Markov,
        Mode::Thm1 => ReportKind::Theorem1,
        Mode::ArakiLieb => ReportKind::ArakiLieb,
        Mode::BiSsa => ReportKind::BiSsa,
    };
    let report = match mode {
        Mode::Markov => markov_decompose(&st, tol).and_then(|s| {
            note(cli, &format!("B blocks {:?}", s.b_decomposition.dim_multiset()));
            let p = payload::Markov {
                status: OK.into(),
                block_dims: s.b_decomposition.blocks.iter().map(|b| (b.dim_l, b.dim_r)).collect(),
                weights: s.weights.clone(),
                reassembly_error: s.reassembly_error,
                structure: s,
            };
            ReportFile::new(kind, &p, &tols, cli.seed)
        }),
        Mode::Thm1 => theorem1_decompose(&st, tol).and_then(|s| {
            note(
                cli,
                &format!(
                    "A blocks {:?}, C blocks {:?}",
                    s.a_decomposition.dim_multiset(),
                    s.c_decomposition.dim_multiset()
                ),
            );
            let p = payload::Theorem1 {
                status: OK.into(),
                a_block_dims: s.a_decomposition.blocks.iter().map(|b| (b.dim_l, b.dim_r)).collect(),
                c_block_dims: s.c_decomposition.blocks.iter().map(|b| (b.dim_l, b.dim_r)).collect(),
                joint_weights: s.joint_weights.clone(),
                worst_purity: s.worst_purity(),
                refinement_depth: s.refinement_depth,
                reassembly_error: s.reassembly_error,
                structure: s,
            };
            ReportFile::new(kind, &p, &tols, cli.seed)
        }),
        Mode::ArakiLieb => araki_lieb_decompose(&st, tol).and_then(|s| {
            note(cli, &format!("B = L({}) x R({})", s.dim_l, s.dim_r));
            let p = payload::ArakiLieb {
                status: OK.into(),
                dim_l: s.dim_l,
                dim_r: s.dim_r,
                reassembly_error: s.reassembly_error,
                structure: s,
            };
            ReportFile::new(kind, &p, &tols, cli.seed)
        }),
        Mode::BiSsa => bi_ssa_report(&st, tol).and_then(|r| {
            note(cli, &format!("{} C sectors", r.sectors.sector_weights.len()));
            let p = payload::BiSsa {
                status: OK.into(),
                sector_weights: r.sectors.sector_weights.clone(),
                reassembly_error: r.sectors.reassembly_error,
                report: r,
            };
            ReportFile::new(kind, &p, &tols, cli.seed)
        }),
    };
    match report {
        Ok(r) => {
            write_report(cli, &r)?;
            Ok(0)
        }
        Err(e) => not_saturated_report(cli, kind, &e, tol),
    }
}

fn input_matrix(phi: &KrausChannel, st: &MultipartiteState) -> Result<CMatrix> {
    if st.dim() != phi.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "channel input dimension {} but state dimension {}",
            phi.dim_in(),
            st.dim()
        )));
    }
    Ok(st.matrix().clone())
}

fn channel_cmd(cli: &Cli, channel: &Path, state: &Path, analyze: Analyze) -> Result<u8> {
    let tol = tol(cli)?;
    let phi = load_channel(channel)?;
    let rho = input_matrix(&phi, &load_state(state)?)?;
    let report = match analyze {
        Analyze::Holevo => {
            let exchange = exchange_bound_report(&phi, &rho, tol)?;
            note(cli, &format!("exchange bound gap {:.3e} bits", exchange.gap_bits));
            if exchange.saturated {
                let h = holevo_saturation_analyze(&phi, &rho, tol)?;
                let p = payload::Holevo {
                    status: OK.into(),
                    exchange,
                    output_blocks: h.output_sectors.iter().map(|s| (s.dim_l, s.dim_r, s.weight)).collect(),
                    output_reassembly_error: h.output_reassembly_error,
                    structure: h,
                };
                ReportFile::new(ReportKind::HolevoSaturation, &p, &[("gap_bits", tol)], cli.seed)?
            } else {
                let p = payload::HolevoGapOnly {
                    status: NOT_SATURATED.into(),
                    exchange,
                };
                ReportFile::new(ReportKind::HolevoSaturation, &p, &[("gap_bits", tol)], cli.seed)?
            }
        }
        Analyze::AverageEntropy => {
            let r = average_entropy_report(&phi, &rho, tol)?;
            let s = channel_saturation_analyze(&phi, &rho, tol)?;
            note(cli, &format!("average entropy gap {:.3e} bits, rank_one {}", r.gap.gap_bits, s.rank_one));
            let p = payload::AverageEntropy {
                status: OK.into(),
                report: r,
                saturation: s,
            };
            ReportFile::new(ReportKind::Gap, &p, &[("gap_bits", tol), ("rank_one_relative", tol)], cli.seed)?
        }
        Analyze::Coherent => {
            let r = coherent_saturation_check(&phi, &rho, None, tol)?;
            note(cli, &format!("coherent information {:.6} bits", r.coherent.value_bits));
            let p = payload::Coherent {
                status: OK.into(),
                report: r,
            };
            ReportFile::new(ReportKind::Gap, &p, &[("gap_bits", tol)], cli.seed)?
        }
        Analyze::Saturation => {
            let r = channel_saturation_analyze(&phi, &rho, tol)?;
            note(cli, &format!("rank_one {}", r.rank_one));
            let p = payload::Saturation {
                status: OK.into(),
                report: r,
            };
            ReportFile::new(ReportKind::ChannelSaturation, &p, &[("rank_one_relative", tol)], cli.seed)?
        }
    };
    write_report(cli, &report)?;
    Ok(0)
}

struct Case {
    name: &'static str,
    run: fn() -> Result<bool>,
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

const CASES: &[Case] = &[
    Case {
        name: "entropy of I/2 is one bit",
        run: || {
            let st = MultipartiteState::with_labels(CMatrix::identity(2).scale(0.5), &[2], &["A"])?;
            Ok(near(st.entropy()?, 1.0, 1e-10))
        },
    },
    Case {
        name: "entropy of diag(1/2,1/4,1/4) is 1.5 bits",
        run: || {
            let st = MultipartiteState::with_labels(CMatrix::diag_real(&[0.5, 0.25, 0.25]), &[3], &["A"])?;
            Ok(near(st.entropy()?, 1.5, 1e-10))
        },
    },
    Case {
        name: "GHZ gaps",
        run: || {
            let g = ghz(3)?;
            Ok(near(ssa_gap_v1(&g, DEFAULT_GAP_TOL)?.gap_bits, 1.0, 1e-9)
                && near(ssa_gap_v2(&g, DEFAULT_GAP_TOL)?.gap_bits, 0.0, 1e-9))
        },
    },
    Case {
        name: "planted Markov round trip",
        run: || {
            let spec = MarkovSpec {
                dim_a: 2,
                dim_c: 2,
                blocks: vec![(2, 1), (1, 2)],
                weights: None,
            };
            let p = planted_markov(&spec, Seed(1))?;
            let st = scramble_local(&p.state, &["B"], Seed(2))?;
            let m = markov_decompose(&st, DEFAULT_GAP_TOL)?;
            Ok(m.b_decomposition.dim_multiset() == p.decomposition.dim_multiset() && m.reassembly_error <= 1e-7)
        },
    },
    Case {
        name: "planted Theorem-1 round trip",
        run: || {
            let spec = Theorem1Spec {
                a_blocks: vec![(2, 1), (1, 2)],
                c_blocks: vec![(1, 2), (2, 1)],
                dim_b: 2,
                mu: vec![vec![0.35, 0.0], vec![0.0, 0.65]],
            };
            let p = planted_theorem1(&spec, Seed(3))?;
            let st = scramble_local(&p.state, &["A", "C"], Seed(4))?;
            let t = theorem1_decompose(&st, DEFAULT_GAP_TOL)?;
            Ok(t.a_decomposition.dim_multiset() == p.a_decomposition.dim_multiset()
                && t.c_decomposition.dim_multiset() == p.c_decomposition.dim_multiset()
                && t.worst_purity() >= 1.0 - 1e-7)
        },
    },
    Case {
        name: "planted Araki-Lieb round trip",
        run: || {
            let p = planted_araki_lieb(2, 2, 2, Seed(5))?;
            let a = araki_lieb_decompose(&p.state, DEFAULT_GAP_TOL)?;
            Ok((a.dim_l, a.dim_r) == (2, 2) && a.reassembly_error <= 1e-7)
        },
    },
    Case {
        name: "planted bi-SSA sectors",
        run: || {
            let p = planted_bi_ssa(&default_bi_ssa_spec(), Seed(6))?;
            let r = bi_ssa_report(&p.state, DEFAULT_GAP_TOL)?;
            Ok(r.sectors.sector_weights.len() == p.sector_count)
        },
    },
    Case {
        name: "dephasing saturates the exchange bound",
        run: || {
            let rho = CMatrix::diag_real(&[0.3, 0.7]);
            let h = holevo_saturation_analyze(&KrausChannel::dephasing(2), &rho, DEFAULT_GAP_TOL)?;
            Ok(h.exchange.gap_bits.abs() <= 1e-9 && h.output_reassembly_error <= 1e-7)
        },
    },
    Case {
        name: "unitary channel is invertible",
        run: || {
            let u = ssa_structure::generators::random_unitary(3, Seed(7))?;
            let rho = random_density(3, 3, Seed(8))?;
            let r = channel_saturation_analyze(&KrausChannel::unitary(u)?, &rho, DEFAULT_GAP_TOL)?;
            Ok(r.rank_one && r.reconstruction_error.is_some_and(|e| e <= 1e-9))
        },
    },
    Case {
        name: "identity rotation leaves a state unchanged",
        run: || {
            let st = MultipartiteState::with_labels(random_density(4, 4, Seed(9))?, &[2, 2], &["A", "B"])?;
            let id = CMatrix::identity(2);
            let same = apply_local_unitaries(&st, &[("A", &id), ("B", &id)])?;
            Ok(same.matrix().max_abs_diff(st.matrix()) == 0.0)
        },
    },
];

fn selftest(cli: &Cli) -> Result<u8> {
    let mut out = String::new();
    let mut failed = 0;
    for case in CASES {
        let (tag, extra) = match (case.run)() {
            Ok(true) => ("PASS", String::new()),
            Ok(false) => ("FAIL", String::new()),
            Err(e) => ("FAIL", format!(" ({e})")),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        out.push_str(&format!("{tag} {}{extra}\n", case.name));
    }
    emit(cli, &out)?;
    note(cli, &format!("{} of {} checks passed", CASES.len() - failed, CASES.len()));
    Ok(if failed == 0 { 0 } else { 3 })
}

//! Random states and channels, and planted instances of every saturating family.
//!
//! All sampling goes through ChaCha8 streams seeded from a 64-bit [`Seed`];
//! Gaussians use Box-Muller on draws taken in a fixed order, so equal seeds
//! give bit-identical output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{kron, kron_all, orthonormalize, permute_subsystems, CMatrix, C64};
use crate::state::MultipartiteState;
use crate::structure::{FactorBlock, FactorDecomposition};

/// Smallest weight given to a sampled block.
pub const MIN_BLOCK_WEIGHT: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    /// Generator for an independent stream of this seed.
    pub fn rng(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    // 1 - u keeps the logarithm finite
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Complex standard normal entry, variance 1/2 per component.
pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re = standard_normal(rng);
    let im = standard_normal(rng);
    C64::new(re * s, im * s)
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Isometry with Haar-distributed columns (Gram-Schmidt of a Ginibre matrix).
pub fn haar_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    loop {
        let g = ginibre(rows, cols, rng);
        let cs: Vec<Vec<C64>> = (0..cols).map(|j| g.column(j)).collect();
        let q = orthonormalize(&cs, 1e-10);
        if q.len() == cols {
            return CMatrix::from_columns(rows, &q);
        }
    }
}

pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> CMatrix {
    haar_isometry(d, d, rng)
}

pub fn random_unitary(d: usize, seed: Seed) -> Result<CMatrix> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    Ok(haar_unitary(d, &mut seed.rng(0)))
}

/// Normalized `G G^dagger` for a `d x rank` Ginibre `G`.
pub fn density_from_rng(d: usize, rank: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(d, rank, rng);
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    m.scale(1.0 / t).hermitian_part()
}

pub fn random_density(d: usize, rank: usize, seed: Seed) -> Result<CMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::invalid(format!("rank {rank} outside 1..={d}")));
    }
    Ok(density_from_rng(d, rank, &mut seed.rng(0)))
}

pub fn random_ket(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| complex_normal(rng)).collect();
    let n = crate::linalg::vec_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Kraus operators sliced from a Haar isometry `C^{d_in} -> C^{n_kraus} (x) C^{d_out}`.
pub fn random_channel(d_in: usize, d_out: usize, n_kraus: usize, seed: Seed) -> Result<KrausChannel> {
    if d_in == 0 || d_out == 0 || n_kraus == 0 {
        return Err(Error::invalid("channel dimensions must be positive"));
    }
    if n_kraus * d_out < d_in {
        return Err(Error::invalid(format!(
            "{n_kraus} Kraus operators of size {d_out}x{d_in} cannot be trace preserving"
        )));
    }
    let v = haar_isometry(n_kraus * d_out, d_in, &mut seed.rng(0));
    let kraus = (0..n_kraus)
        .map(|mu| CMatrix::from_fn(d_out, d_in, |i, j| v[(mu * d_out + i, j)]))
        .collect();
    KrausChannel::new(kraus)
}

/// Weights at least [`MIN_BLOCK_WEIGHT`], the remainder split uniformly on the simplex.
pub fn sample_weights(n: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
    if n == 0 || n as f64 * MIN_BLOCK_WEIGHT >= 1.0 {
        return Err(Error::invalid(format!("cannot sample {n} weights of at least {MIN_BLOCK_WEIGHT}")));
    }
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    let free = 1.0 - n as f64 * MIN_BLOCK_WEIGHT;
    Ok(e.iter().map(|x| MIN_BLOCK_WEIGHT + free * x / s).collect())
}

fn check_weights(w: &[f64], n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::invalid(format!("{} weights for {n} blocks", w.len())));
    }
    if w.iter().any(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::invalid("block weights must be positive"));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("block weights sum to {s}")));
    }
    Ok(())
}

/// Standard-basis decomposition `(+)_k C^{l_k} (x) C^{r_k}` of a space of dimension `sum l_k r_k`.
pub fn standard_blocks(label: &str, dims: &[(usize, usize)]) -> Result<FactorDecomposition> {
    if dims.is_empty() || dims.iter().any(|&(l, r)| l == 0 || r == 0) {
        return Err(Error::invalid(format!("invalid block dims {dims:?}")));
    }
    let total: usize = dims.iter().map(|(l, r)| l * r).sum();
    let mut offset = 0;
    let blocks = dims
        .iter()
        .map(|&(l, r)| {
            let n = l * r;
            let iso = CMatrix::from_fn(total, n, |i, j| {
                if i == offset + j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            offset += n;
            FactorBlock {
                dim_l: l,
                dim_r: r,
                isometry: iso,
            }
        })
        .collect();
    Ok(FactorDecomposition {
        system_label: label.to_string(),
        blocks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovSpec {
    pub dim_a: usize,
    pub dim_c: usize,
    /// `(dim b^L_j, dim b^R_j)`
    pub blocks: Vec<(usize, usize)>,
    /// Sampled when absent.
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct PlantedMarkov {
    pub state: MultipartiteState,
    pub decomposition: FactorDecomposition,
    pub weights: Vec<f64>,
}

/// `(+)_j lambda_j rho_{A b^L_j} (x) rho_{b^R_j C}` with full-rank random block states.
pub fn planted_markov(spec: &MarkovSpec, seed: Seed) -> Result<PlantedMarkov> {
    if spec.dim_a == 0 || spec.dim_c == 0 {
        return Err(Error::invalid("dim_a and dim_c must be positive"));
    }
    let mut rng = seed.rng(1);
    let weights = match &spec.weights {
        Some(w) => w.clone(),
        None => sample_weights(spec.blocks.len(), &mut rng)?,
    };
    check_weights(&weights, spec.blocks.len())?;
    let fd = standard_blocks("B", &spec.blocks)?;
    let (da, dc) = (spec.dim_a, spec.dim_c);
    let db = fd.system_dim();
    let d = da * db * dc;
    let mut m = CMatrix::zeros(d, d);
    for (blk, w) in fd.blocks.iter().zip(&weights) {
        let left = density_from_rng(da * blk.dim_l, da * blk.dim_l, &mut rng);
        let right = density_from_rng(blk.dim_r * dc, blk.dim_r * dc, &mut rng);
        let emb = kron_all(&[&CMatrix::identity(da), &blk.isometry, &CMatrix::identity(dc)])?;
        m.axpy(C64::new(*w, 0.0), &emb.conjugate(&kron(&left, &right)?));
    }
    let state = MultipartiteState::with_labels(m.hermitian_part(), &[da, db, dc], &["A", "B", "C"])?;
    Ok(PlantedMarkov {
        state,
        decomposition: fd,
        weights,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Spec {
    /// `(dim a^L_i, dim a^R_i)`
    pub a_blocks: Vec<(usize, usize)>,
    /// `(dim c^L_j, dim c^R_j)`
    pub c_blocks: Vec<(usize, usize)>,
    pub dim_b: usize,
    /// Joint distribution `mu[i][j]`.
    pub mu: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct PlantedTheorem1 {
    pub state: MultipartiteState,
    pub a_decomposition: FactorDecomposition,
    pub c_decomposition: FactorDecomposition,
    pub mu: Vec<Vec<f64>>,
}

impl Theorem1Spec {
    /// Cells with positive weight.
    fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.mu.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                if w > 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// One positive cell per row and per column.
    pub fn is_matching(&self) -> bool {
        let s = self.support();
        let rows_ok = (0..self.a_blocks.len()).all(|i| s.iter().filter(|c| c.0 == i).count() == 1);
        let cols_ok = (0..self.c_blocks.len()).all(|j| s.iter().filter(|c| c.1 == j).count() == 1);
        rows_ok && cols_ok
    }

    /// Every `a^L` and `c^L` is one-dimensional.
    pub fn is_classical(&self) -> bool {
        self.a_blocks.iter().all(|b| b.0 == 1) && self.c_blocks.iter().all(|b| b.0 == 1)
    }

    fn validate(&self) -> Result<()> {
        if self.dim_b == 0 {
            return Err(Error::invalid("dim_b must be positive"));
        }
        if self.mu.len() != self.a_blocks.len() || self.mu.iter().any(|r| r.len() != self.c_blocks.len()) {
            return Err(Error::invalid("mu must be an |a_blocks| x |c_blocks| matrix"));
        }
        if self.mu.iter().flatten().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::invalid("mu entries must be nonnegative"));
        }
        let s: f64 = self.mu.iter().flatten().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("mu sums to {s}")));
        }
        if !(self.is_matching() || self.is_classical()) {
            return Err(Error::invalid(
                "mu must be supported on a matching, or all left factors one-dimensional; \
                 other joint distributions do not saturate the inequality",
            ));
        }
        Ok(())
    }
}

/// `sum_ij mu_ij psi_{a^L_i B c^L_j} (x) sigma_{a^R_i c^R_j}` with random pure `psi`
/// and full-rank `sigma`. In the classical case all cells share one pure B state.
pub fn planted_theorem1(spec: &Theorem1Spec, seed: Seed) -> Result<PlantedTheorem1> {
    spec.validate()?;
    let fa = standard_blocks("A", &spec.a_blocks)?;
    let fc = standard_blocks("C", &spec.c_blocks)?;
    let (da, db, dc) = (fa.system_dim(), spec.dim_b, fc.system_dim());
    let mut rng = seed.rng(2);
    let shared_b = random_ket(db, &mut rng);
    let classical = spec.is_classical() && !spec.is_matching();
    let d = da * db * dc;
    let mut m = CMatrix::zeros(d, d);
    for (i, j) in spec.support() {
        let (a, c) = (&fa.blocks[i], &fc.blocks[j]);
        let psi = if classical {
            shared_b.clone()
        } else {
            random_ket(a.dim_l * db * c.dim_l, &mut rng)
        };
        let n = a.dim_r * c.dim_r;
        let sigma = density_from_rng(n, n, &mut rng);
        let local = kron(&CMatrix::projector(&psi), &sigma)?;
        // (aL, B, cL, aR, cR) -> (aL, aR, B, cL, cR)
        let local = permute_subsystems(&local, &[a.dim_l, db, c.dim_l, a.dim_r, c.dim_r], &[0, 3, 1, 2, 4])?;
        let emb = kron_all(&[&a.isometry, &CMatrix::identity(db), &c.isometry])?;
        m.axpy(C64::new(spec.mu[i][j], 0.0), &emb.conjugate(&local));
    }
    let state = MultipartiteState::with_labels(m.hermitian_part(), &[da, db, dc], &["A", "B", "C"])?;
    Ok(PlantedTheorem1 {
        state,
        a_decomposition: fa,
        c_decomposition: fc,
        mu: spec.mu.clone(),
    })
}

#[derive(Clone, Debug)]
pub struct PlantedArakiLieb {
    pub state: MultipartiteState,
    pub omega_l: CMatrix,
    pub psi_rc: Vec<C64>,
}

/// `omega_L (x) |psi><psi|_RC` on `B = L (x) R` and C; `psi` has full Schmidt rank.
pub fn planted_araki_lieb(dim_l: usize, dim_r: usize, dim_c: usize, seed: Seed) -> Result<PlantedArakiLieb> {
    if dim_l == 0 || dim_r == 0 || dim_c == 0 {
        return Err(Error::invalid("dimensions must be positive"));
    }
    let mut rng = seed.rng(3);
    let omega_l = density_from_rng(dim_l, dim_l, &mut rng);
    let psi = random_ket(dim_r * dim_c, &mut rng);
    let m = kron(&omega_l, &CMatrix::projector(&psi))?;
    let state = MultipartiteState::with_labels(m.hermitian_part(), &[dim_l * dim_r, dim_c], &["B", "C"])?;
    Ok(PlantedArakiLieb {
        state,
        omega_l,
        psi_rc: psi,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiSsaSpec {
    /// `(dim a^L_i, dim a^R_i)`
    pub a_blocks: Vec<(usize, usize)>,
    /// `(dim b^L_j, dim b^R_j)`
    pub b_blocks: Vec<(usize, usize)>,
    pub dim_c: usize,
    /// Joint distribution `p[i][j]`.
    pub p: Vec<Vec<f64>>,
    /// Sector `k(i, j)`; only read where `p[i][j] > 0`.
    pub k: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct PlantedBiSsa {
    pub state: MultipartiteState,
    pub a_decomposition: FactorDecomposition,
    pub b_decomposition: FactorDecomposition,
    pub sector_count: usize,
}

impl BiSsaSpec {
    #[allow(clippy::needless_range_loop)]
    fn validate(&self) -> Result<usize> {
        let (na, nb) = (self.a_blocks.len(), self.b_blocks.len());
        if self.dim_c == 0 {
            return Err(Error::invalid("dim_c must be positive"));
        }
        let shape_ok = |m: usize, rows: usize| rows == na && m == nb;
        if !shape_ok(self.p.first().map_or(0, |r| r.len()), self.p.len())
            || self.p.iter().any(|r| r.len() != nb)
            || self.k.len() != na
            || self.k.iter().any(|r| r.len() != nb)
        {
            return Err(Error::invalid("p and k must be |a_blocks| x |b_blocks| matrices"));
        }
        if self.p.iter().flatten().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::invalid("p entries must be nonnegative"));
        }
        let s: f64 = self.p.iter().flatten().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("p sums to {s}")));
        }
        // k must be constant along every row and column of the support
        let mut row_k = vec![None; na];
        let mut col_k = vec![None; nb];
        for i in 0..na {
            for j in 0..nb {
                if self.p[i][j] <= 0.0 {
                    continue;
                }
                let k = self.k[i][j];
                for slot in [&mut row_k[i], &mut col_k[j]] {
                    match *slot {
                        Some(prev) if prev != k => {
                            return Err(Error::invalid(format!(
                                "sector map is not a function of i alone and of j alone at cell ({i}, {j})"
                            )))
                        }
                        _ => *slot = Some(k),
                    }
                }
            }
        }
        let mut used: Vec<usize> = (0..na)
            .flat_map(|i| (0..nb).map(move |j| (i, j)))
            .filter(|&(i, j)| self.p[i][j] > 0.0)
            .map(|(i, j)| self.k[i][j])
            .collect();
        used.sort_unstable();
        used.dedup();
        Ok(used.len())
    }
}

/// `(+)_ij p_ij rho_{a^L_i} (x) rho_{a^R_i b^L_j} (x) rho_{b^R_j} (x) rho_C^(k(i,j))`.
pub fn planted_bi_ssa(spec: &BiSsaSpec, seed: Seed) -> Result<PlantedBiSsa> {
    let sector_count = spec.validate()?;
    let fa = standard_blocks("A", &spec.a_blocks)?;
    let fb = standard_blocks("B", &spec.b_blocks)?;
    let (da, db, dc) = (fa.system_dim(), fb.system_dim(), spec.dim_c);
    let mut rng = seed.rng(4);
    let max_k = spec.k.iter().flatten().copied().max().unwrap_or(0);
    let rho_c: Vec<CMatrix> = (0..=max_k).map(|_| density_from_rng(dc, dc, &mut rng)).collect();
    let rho_al: Vec<CMatrix> = spec
        .a_blocks
        .iter()
        .map(|&(l, _)| density_from_rng(l, l, &mut rng))
        .collect();
    let rho_br: Vec<CMatrix> = spec
        .b_blocks
        .iter()
        .map(|&(_, r)| density_from_rng(r, r, &mut rng))
        .collect();
    let d = da * db * dc;
    let mut m = CMatrix::zeros(d, d);
    for (i, a) in fa.blocks.iter().enumerate() {
        for (j, b) in fb.blocks.iter().enumerate() {
            let p = spec.p[i][j];
            if p <= 0.0 {
                continue;
            }
            let n = a.dim_r * b.dim_l;
            let mid = density_from_rng(n, n, &mut rng);
            let local = kron_all(&[&rho_al[i], &mid, &rho_br[j], &rho_c[spec.k[i][j]]])?;
            let emb = kron_all(&[&a.isometry, &b.isometry, &CMatrix::identity(dc)])?;
            m.axpy(C64::new(p, 0.0), &emb.conjugate(&local));
        }
    }
    let state = MultipartiteState::with_labels(m.hermitian_part(), &[da, db, dc], &["A", "B", "C"])?;
    Ok(PlantedBiSsa {
        state,
        a_decomposition: fa,
        b_decomposition: fb,
        sector_count,
    })
}

/// Random classical [`Theorem1Spec`]: one-dimensional left factors, full joint
/// distribution. The recovered A and C structure is a single block here, since
/// the shared pure B state carries no sector information.
pub fn random_classical_theorem1_spec(rng: &mut impl Rng) -> Result<Theorem1Spec> {
    let dim_b = rng.gen_range(1..=2);
    let na = rng.gen_range(1..=2);
    let nc = rng.gen_range(1..=2);
    let a_blocks = (0..na).map(|_| (1, rng.gen_range(1..=2))).collect();
    let c_blocks = (0..nc).map(|_| (1, rng.gen_range(1..=2))).collect();
    let w = sample_weights(na * nc, rng)?;
    let mu = (0..na).map(|i| w[i * nc..(i + 1) * nc].to_vec()).collect();
    Ok(Theorem1Spec { a_blocks, c_blocks, dim_b, mu })
}

/// Random [`Theorem1Spec`] supported on a block matching with small factors.
pub fn random_theorem1_spec(rng: &mut impl Rng) -> Result<Theorem1Spec> {
    let dim_b = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=2);
    let mut a_blocks = Vec::new();
    let mut paired_c = Vec::new();
    for _ in 0..n {
        // left factors must fit inside B (x) the opposite left factor
        let al: usize = rng.gen_range(1..=2);
        let cl = if dim_b * al < 2 { 1 } else { rng.gen_range(1..=2) };
        a_blocks.push((al, rng.gen_range(1..=2)));
        paired_c.push((cl.max(al.div_ceil(dim_b)), rng.gen_range(1..=2)));
    }
    // A-block i pairs with C-block perm[i]
    let mut perm: Vec<usize> = (0..n).collect();
    if n == 2 && rng.gen::<bool>() {
        perm.swap(0, 1);
    }
    let mut c_blocks = paired_c.clone();
    let w = sample_weights(n, rng)?;
    let mut mu = vec![vec![0.0; n]; n];
    for i in 0..n {
        c_blocks[perm[i]] = paired_c[i];
        mu[i][perm[i]] = w[i];
    }
    Ok(Theorem1Spec { a_blocks, c_blocks, dim_b, mu })
}

/// Random [`MarkovSpec`] with up to three blocks and `dim_B <= 6`. A and C are
/// qubits; a trivial A or C makes the planted split of B non-canonical.
pub fn random_markov_spec(rng: &mut impl Rng) -> Result<MarkovSpec> {
    let n = rng.gen_range(1..=3);
    let mut blocks = Vec::new();
    let mut total = 0;
    for _ in 0..n {
        let b = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        if total + b.0 * b.1 > 6 {
            break;
        }
        total += b.0 * b.1;
        blocks.push(b);
    }
    Ok(MarkovSpec {
        dim_a: 2,
        dim_c: 2,
        blocks,
        weights: None,
    })
}

/// Conjugates by `U_1 (x) ... (x) U_n`, one unitary per listed label and identity elsewhere.
pub fn apply_local_unitaries(state: &MultipartiteState, unitaries: &[(&str, &CMatrix)]) -> Result<MultipartiteState> {
    let mut factors: Vec<CMatrix> = state.dims().iter().map(|&d| CMatrix::identity(d)).collect();
    for (label, u) in unitaries {
        let k = state.index_of(label)?;
        if u.rows() != state.dims()[k] || !u.is_square() {
            return Err(Error::dims(format!("unitary for {label} has the wrong size")));
        }
        factors[k] = (*u).clone();
    }
    let refs: Vec<&CMatrix> = factors.iter().collect();
    let u = kron_all(&refs)?;
    MultipartiteState::new(
        u.conjugate(state.matrix()).hermitian_part(),
        state.dims().to_vec(),
        state.labels().to_vec(),
    )
}

/// Hides planted structure behind Haar-random unitaries on the listed subsystems.
pub fn scramble_local(state: &MultipartiteState, labels: &[&str], seed: Seed) -> Result<MultipartiteState> {
    let mut rng = seed.rng(5);
    let mut us = Vec::new();
    for label in labels {
        let k = state.index_of(label)?;
        us.push((*label, haar_unitary(state.dims()[k], &mut rng)));
    }
    let pairs: Vec<(&str, &CMatrix)> = us.iter().map(|(l, u)| (*l, u)).collect();
    apply_local_unitaries(state, &pairs)
}

//! Fiducial pair reduction: per-germ structured search and per-germ-power
//! random thinning.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::FprPolicy;
use crate::error::{GstError, Result};
use crate::germs::{kite_structure, SelectionModel, IDEAL_DEGENERACY_TOL};
use crate::linalg::{self, RANK_TOL};
use crate::model::{effective_fiducial_effects, effective_fiducial_states, Circuit, GateSet};

/// Relative eigenvalue threshold used for one-qubit designs.
pub const EPS_ONE_QUBIT: f64 = 1.0 / 30.0;
/// Relative eigenvalue threshold used for two-qubit designs.
pub const EPS_TWO_QUBIT: f64 = 0.5;
/// Random candidate sets tried at each size before growing the size.
pub const DEFAULT_SAMPLES_PER_SIZE: usize = 100;

/// How a retention fraction becomes a pair count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeepRounding {
    /// `max(1, ⌊γn⌋)`.
    #[default]
    Floor,
    /// `max(1, ⌈γn⌉)`.
    Ceil,
}

/// Number of pairs kept out of `n` at retention fraction `gamma`.
pub fn keep_count(gamma: f64, n: usize, rounding: KeepRounding) -> Result<usize> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(GstError::InvalidArgument(format!("retention fraction {gamma} not in (0, 1]")));
    }
    // Guard against 0.125*36 = 4.499999… style round-off before rounding.
    let x = gamma * n as f64;
    let snapped = if (x - x.round()).abs() < 1e-9 { x.round() } else { x };
    let k = match rounding {
        KeepRounding::Floor => snapped.floor(),
        KeepRounding::Ceil => snapped.ceil(),
    } as usize;
    Ok(k.clamp(1, n.max(1)))
}

fn full_grid(n_prep: usize, n_meas: usize) -> Vec<(usize, usize)> {
    (0..n_prep).flat_map(|j| (0..n_meas).map(move |i| (j, i))).collect()
}

fn plaquette_rng(seed: u64, germ: usize, power: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((germ as u64) << 32) ^ power as u64);
    rng
}

/// Random pair subset for one (germ, power) plaquette, sorted prep-major.
///
/// Every plaquette draws from its own RNG stream, so a design truncated to a
/// smaller `L_max` sees exactly the same subsets.
pub fn random_pairs(
    n_prep: usize,
    n_meas: usize,
    germ: usize,
    power: usize,
    gamma: f64,
    seed: u64,
    rounding: KeepRounding,
) -> Result<Vec<(usize, usize)>> {
    let grid = full_grid(n_prep, n_meas);
    let k = keep_count(gamma, grid.len(), rounding)?;
    let mut rng = plaquette_rng(seed, germ, power);
    let mut idx = rand::seq::index::sample(&mut rng, grid.len(), k).into_vec();
    idx.sort_unstable();
    Ok(idx.into_iter().map(|i| grid[i]).collect())
}

/// Pair subsets of a random-FPR design, one entry per retained plaquette.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomPlaquettePairs {
    pub germ: usize,
    pub max_depth: usize,
    pub power: usize,
    pub pairs: Vec<(usize, usize)>,
}

/// Random pair sets for every plaquette `build_design` would emit.
pub fn random_fpr(
    n_prep: usize,
    n_meas: usize,
    germ_depths: &[usize],
    schedule: &crate::design::DepthSchedule,
    gamma: f64,
    seed: u64,
    rounding: KeepRounding,
) -> Result<Vec<RandomPlaquettePairs>> {
    let mut out = Vec::new();
    for (l, &max_depth) in schedule.depths().iter().enumerate() {
        for (k, &len) in germ_depths.iter().enumerate() {
            if len == 0 {
                return Err(GstError::Empty("germ"));
            }
            let power = max_depth / len;
            let prev = if l == 0 { 0 } else { schedule.depths()[l - 1] / len };
            if power == 0 || power == prev {
                continue;
            }
            let pairs = random_pairs(n_prep, n_meas, k, power, gamma, seed, rounding)?;
            out.push(RandomPlaquettePairs { germ: k, max_depth, power, pairs });
        }
    }
    Ok(out)
}

/// Rows of the kite-parameter Jacobian for every fiducial pair, indexed
/// prep-major: entry `(j·n_meas + i)` is the `m × n_kite` block for pair `(j, i)`.
fn pair_blocks(gs: &GateSet, germ: &Circuit, prep: &[Circuit], meas: &[Circuit], degeneracy_tol: f64) -> Result<Vec<DMatrix<f64>>> {
    if germ.is_empty() {
        return Err(GstError::Empty("germ"));
    }
    let dim = gs.dim();
    let m = gs.n_outcomes();
    let kite = kite_structure(&gs.circuit_superop(germ)?, degeneracy_tol)?;
    let basis = kite.real_commutant_basis();
    let states = effective_fiducial_states(gs, prep)?;
    let effects = effective_fiducial_effects(gs, meas)?;
    // B_q ρ'_j for every basis element, as dim × n_kite per prep fiducial.
    let applied: Vec<DMatrix<f64>> = states
        .iter()
        .map(|rho| {
            let mut out = DMatrix::zeros(dim, basis.ncols());
            for q in 0..basis.ncols() {
                let b = DMatrix::from_column_slice(dim, dim, basis.column(q).as_slice());
                out.set_column(q, &(b * &rho.0));
            }
            out
        })
        .collect();
    let mut blocks = Vec::with_capacity(prep.len() * meas.len());
    for a in &applied {
        for i in 0..meas.len() {
            let mut block = DMatrix::zeros(m, basis.ncols());
            for o in 0..m {
                block.set_row(o, &(effects[i * m + o].0.transpose() * a));
            }
            blocks.push(block);
        }
    }
    Ok(blocks)
}

fn stack(blocks: &[DMatrix<f64>], picks: &[usize]) -> DMatrix<f64> {
    let m = blocks[0].nrows();
    let mut out = DMatrix::zeros(picks.len() * m, blocks[0].ncols());
    for (r, &p) in picks.iter().enumerate() {
        out.rows_mut(r * m, m).copy_from(&blocks[p]);
    }
    out
}

/// Jacobian of `⟨⟨E'|g(θ_K)|ρ'⟩⟩` for the given `(prep, meas)` pairs with
/// respect to an orthonormal real basis of the germ's commutant. Rows are
/// pair-major, then outcome.
pub fn kite_param_jacobian(
    gs: &GateSet,
    germ: &Circuit,
    prep: &[Circuit],
    meas: &[Circuit],
    pairs: &[(usize, usize)],
) -> Result<DMatrix<f64>> {
    if pairs.is_empty() {
        return Err(GstError::Empty("fiducial pairs"));
    }
    if let Some(p) = pairs.iter().find(|p| p.0 >= prep.len() || p.1 >= meas.len()) {
        return Err(GstError::InvalidArgument(format!("fiducial pair {p:?} out of range")));
    }
    let blocks = pair_blocks(gs, germ, prep, meas, IDEAL_DEGENERACY_TOL)?;
    let picks: Vec<usize> = pairs.iter().map(|&(j, i)| j * meas.len() + i).collect();
    Ok(stack(&blocks, &picks))
}

/// Gram spectrum (squared singular values, descending).
fn gram_spectrum(j: &DMatrix<f64>) -> Vec<f64> {
    linalg::singular_values(j).into_iter().map(|s| s * s).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerGermFprConfig {
    /// Relative eigenvalue threshold `ε_λ`.
    pub eps: f64,
    pub samples_per_size: usize,
    pub seed: u64,
    /// Keep the best acceptable set among all samples at the first size that
    /// has one, rather than the first acceptable set drawn.
    pub keep_best: bool,
}

impl PerGermFprConfig {
    pub fn new(eps: f64, seed: u64) -> Self {
        PerGermFprConfig { eps, samples_per_size: DEFAULT_SAMPLES_PER_SIZE, seed, keep_best: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GermPairs {
    pub germ: Circuit,
    pub pairs: Vec<(usize, usize)>,
    /// Rank of the full-grid kite Jacobian.
    pub baseline_rank: usize,
    /// `λ_k(subset) / λ_k(full grid)` with `k` the baseline rank.
    pub ratio: f64,
    /// No smaller acceptable set was found; the full grid is returned.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerGermFprResult {
    pub eps: f64,
    pub germs: Vec<GermPairs>,
}

impl PerGermFprResult {
    pub fn policy(&self) -> FprPolicy {
        FprPolicy::PerGerm { pairs: self.germs.iter().map(|g| g.pairs.clone()).collect() }
    }

    pub fn total_pairs(&self) -> usize {
        self.germs.iter().map(|g| g.pairs.len()).sum()
    }
}

struct Baseline {
    blocks: Vec<DMatrix<f64>>,
    rank: usize,
    target: f64,
}

fn baseline(model: &SelectionModel, germ: &Circuit, prep: &[Circuit], meas: &[Circuit]) -> Result<Baseline> {
    let blocks = pair_blocks(&model.gateset, germ, prep, meas, model.degeneracy_tol)?;
    let all: Vec<usize> = (0..blocks.len()).collect();
    let full = gram_spectrum(&stack(&blocks, &all));
    let rank = linalg::count_above(&full.iter().map(|v| v.sqrt()).collect::<Vec<_>>(), RANK_TOL);
    let target = if rank > 0 { full[rank - 1] } else { 0.0 };
    Ok(Baseline { blocks, rank, target })
}

/// Smallest ratio `λ_k(subset) / λ_k(full)` over the models.
fn worst_ratio(bases: &[Baseline], picks: &[usize]) -> f64 {
    bases
        .iter()
        .map(|b| {
            let spec = gram_spectrum(&stack(&b.blocks, picks));
            spec.get(b.rank - 1).copied().unwrap_or(0.0) / b.target
        })
        .fold(f64::INFINITY, f64::min)
}

fn search_germ(
    models: &[SelectionModel],
    germ: &Circuit,
    prep: &[Circuit],
    meas: &[Circuit],
    cfg: &PerGermFprConfig,
    stream: u64,
) -> Result<GermPairs> {
    let bases = models.iter().map(|m| baseline(m, germ, prep, meas)).collect::<Result<Vec<_>>>()?;
    let n = prep.len() * meas.len();
    let m = models[0].gateset.n_outcomes();
    let grid: Vec<(usize, usize)> = (0..prep.len()).flat_map(|j| (0..meas.len()).map(move |i| (j, i))).collect();
    let k = bases.iter().map(|b| b.rank).max().unwrap_or(0);
    if bases.iter().any(|b| b.rank == 0) {
        return Ok(GermPairs { germ: germ.clone(), pairs: grid, baseline_rank: k, ratio: 1.0, fallback: true });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    if cfg.samples_per_size > 0 {
        for size in k.div_ceil(m).max(1)..n {
            let mut best: Option<(f64, Vec<usize>)> = None;
            for _ in 0..cfg.samples_per_size {
                let mut picks = rand::seq::index::sample(&mut rng, n, size).into_vec();
                picks.sort_unstable();
                let ratio = worst_ratio(&bases, &picks);
                if ratio >= cfg.eps && best.as_ref().is_none_or(|b| ratio > b.0) {
                    best = Some((ratio, picks));
                    if !cfg.keep_best {
                        break;
                    }
                }
            }
            if let Some((ratio, picks)) = best {
                return Ok(GermPairs {
                    germ: germ.clone(),
                    pairs: picks.into_iter().map(|p| grid[p]).collect(),
                    baseline_rank: k,
                    ratio,
                    fallback: false,
                });
            }
        }
    }
    Ok(GermPairs { germ: germ.clone(), pairs: grid, baseline_rank: k, ratio: 1.0, fallback: true })
}

/// Per-germ fiducial pair reduction: for each germ, the smallest randomly
/// found pair set whose kite Jacobian keeps its `k`-th Gram eigenvalue above
/// `ε_λ` times the full grid's, `k` being the full grid's rank.
pub fn per_germ_fpr(
    gs: &GateSet,
    prep: &[Circuit],
    meas: &[Circuit],
    germs: &[Circuit],
    cfg: &PerGermFprConfig,
) -> Result<PerGermFprResult> {
    per_germ_fpr_models(&[SelectionModel::ideal(gs.clone())], prep, meas, germs, cfg)
}

/// Per-germ fiducial pair reduction where a pair set is accepted only if the
/// eigenvalue test passes at every model (for example the target and the
/// perturbed copies a robust germ set was selected against).
pub fn per_germ_fpr_models(
    models: &[SelectionModel],
    prep: &[Circuit],
    meas: &[Circuit],
    germs: &[Circuit],
    cfg: &PerGermFprConfig,
) -> Result<PerGermFprResult> {
    if !(cfg.eps > 0.0 && cfg.eps <= 1.0) {
        return Err(GstError::InvalidArgument(format!("eps {} not in (0, 1]", cfg.eps)));
    }
    if models.is_empty() {
        return Err(GstError::Empty("models"));
    }
    if prep.is_empty() || meas.is_empty() {
        return Err(GstError::Empty("fiducials"));
    }
    let results = germs
        .par_iter()
        .enumerate()
        .map(|(k, g)| search_germ(models, g, prep, meas, cfg, k as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(PerGermFprResult { eps: cfg.eps, germs: results })
}

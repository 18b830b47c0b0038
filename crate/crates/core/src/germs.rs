//! Kite structures, commutant (twirl) projections and greedy germ selection.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::CMatrix;
use crate::error::{GstError, Result};
use crate::linalg::{self, RANK_TOL};
use crate::model::{gauge_tangent, Circuit, GateSet};
use crate::noise::{sample_noisy_gateset, NoiseSpec};

/// Hamiltonian-weight standard deviation of the perturbed selection models.
pub const GERM_PERTURBATION: f64 = 1e-3;
/// Number of perturbed copies used in robust mode.
pub const ROBUST_MODELS: usize = 5;
/// Pool depth for germ candidates.
pub const DEFAULT_MAX_GERM_LENGTH: usize = 6;

/// Relative degeneracy tolerance used at ideal (target) models.
pub const IDEAL_DEGENERACY_TOL: f64 = 1e-7;
/// Relative degeneracy tolerance used at perturbed models.
pub const PERTURBED_DEGENERACY_TOL: f64 = 1e-10;
/// Eigenbases with a larger condition number are rejected.
pub const MAX_BASIS_CONDITION: f64 = 1e10;

/// Block-diagonal description of a superoperator's commutant in its
/// generalized eigenbasis.
#[derive(Clone, Debug)]
pub struct KiteStructure {
    /// Unique eigenvalues with their algebraic multiplicities, in block order.
    pub eigenvalues: Vec<(C64, usize)>,
    /// `(start, size)` of each block.
    pub blocks: Vec<(usize, usize)>,
    /// Columns are generalized eigenvectors.
    pub basis: CMatrix,
    basis_inv: CMatrix,
    block_of: Vec<usize>,
}

impl KiteStructure {
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Σ size², the number of coordinates inside the kite.
    pub fn param_count(&self) -> usize {
        self.blocks.iter().map(|&(_, s)| s * s).sum()
    }

    fn in_kite(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    /// Project onto the commutant: change to the kite basis, zero everything
    /// outside the blocks, change back.
    pub fn project(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let xc = x.map(|v| C64::new(v, 0.0));
        let mut inner = &self.basis_inv * xc * &self.basis;
        let n = self.dim();
        for a in 0..n {
            for b in 0..n {
                if !self.in_kite(a, b) {
                    inner[(a, b)] = C64::new(0.0, 0.0);
                }
            }
        }
        (&self.basis * inner * &self.basis_inv).map(|v| v.re)
    }

    /// The projection as a `dim² × dim²` matrix acting on column-major `vec(X)`.
    pub fn projector(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut p = DMatrix::zeros(n * n, n * n);
        let mut e = DMatrix::zeros(n, n);
        for col in 0..n * n {
            let (r, c) = (col % n, col / n);
            e[(r, c)] = 1.0;
            let img = self.project(&e);
            e[(r, c)] = 0.0;
            p.set_column(col, &nalgebra::DVector::from_column_slice(img.as_slice()));
        }
        p
    }

    /// Orthonormal real basis of the commutant, as columns of vectorized matrices.
    pub fn real_commutant_basis(&self) -> DMatrix<f64> {
        linalg::column_space(&self.projector())
    }
}

fn cluster_eigenvalues(eigs: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for &e in eigs {
        match clusters.iter_mut().find(|(c, _)| (e - *c).norm() <= tol * c.norm().max(1.0)) {
            Some((c, k)) => {
                *c = (*c * (*k as f64) + e) / (*k as f64 + 1.0);
                *k += 1;
            }
            None => clusters.push((e, 1)),
        }
    }
    clusters.sort_by(|a, b| b.0.re.total_cmp(&a.0.re).then(b.0.im.total_cmp(&a.0.im)));
    clusters
}

fn complex_condition(m: &CMatrix) -> f64 {
    let s = m.clone().svd(false, false).singular_values;
    let hi = s.iter().copied().fold(0.0, f64::max);
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

fn build_kite(op: &DMatrix<f64>, clusters: &[(C64, usize)]) -> Result<KiteStructure> {
    let n = op.nrows();
    let opc = op.map(|v| C64::new(v, 0.0));
    let mut cols = Vec::with_capacity(n);
    let mut blocks = Vec::with_capacity(clusters.len());
    let mut block_of = Vec::with_capacity(n);
    for (bi, &(lambda, mult)) in clusters.iter().enumerate() {
        let shifted = &opc - CMatrix::identity(n, n) * lambda;
        let mut power = shifted.clone();
        for _ in 1..mult {
            power = &power * &shifted;
        }
        let svd = power.svd(false, true);
        let v_t = svd.v_t.ok_or_else(|| GstError::Eigensolver("SVD failed".into()))?;
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        blocks.push((cols.len(), mult));
        for &i in order.iter().take(mult) {
            cols.push(v_t.row(i).adjoint().into_owned());
            block_of.push(bi);
        }
    }
    let basis = CMatrix::from_columns(&cols);
    let cond = complex_condition(&basis);
    if !(cond <= MAX_BASIS_CONDITION) {
        return Err(GstError::IllConditionedBasis(cond));
    }
    let basis_inv = basis.clone().try_inverse().ok_or(GstError::IllConditionedBasis(cond))?;
    Ok(KiteStructure { eigenvalues: clusters.to_vec(), blocks, basis, basis_inv, block_of })
}

/// Kite structure of `op` with eigenvalues clustered at relative `degeneracy_tol`.
///
/// If the generalized eigenbasis comes out ill-conditioned (a defective
/// matrix whose eigenvalues were split by round-off) the clustering tolerance
/// is widened until the basis is usable.
pub fn kite_structure(op: &DMatrix<f64>, degeneracy_tol: f64) -> Result<KiteStructure> {
    if op.nrows() != op.ncols() {
        return Err(GstError::DimensionMismatch { expected: op.nrows(), found: op.ncols() });
    }
    if op.iter().any(|v| !v.is_finite()) {
        return Err(GstError::Eigensolver("non-finite entries".into()));
    }
    let schur = Schur::try_new(op.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| GstError::Eigensolver("Schur iteration did not converge".into()))?;
    let eigs: Vec<C64> = schur.complex_eigenvalues().iter().copied().collect();
    let mut tol = degeneracy_tol;
    loop {
        let clusters = cluster_eigenvalues(&eigs, tol);
        match build_kite(op, &clusters) {
            Err(GstError::IllConditionedBasis(_)) if tol < 1e-4 => tol *= 100.0,
            other => return other,
        }
    }
}

/// Project a derivative slice onto the germ's commutant.
pub fn twirl_project(slice: &DMatrix<f64>, kite: &KiteStructure) -> Result<DMatrix<f64>> {
    if slice.nrows() != kite.dim() || slice.ncols() != kite.dim() {
        return Err(GstError::DimensionMismatch { expected: kite.dim(), found: slice.nrows() });
    }
    Ok(kite.project(slice))
}

/// Finite-`p` group average `(1/p) Σ_{i<p} Gⁱ D G⁻ⁱ`.
pub fn finite_twirl(op: &DMatrix<f64>, slice: &DMatrix<f64>, p: usize) -> Result<DMatrix<f64>> {
    let inv = op.clone().try_inverse().ok_or_else(|| GstError::InvalidArgument("germ is singular".into()))?;
    let mut acc = DMatrix::zeros(op.nrows(), op.ncols());
    let mut term = slice.clone();
    for _ in 0..p {
        acc += &term;
        term = op * term * &inv;
    }
    Ok(acc / p as f64)
}

/// `dim² × n_gate_params` matrix of column-major vectorized `∂τ(g)/∂θ` for gate parameters.
pub fn germ_derivative(gs: &GateSet, idx: &[usize]) -> DMatrix<f64> {
    let dim = gs.dim();
    let pm = gs.param_map();
    let n = idx.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(DMatrix::<f64>::identity(dim, dim));
    for (t, &k) in idx.iter().enumerate() {
        let next = gs.gate_at(k).matrix() * &prefix[t];
        prefix.push(next);
    }
    let mut suffix = vec![DMatrix::zeros(0, 0); n];
    let mut acc = DMatrix::<f64>::identity(dim, dim);
    for t in (0..n).rev() {
        suffix[t] = acc.clone();
        acc = &acc * gs.gate_at(idx[t]).matrix();
    }
    let mut out = DMatrix::zeros(dim * dim, pm.n_gate_params());
    for t in 0..n {
        let (suf, pre) = (&suffix[t], &prefix[t]);
        for r in 1..dim {
            for c in 0..dim {
                let col = pm.gate_index(idx[t], r, c);
                let mut column = out.column_mut(col);
                for b in 0..dim {
                    let pv = pre[(c, b)];
                    if pv == 0.0 {
                        continue;
                    }
                    for a in 0..dim {
                        column[a + b * dim] += suf[(a, r)] * pv;
                    }
                }
            }
        }
    }
    out
}

/// Matricized twirled Jacobian `∇_k^∞` of one germ.
#[derive(Clone, Debug)]
pub struct TwirledJacobian {
    /// `d⁴ × N_p`; SPAM columns are zero.
    pub matrix: DMatrix<f64>,
    pub germ: usize,
}

pub fn twirled_jacobian(gs: &GateSet, germ: &Circuit, germ_index: usize, degeneracy_tol: f64) -> Result<TwirledJacobian> {
    let gate_part = twirled_gate_jacobian(gs, germ, degeneracy_tol)?;
    let mut matrix = DMatrix::zeros(gate_part.nrows(), gs.n_params());
    matrix.columns_mut(0, gate_part.ncols()).copy_from(&gate_part);
    Ok(TwirledJacobian { matrix, germ: germ_index })
}

/// Twirled Jacobian restricted to gate-parameter columns.
fn twirled_gate_jacobian(gs: &GateSet, germ: &Circuit, degeneracy_tol: f64) -> Result<DMatrix<f64>> {
    if germ.is_empty() {
        return Err(GstError::Empty("germ"));
    }
    let idx = gs.resolve(germ)?;
    let kite = kite_structure(&gs.product(&idx), degeneracy_tol)?;
    Ok(kite.projector() * germ_derivative(gs, &idx))
}

/// Per model, the vertically stacked twirled Jacobians of every germ.
pub fn germset_jacobian(models: &[SelectionModel], germs: &[Circuit]) -> Result<Vec<DMatrix<f64>>> {
    models
        .iter()
        .map(|m| {
            let blocks = germs
                .iter()
                .enumerate()
                .map(|(i, g)| twirled_jacobian(&m.gateset, g, i, m.degeneracy_tol).map(|j| j.matrix))
                .collect::<Result<Vec<_>>>()?;
            Ok(stack_rows(&blocks, m.gateset.n_params()))
        })
        .collect()
}

fn stack_rows(blocks: &[DMatrix<f64>], ncols: usize) -> DMatrix<f64> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, ncols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), ncols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Number of gate parameters that a germ set can amplify: gate parameters
/// minus the rank of the gauge tangent restricted to gate coordinates.
pub fn amplifiable_count(model: &GateSet) -> usize {
    let n_gate = model.param_map().n_gate_params();
    let tangent = gauge_tangent(model);
    let gate_rows = tangent.basis.rows(0, n_gate).into_owned();
    n_gate - linalg::rank(&gate_rows)
}

/// A model used for germ selection, with the degeneracy tolerance its kite
/// structures are computed at.
#[derive(Clone, Debug)]
pub struct SelectionModel {
    pub gateset: GateSet,
    pub degeneracy_tol: f64,
}

impl SelectionModel {
    pub fn ideal(gateset: GateSet) -> Self {
        SelectionModel { gateset, degeneracy_tol: IDEAL_DEGENERACY_TOL }
    }

    pub fn perturbed(gateset: GateSet) -> Self {
        SelectionModel { gateset, degeneracy_tol: PERTURBED_DEGENERACY_TOL }
    }
}

/// Which germ-set flavour to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GermMode {
    /// Target plus unitarily perturbed copies.
    Robust,
    /// Target only.
    Standard,
    /// One germ per gate, no selection.
    Bare,
}

/// How a stacked Jacobian's spectrum is turned into a score (lower is better).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GermScoreKind {
    /// Sum of inverse eigenvalues of `JᵀJ` over the amplified directions.
    All,
    /// Largest inverse eigenvalue (inverse of the smallest amplified eigenvalue).
    Worst,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GermSelectConfig {
    pub score: GermScoreKind,
    /// Added per gate operation in the germ set.
    pub length_penalty: f64,
    /// Added per germ in the germ set.
    pub count_penalty: f64,
}

impl Default for GermSelectConfig {
    fn default() -> Self {
        GermSelectConfig { score: GermScoreKind::All, length_penalty: 0.0, count_penalty: 0.0 }
    }
}

/// Composite score: first the amplification deficit, then the spectral score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositeScore {
    pub deficit: usize,
    pub amplified: usize,
    pub value: f64,
}

impl CompositeScore {
    fn worse_than(&self, other: &CompositeScore) -> bool {
        (self.deficit, self.value) > (other.deficit, other.value)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelectionStep {
    pub added: Circuit,
    pub worst: CompositeScore,
    pub per_model_amplified: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GermSelection {
    pub germs: Vec<Circuit>,
    pub targets: Vec<usize>,
    pub per_model_amplified: Vec<usize>,
    pub trajectory: Vec<SelectionStep>,
}

fn score_spectrum(sv_desc: &[f64], target: usize, cfg: &GermSelectConfig, germs: &[&Circuit]) -> CompositeScore {
    let amplified = linalg::count_above(sv_desc, RANK_TOL);
    let inv = sv_desc[..amplified].iter().map(|s| 1.0 / (s * s));
    let mut value = match cfg.score {
        GermScoreKind::All => inv.sum(),
        GermScoreKind::Worst => inv.fold(0.0, f64::max),
    };
    value += cfg.length_penalty * germs.iter().map(|g| g.depth()).sum::<usize>() as f64;
    value += cfg.count_penalty * germs.len() as f64;
    CompositeScore { deficit: target.saturating_sub(amplified), amplified, value }
}

/// Triangular compression of stacked rows: same singular values, at most
/// `ncols` rows.
fn compress(rows: &DMatrix<f64>) -> DMatrix<f64> {
    if rows.nrows() <= rows.ncols() {
        return rows.clone();
    }
    rows.clone().qr().r()
}

fn stack2(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    stack_rows(&[a.clone(), b.clone()], a.ncols().max(b.ncols()))
}

/// Greedy germ selection: every iteration tries the current set plus each
/// remaining candidate, scores each test set by its worst model, and keeps the
/// best test set. Stops once every model reaches its amplifiable target.
pub fn select_germs(models: &[SelectionModel], candidates: &[Circuit], cfg: &GermSelectConfig) -> Result<GermSelection> {
    if models.is_empty() {
        return Err(GstError::Empty("models"));
    }
    if candidates.is_empty() {
        return Err(GstError::Empty("candidate germs"));
    }
    let targets: Vec<usize> = models.iter().map(|m| amplifiable_count(&m.gateset)).collect();
    let n_gate = models[0].gateset.param_map().n_gate_params();

    // Per model, per candidate twirled Jacobians over gate parameters.
    let jacs: Vec<Vec<DMatrix<f64>>> = models
        .iter()
        .map(|m| {
            candidates
                .par_iter()
                .map(|g| {
                    // Per unit of circuit depth: a germ of length n is repeated L/n times.
                    twirled_gate_jacobian(&m.gateset, g, m.degeneracy_tol).map(|j| compress(&(j / g.depth() as f64)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    // Pre-test the whole pool.
    for (mi, per_cand) in jacs.iter().enumerate() {
        let all = compress(&stack_rows(per_cand, n_gate));
        let amp = linalg::count_above(&linalg::singular_values(&all), RANK_TOL);
        if amp < targets[mi] {
            return Err(GstError::NotAmplificationallyComplete { achieved: amp, required: targets[mi] });
        }
    }

    let mut chosen: Vec<usize> = Vec::new();
    let mut current: Vec<DMatrix<f64>> = vec![DMatrix::zeros(0, n_gate); models.len()];
    let mut trajectory = Vec::new();
    let mut per_model_amplified = vec![0; models.len()];

    loop {
        let done = per_model_amplified.iter().zip(&targets).all(|(a, t)| a >= t);
        if done || chosen.len() == candidates.len() {
            break;
        }
        let remaining: Vec<usize> = (0..candidates.len()).filter(|c| !chosen.contains(c)).collect();
        let evaluated: Vec<(usize, CompositeScore, Vec<usize>)> = remaining
            .par_iter()
            .map(|&cand| {
                let mut germs: Vec<&Circuit> = chosen.iter().map(|&i| &candidates[i]).collect();
                germs.push(&candidates[cand]);
                let mut worst: Option<CompositeScore> = None;
                let mut amps = Vec::with_capacity(models.len());
                for mi in 0..models.len() {
                    let stacked = stack2(&current[mi], &jacs[mi][cand]);
                    let s = score_spectrum(&linalg::singular_values(&stacked), targets[mi], cfg, &germs);
                    amps.push(s.amplified);
                    if worst.is_none_or(|w| s.worse_than(&w)) {
                        worst = Some(s);
                    }
                }
                (cand, worst.unwrap(), amps)
            })
            .collect();
        let best = evaluated
            .iter()
            .fold(None::<&(usize, CompositeScore, Vec<usize>)>, |acc, e| match acc {
                Some(a) if !a.1.worse_than(&e.1) => Some(a),
                _ => Some(e),
            })
            .expect("at least one remaining candidate");
        let (cand, worst, amps) = best.clone();
        chosen.push(cand);
        for mi in 0..models.len() {
            current[mi] = compress(&stack2(&current[mi], &jacs[mi][cand]));
        }
        per_model_amplified = amps.clone();
        trajectory.push(SelectionStep { added: candidates[cand].clone(), worst, per_model_amplified: amps });
    }

    if per_model_amplified.iter().zip(&targets).any(|(a, t)| a < t) {
        let worst = per_model_amplified.iter().zip(&targets).min_by_key(|(a, t)| (**a as i64) - (**t as i64)).unwrap();
        return Err(GstError::NotAmplificationallyComplete { achieved: *worst.0, required: *worst.1 });
    }
    Ok(GermSelection {
        germs: chosen.iter().map(|&i| candidates[i].clone()).collect(),
        targets,
        per_model_amplified,
        trajectory,
    })
}

/// The models a germ mode selects against: the target, plus `n_perturbed`
/// seeded unitary perturbations of it in robust mode.
pub fn selection_models(target: &GateSet, mode: GermMode, n_perturbed: usize, sigma: f64, seed: u64) -> Result<Vec<SelectionModel>> {
    let mut models = vec![SelectionModel::ideal(target.clone())];
    if mode == GermMode::Robust {
        for s in 0..n_perturbed as u64 {
            let spec = NoiseSpec::coherent(sigma, seed.wrapping_add(s));
            models.push(SelectionModel::perturbed(sample_noisy_gateset(target, &spec)?));
        }
    }
    Ok(models)
}

/// Germs for `mode`: bare returns one germ per gate; robust and standard run
/// [`select_germs`] over Lyndon-word candidates up to `max_len`, with
/// [`ROBUST_MODELS`] perturbed copies seeded from `seed` in robust mode.
pub fn germs_for_mode(target: &GateSet, mode: GermMode, max_len: usize, seed: u64, cfg: &GermSelectConfig) -> Result<GermSelection> {
    if mode == GermMode::Bare {
        let germs = crate::stdsets::bare_germs(target);
        let models = [SelectionModel::ideal(target.clone())];
        let j = germset_jacobian(&models, &germs)?;
        let amplified = linalg::rank(&j[0]);
        return Ok(GermSelection {
            germs,
            targets: vec![amplifiable_count(target)],
            per_model_amplified: vec![amplified],
            trajectory: Vec::new(),
        });
    }
    let models = selection_models(target, mode, ROBUST_MODELS, GERM_PERTURBATION, seed)?;
    select_germs(&models, &germ_candidates(target.labels(), max_len), cfg)
}

/// All gate sequences up to `max_len` that are neither powers of a shorter
/// sequence nor cyclic rotations of an earlier one (Lyndon words), ordered by
/// length and then by gate order.
pub fn germ_candidates(labels: &[String], max_len: usize) -> Vec<Circuit> {
    let k = labels.len();
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    for len in 1..=max_len {
        // Duval's algorithm restricted to words of exactly `len`.
        let mut w: Vec<usize> = vec![0];
        loop {
            if w.len() == len {
                out.push(Circuit::new(w.iter().map(|&i| labels[i].as_str())));
            }
            let m = w.len();
            while w.len() < len {
                let c = w[w.len() - m];
                w.push(c);
            }
            while let Some(&last) = w.last() {
                if last == k - 1 {
                    w.pop();
                } else {
                    break;
                }
            }
            match w.last_mut() {
                Some(v) => *v += 1,
                None => break,
            }
        }
    }
    out
}

//! Fiducial selection by Gram-matrix spectrum.
//!
//! A prep set must span all `d²` operator directions. The effects of one
//! measurement always sum to the trace covector, so a measurement set is
//! scored on the traceless part of its effective effects (every outcome of
//! every fiducial), which must span the remaining `d² − 1` directions.

use std::cmp::Ordering;
use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::qubit_support;
use crate::error::{GstError, Result};
use crate::linalg::{self, RANK_TOL};
use crate::model::{effective_fiducial_effects, effective_fiducial_states, Circuit, GateSet};

/// Relative tolerance under which two scores count as tied.
const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiducialKind {
    Prep,
    Meas,
}

impl FiducialKind {
    /// Gram rank a set must reach on a `dim = d²` system.
    pub fn required_rank(self, dim: usize) -> usize {
        match self {
            FiducialKind::Prep => dim,
            FiducialKind::Meas => dim - 1,
        }
    }
}

/// Hilbert–Schmidt inner products `⟨⟨a_i|a_j⟩⟩`.
pub fn gram_matrix(vectors: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    let first = vectors.first().ok_or(GstError::Empty("vectors"))?;
    for v in vectors {
        if v.len() != first.len() {
            return Err(GstError::DimensionMismatch { expected: first.len(), found: v.len() });
        }
    }
    let n = vectors.len();
    Ok(DMatrix::from_fn(n, n, |i, j| vectors[i].dot(&vectors[j])))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiducialScore {
    pub rank: usize,
    pub required: usize,
    /// Eigenvalue at the required rank, or `-inf` when the rank is not met.
    pub score: f64,
    /// Gram eigenvalues, descending.
    pub spectrum: Vec<f64>,
}

impl FiducialScore {
    pub fn is_complete(&self) -> bool {
        self.rank >= self.required
    }

    fn from_vectors(vectors: &[DVector<f64>], required: usize) -> Result<Self> {
        let mut spectrum = linalg::sym_eigenvalues(&gram_matrix(vectors)?);
        spectrum.reverse();
        let stacked = DMatrix::from_columns(vectors);
        let rank = linalg::count_above(&linalg::singular_values(&stacked), RANK_TOL);
        let score = if rank >= required { spectrum[required - 1] } else { f64::NEG_INFINITY };
        Ok(FiducialScore { rank, required, score, spectrum })
    }

    /// Greedy key: the rank reached so far (capped at the requirement) and the
    /// eigenvalue at that rank.
    fn key(&self) -> (usize, f64) {
        let r = self.rank.min(self.required);
        (r, if r == 0 { 0.0 } else { self.spectrum[r - 1] })
    }
}

fn frame_vectors(gs: &GateSet, fids: &[Circuit], kind: FiducialKind) -> Result<Vec<DVector<f64>>> {
    Ok(match kind {
        FiducialKind::Prep => effective_fiducial_states(gs, fids)?.into_iter().map(|s| s.0).collect(),
        FiducialKind::Meas => effective_fiducial_effects(gs, fids)?
            .into_iter()
            .map(|e| e.0.rows(1, e.0.len() - 1).into_owned())
            .collect(),
    })
}

pub fn fiducial_score(gs: &GateSet, fids: &[Circuit], kind: FiducialKind) -> Result<FiducialScore> {
    if fids.is_empty() {
        return Err(GstError::Empty("fiducials"));
    }
    FiducialScore::from_vectors(&frame_vectors(gs, fids, kind)?, kind.required_rank(gs.dim()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiducialSelection {
    pub kind: FiducialKind,
    pub fiducials: Vec<Circuit>,
    pub score: FiducialScore,
}

/// Greedy add-one selection. Each step adds the candidate with the best
/// (rank, eigenvalue-at-rank) key; ties go to fewer gate operations, then to
/// label order. Stops at `size` fiducials, or once the rank requirement is met
/// when `size` is `None`.
pub fn select_fiducials(gs: &GateSet, pool: &[Circuit], kind: FiducialKind, size: Option<usize>) -> Result<FiducialSelection> {
    if pool.is_empty() {
        return Err(GstError::Empty("fiducial pool"));
    }
    let whole = fiducial_score(gs, pool, kind)?;
    if !whole.is_complete() {
        return Err(GstError::NotInformationallyComplete { achieved: whole.rank, required: whole.required });
    }
    if let Some(n) = size {
        if n == 0 || n > pool.len() {
            return Err(GstError::InvalidArgument(format!("fiducial count {n} outside 1..={}", pool.len())));
        }
    }
    let required = whole.required;
    let per_candidate: Vec<Vec<DVector<f64>>> = pool
        .iter()
        .map(|c| frame_vectors(gs, std::slice::from_ref(c), kind))
        .collect::<Result<_>>()?;

    let mut chosen: Vec<usize> = Vec::new();
    let mut vectors: Vec<DVector<f64>> = Vec::new();
    let mut current: Option<FiducialScore> = None;
    loop {
        let done = match (size, &current) {
            (Some(n), _) => chosen.len() == n,
            (None, Some(s)) => s.is_complete(),
            (None, None) => false,
        };
        if done {
            break;
        }
        let scored: Vec<(usize, FiducialScore)> = (0..pool.len())
            .into_par_iter()
            .filter(|i| !chosen.contains(i))
            .map(|i| {
                let mut test = vectors.clone();
                test.extend(per_candidate[i].iter().cloned());
                FiducialScore::from_vectors(&test, required).map(|s| (i, s))
            })
            .collect::<Result<_>>()?;
        let best = scored
            .into_iter()
            .reduce(|a, b| if better(&pool[b.0], &b.1, &pool[a.0], &a.1) { b } else { a })
            .expect("pool larger than selection");
        vectors.extend(per_candidate[best.0].iter().cloned());
        chosen.push(best.0);
        current = Some(best.1);
    }
    Ok(FiducialSelection {
        kind,
        fiducials: chosen.iter().map(|&i| pool[i].clone()).collect(),
        score: current.expect("at least one step"),
    })
}

fn better(c: &Circuit, s: &FiducialScore, c0: &Circuit, s0: &FiducialScore) -> bool {
    let (r, v) = s.key();
    let (r0, v0) = s0.key();
    if r != r0 {
        return r > r0;
    }
    if (v - v0).abs() > TIE_TOL * v.abs().max(v0.abs()) {
        return v > v0;
    }
    match c.depth().cmp(&c0.depth()) {
        Ordering::Equal => c < c0,
        o => o == Ordering::Less,
    }
}

/// Every gate sequence of depth at most `max_depth`, empty circuit first,
/// then by depth and label order.
pub fn all_sequences(labels: &[String], max_depth: usize) -> Vec<Circuit> {
    let mut out = vec![Circuit::empty()];
    let mut layer = vec![Vec::<String>::new()];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for w in &layer {
            for l in labels {
                let mut v = w.clone();
                v.push(l.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned().map(Circuit::from));
        layer = next;
    }
    out
}

/// Default candidate pool. One qubit: all sequences up to depth 3. More
/// qubits: products (in qubit order) of per-qubit sequences up to depth 2 over
/// the gates acting on that qubit alone.
pub fn fiducial_candidates(gs: &GateSet) -> Vec<Circuit> {
    let n_qubits = crate::basis::qubits_for_superop_dim(gs.dim()).unwrap_or(1);
    if n_qubits <= 1 {
        return all_sequences(gs.labels(), 3);
    }
    let per_qubit: Vec<Vec<Circuit>> = (0..n_qubits)
        .map(|q| {
            let local: Vec<String> = gs
                .labels()
                .iter()
                .filter(|l| qubit_support(gs.gate(l).expect("own label").matrix(), 1e-9) == vec![q])
                .cloned()
                .collect();
            all_sequences(&local, 2)
        })
        .collect();
    product_candidates(&per_qubit)
}

/// Concatenations taking one circuit from each per-qubit pool, deduplicated.
pub fn product_candidates(per_qubit: &[Vec<Circuit>]) -> Vec<Circuit> {
    let mut acc = vec![Circuit::empty()];
    for pool in per_qubit {
        acc = acc.iter().flat_map(|a| pool.iter().map(move |b| a.concat(b))).collect();
    }
    let mut seen = HashSet::new();
    acc.retain(|c| seen.insert(c.clone()));
    acc
}

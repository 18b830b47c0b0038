use std::collections::HashMap;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::superop::{EffectVec, StateVec, SuperOp};
use crate::error::{GstError, Result};

const COMPLETENESS_TOL: f64 = 1e-9;

/// Which operation a parameter belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpRef {
    Gate(usize),
    Prep,
    /// Free (non-complement) effect `j`.
    Effect(usize),
}

/// Coordinate addressed by one entry of the parameter vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamCoord {
    pub op: OpRef,
    /// Row of a gate matrix, or the vector index for SPAM.
    pub row: usize,
    /// Column of a gate matrix; zero for SPAM.
    pub col: usize,
}

/// Bijection between parameter indices and the free coordinates of a
/// trace-preserving gate set.
///
/// Gate first rows, the first prep entry and the final (complement) effect are
/// fixed and never appear here.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterMap {
    coords: Vec<ParamCoord>,
    dim: usize,
    n_gates: usize,
    n_free_effects: usize,
}

impl ParameterMap {
    pub fn new(dim: usize, n_gates: usize, n_effects: usize) -> Self {
        let mut coords = Vec::new();
        for k in 0..n_gates {
            for row in 1..dim {
                for col in 0..dim {
                    coords.push(ParamCoord { op: OpRef::Gate(k), row, col });
                }
            }
        }
        for row in 1..dim {
            coords.push(ParamCoord { op: OpRef::Prep, row, col: 0 });
        }
        for j in 0..n_effects.saturating_sub(1) {
            for row in 0..dim {
                coords.push(ParamCoord { op: OpRef::Effect(j), row, col: 0 });
            }
        }
        ParameterMap { coords, dim, n_gates, n_free_effects: n_effects.saturating_sub(1) }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[ParamCoord] {
        &self.coords
    }

    pub fn per_gate(&self) -> usize {
        self.dim * (self.dim - 1)
    }

    pub fn n_gate_params(&self) -> usize {
        self.n_gates * self.per_gate()
    }

    pub fn gate_block(&self, k: usize) -> Range<usize> {
        let s = k * self.per_gate();
        s..s + self.per_gate()
    }

    /// Parameter index of gate `k`'s entry `(row, col)`; `row` must be ≥ 1.
    pub fn gate_index(&self, k: usize, row: usize, col: usize) -> usize {
        debug_assert!(row >= 1);
        k * self.per_gate() + (row - 1) * self.dim + col
    }

    pub fn prep_block(&self) -> Range<usize> {
        let s = self.n_gate_params();
        s..s + self.dim - 1
    }

    pub fn effect_block(&self, j: usize) -> Range<usize> {
        let s = self.prep_block().end + j * self.dim;
        s..s + self.dim
    }

    /// All measurement parameters (every free effect).
    pub fn meas_block(&self) -> Range<usize> {
        let s = self.prep_block().end;
        s..s + self.n_free_effects * self.dim
    }

    pub fn spam_block(&self) -> Range<usize> {
        self.n_gate_params()..self.len()
    }
}

/// A gate set: gates as Pauli transfer matrices, one native prep and one native
/// measurement, with a TP-constrained full parameterization.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSet {
    labels: Vec<String>,
    gates: Vec<SuperOp>,
    index: HashMap<String, usize>,
    prep: StateVec,
    effects: Vec<EffectVec>,
    /// The covector all effects sum to (the trace covector unless gauge-transformed).
    completeness: DVector<f64>,
    params: ParameterMap,
}

impl GateSet {
    pub fn new(gates: Vec<(String, DMatrix<f64>)>, prep: DVector<f64>, effects: Vec<DVector<f64>>) -> Result<Self> {
        let dim = prep.len();
        let completeness = effects.iter().fold(DVector::zeros(dim), |acc, e| acc + e);
        let gs = Self::with_completeness(gates, prep, effects, completeness)?;
        let trace = trace_covector(dim);
        if (&gs.completeness - &trace).amax() > COMPLETENESS_TOL {
            return Err(GstError::InvalidGateSet("effects do not sum to the trace covector".into()));
        }
        Ok(gs)
    }

    fn with_completeness(
        gates: Vec<(String, DMatrix<f64>)>,
        prep: DVector<f64>,
        effects: Vec<DVector<f64>>,
        completeness: DVector<f64>,
    ) -> Result<Self> {
        let dim = prep.len();
        if dim < 4 {
            return Err(GstError::InvalidGateSet("dimension must be at least 4".into()));
        }
        if effects.len() < 2 {
            return Err(GstError::InvalidGateSet("measurement needs at least two effects".into()));
        }
        for e in &effects {
            if e.len() != dim {
                return Err(GstError::DimensionMismatch { expected: dim, found: e.len() });
            }
        }
        let mut labels = Vec::with_capacity(gates.len());
        let mut ops = Vec::with_capacity(gates.len());
        let mut index = HashMap::new();
        for (label, m) in gates {
            if m.nrows() != dim {
                return Err(GstError::DimensionMismatch { expected: dim, found: m.nrows() });
            }
            if index.insert(label.clone(), labels.len()).is_some() {
                return Err(GstError::InvalidGateSet(format!("duplicate gate label `{label}`")));
            }
            labels.push(label);
            ops.push(SuperOp::new(m)?);
        }
        let params = ParameterMap::new(dim, ops.len(), effects.len());
        Ok(GateSet {
            labels,
            gates: ops,
            index,
            prep: StateVec(prep),
            effects: effects.into_iter().map(EffectVec).collect(),
            completeness,
            params,
        })
    }

    /// Superoperator dimension `d²`.
    pub fn dim(&self) -> usize {
        self.prep.dim()
    }

    /// Number of measurement outcomes `m`.
    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn n_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gate(&self, label: &str) -> Option<&SuperOp> {
        self.index.get(label).map(|&k| &self.gates[k])
    }

    pub fn gate_at(&self, k: usize) -> &SuperOp {
        &self.gates[k]
    }

    pub fn gate_index(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn prep(&self) -> &StateVec {
        &self.prep
    }

    pub fn effects(&self) -> &[EffectVec] {
        &self.effects
    }

    /// Effects stacked as rows of an `m × d²` matrix.
    pub fn effect_matrix(&self) -> DMatrix<f64> {
        let m = self.n_outcomes();
        DMatrix::from_fn(m, self.dim(), |r, c| self.effects[r].0[c])
    }

    pub fn param_map(&self) -> &ParameterMap {
        &self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn is_tp(&self) -> bool {
        self.gates.iter().all(SuperOp::is_tp)
    }

    /// Map labels to gate indices.
    pub fn resolve(&self, c: &Circuit) -> Result<Vec<usize>> {
        c.labels()
            .iter()
            .map(|l| self.gate_index(l).ok_or_else(|| GstError::UnknownLabel(l.clone())))
            .collect()
    }

    /// Product `G_{k_n} ⋯ G_{k_1}` of a circuit's gates.
    pub fn circuit_superop(&self, c: &Circuit) -> Result<DMatrix<f64>> {
        let idx = self.resolve(c)?;
        Ok(self.product(&idx))
    }

    pub(crate) fn product(&self, idx: &[usize]) -> DMatrix<f64> {
        let mut acc = DMatrix::identity(self.dim(), self.dim());
        for &k in idx {
            acc = self.gates[k].matrix() * acc;
        }
        acc
    }

    /// Current parameter vector θ.
    pub fn to_params(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.params.len(),
            self.params.coords().iter().map(|pc| match pc.op {
                OpRef::Gate(k) => self.gates[k].matrix()[(pc.row, pc.col)],
                OpRef::Prep => self.prep.0[pc.row],
                OpRef::Effect(j) => self.effects[j].0[pc.row],
            }),
        )
    }

    /// A copy of this gate set with parameters replaced by `theta`.
    pub fn with_params(&self, theta: &DVector<f64>) -> Result<GateSet> {
        if theta.len() != self.params.len() {
            return Err(GstError::DimensionMismatch { expected: self.params.len(), found: theta.len() });
        }
        let mut gates: Vec<DMatrix<f64>> = self.gates.iter().map(|g| g.matrix().clone()).collect();
        let mut prep = self.prep.0.clone();
        let mut effects: Vec<DVector<f64>> = self.effects.iter().map(|e| e.0.clone()).collect();
        for (pc, &v) in self.params.coords().iter().zip(theta.iter()) {
            match pc.op {
                OpRef::Gate(k) => gates[k][(pc.row, pc.col)] = v,
                OpRef::Prep => prep[pc.row] = v,
                OpRef::Effect(j) => effects[j][pc.row] = v,
            }
        }
        let last = effects.len() - 1;
        let free_sum = effects[..last].iter().fold(DVector::zeros(self.dim()), |acc, e| acc + e);
        effects[last] = &self.completeness - free_sum;
        self.rebuild(gates, prep, effects, self.completeness.clone())
    }

    /// Apply `f(label, G)` to every gate, keeping SPAM unchanged.
    pub fn map_gates(&self, mut f: impl FnMut(&str, &DMatrix<f64>) -> DMatrix<f64>) -> Result<GateSet> {
        let gates = self.labels.iter().zip(&self.gates).map(|(l, g)| f(l, g.matrix())).collect();
        self.rebuild(
            gates,
            self.prep.0.clone(),
            self.effects.iter().map(|e| e.0.clone()).collect(),
            self.completeness.clone(),
        )
    }

    /// Apply `f` to the prep vector and every effect vector, keeping gates.
    pub fn map_spam(&self, mut f: impl FnMut(&DVector<f64>) -> DVector<f64>) -> Result<GateSet> {
        let gates = self.gates.iter().map(|g| g.matrix().clone()).collect();
        let prep = f(&self.prep.0);
        let effects = self.effects.iter().map(|e| f(&e.0)).collect();
        self.rebuild(gates, prep, effects, self.completeness.clone())
    }

    pub(crate) fn rebuild(
        &self,
        gates: Vec<DMatrix<f64>>,
        prep: DVector<f64>,
        effects: Vec<DVector<f64>>,
        completeness: DVector<f64>,
    ) -> Result<GateSet> {
        Self::with_completeness(self.labels.iter().cloned().zip(gates).collect(), prep, effects, completeness)
    }

    pub(crate) fn completeness(&self) -> &DVector<f64> {
        &self.completeness
    }

    /// Restrict to a subset of gates (in the given order), keeping SPAM.
    pub fn subset(&self, labels: &[&str]) -> Result<GateSet> {
        let gates = labels
            .iter()
            .map(|l| {
                self.gate(l)
                    .map(|g| (l.to_string(), g.matrix().clone()))
                    .ok_or_else(|| GstError::UnknownLabel(l.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_completeness(
            gates,
            self.prep.0.clone(),
            self.effects.iter().map(|e| e.0.clone()).collect(),
            self.completeness.clone(),
        )
    }

    pub fn to_file(&self) -> GateSetFile {
        let mut gates = serde_json::Map::new();
        for (l, g) in self.labels.iter().zip(&self.gates) {
            let rows: Vec<Vec<f64>> =
                (0..self.dim()).map(|r| g.matrix().row(r).iter().copied().collect()).collect();
            gates.insert(l.clone(), serde_json::to_value(rows).expect("finite floats"));
        }
        GateSetFile {
            dim: self.dim(),
            gates,
            prep: self.prep.0.iter().copied().collect(),
            effects: self.effects.iter().map(|e| e.0.iter().copied().collect()).collect(),
            convention: PAULI_NORMALIZED.to_string(),
        }
    }

    pub fn from_file(file: &GateSetFile) -> Result<GateSet> {
        if file.convention != PAULI_NORMALIZED {
            return Err(GstError::InvalidGateSet(format!("unsupported convention `{}`", file.convention)));
        }
        let dim = file.dim;
        let mut gates = Vec::new();
        for (label, value) in &file.gates {
            let rows: Vec<Vec<f64>> = serde_json::from_value(value.clone())?;
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(GstError::InvalidGateSet(format!("gate `{label}` is not {dim}×{dim}")));
            }
            gates.push((label.clone(), DMatrix::from_fn(dim, dim, |r, c| rows[r][c])));
        }
        if file.prep.len() != dim {
            return Err(GstError::DimensionMismatch { expected: dim, found: file.prep.len() });
        }
        let effects = file.effects.iter().map(|e| DVector::from_vec(e.clone())).collect();
        GateSet::new(gates, DVector::from_vec(file.prep.clone()), effects)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<GateSet> {
        let file: GateSetFile = serde_json::from_str(s)?;
        GateSet::from_file(&file)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<GateSet> {
        GateSet::from_json(&std::fs::read_to_string(path)?)
    }
}

pub const PAULI_NORMALIZED: &str = "pauli-normalized";

/// On-disk gate set: `{dim, gates: {label: rows}, prep, effects, convention}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateSetFile {
    pub dim: usize,
    pub gates: serde_json::Map<String, serde_json::Value>,
    pub prep: Vec<f64>,
    pub effects: Vec<Vec<f64>>,
    pub convention: String,
}

/// `(√d, 0, …, 0)`: the covector taking the trace.
pub fn trace_covector(dim: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[0] = (dim as f64).sqrt().sqrt();
    v
}

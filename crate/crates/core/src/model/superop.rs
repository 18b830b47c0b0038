use nalgebra::{DMatrix, DVector};

use crate::error::{GstError, Result};

const TP_TOL: f64 = 1e-12;

/// A superoperator in the normalized Pauli basis (Pauli transfer matrix).
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp(DMatrix<f64>);

impl SuperOp {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GstError::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GstError::InvalidGateSet("non-finite superoperator entry".into()));
        }
        Ok(SuperOp(m))
    }

    pub fn identity(dim: usize) -> Self {
        SuperOp(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// True when the first row is `(1, 0, …, 0)`, i.e. the map preserves trace.
    pub fn is_tp(&self) -> bool {
        (0..self.dim()).all(|c| {
            let want = if c == 0 { 1.0 } else { 0.0 };
            (self.0[(0, c)] - want).abs() <= TP_TOL
        })
    }
}

/// Superket of a state preparation.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVec(pub DVector<f64>);

/// Superbra of a measurement effect, stored as a plain vector.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectVec(pub DVector<f64>);

impl StateVec {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl EffectVec {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

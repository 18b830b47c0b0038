use nalgebra::{DMatrix, DVector};

use super::gateset::{GateSet, OpRef};
use crate::error::{GstError, Result};
use crate::linalg;

/// Largest condition number accepted for a gauge transform.
pub const MAX_GAUGE_CONDITION: f64 = 1e8;

/// Parameter-space directions generated by infinitesimal TP gauge transforms.
#[derive(Clone, Debug)]
pub struct GaugeTangent {
    /// `N_p × (d⁴ − d²)`; one column per elementary TP generator.
    pub basis: DMatrix<f64>,
    pub rank: usize,
}

impl GaugeTangent {
    /// Orthonormal basis of the gauge span.
    pub fn orthonormal(&self) -> DMatrix<f64> {
        linalg::column_space(&self.basis)
    }

    /// Orthonormal basis of the non-gauge complement.
    pub fn complement(&self) -> DMatrix<f64> {
        linalg::orthogonal_complement(&self.basis)
    }
}

/// Image of the generator `K = e_r e_cᵀ` (`r ≥ 1`) in parameter space:
/// `G ↦ KG − GK`, `ρ ↦ Kρ`, `E ↦ −EK`.
fn generator_direction(gs: &GateSet, r: usize, c: usize) -> DVector<f64> {
    let pm = gs.param_map();
    let prep = &gs.prep().0;
    DVector::from_iterator(
        pm.len(),
        pm.coords().iter().map(|pc| match pc.op {
            OpRef::Gate(k) => {
                let g = gs.gate_at(k).matrix();
                let kg = if pc.row == r { g[(c, pc.col)] } else { 0.0 };
                let gk = if pc.col == c { g[(pc.row, r)] } else { 0.0 };
                kg - gk
            }
            OpRef::Prep => {
                if pc.row == r {
                    prep[c]
                } else {
                    0.0
                }
            }
            OpRef::Effect(j) => {
                if pc.row == c {
                    -gs.effects()[j].0[r]
                } else {
                    0.0
                }
            }
        }),
    )
}

pub fn gauge_tangent(gs: &GateSet) -> GaugeTangent {
    let dim = gs.dim();
    let cols: Vec<DVector<f64>> =
        (1..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).map(|(r, c)| generator_direction(gs, r, c)).collect();
    let basis = DMatrix::from_columns(&cols);
    let rank = linalg::rank(&basis);
    GaugeTangent { basis, rank }
}

/// `N_p − rank(gauge tangent)`.
pub fn non_gauge_count(gs: &GateSet) -> usize {
    gs.n_params() - gauge_tangent(gs).rank
}

/// `G ↦ M G M⁻¹`, `ρ ↦ Mρ`, `E ↦ E M⁻¹`.
pub fn apply_gauge_transform(gs: &GateSet, m: &DMatrix<f64>) -> Result<GateSet> {
    let dim = gs.dim();
    if m.nrows() != dim || m.ncols() != dim {
        return Err(GstError::DimensionMismatch { expected: dim, found: m.nrows() });
    }
    let cond = linalg::condition_number(m);
    if !(cond < MAX_GAUGE_CONDITION) {
        return Err(GstError::SingularTransform(cond));
    }
    let inv = m.clone().try_inverse().ok_or(GstError::SingularTransform(cond))?;
    let gates = gs.labels().iter().map(|l| m * gs.gate(l).unwrap().matrix() * &inv).collect();
    let prep = m * &gs.prep().0;
    let inv_t = inv.transpose();
    let effects = gs.effects().iter().map(|e| &inv_t * &e.0).collect();
    let completeness = &inv_t * gs.completeness();
    gs.rebuild(gates, prep, effects, completeness)
}

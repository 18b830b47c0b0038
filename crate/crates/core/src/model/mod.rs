//! Gate sets, circuits and the TP parameterization.

mod circuit;
mod gateset;
mod gauge;
mod probs;
mod superop;

pub use circuit::{Circuit, CircuitStructure};
pub use gateset::{trace_covector, GateSet, GateSetFile, OpRef, ParamCoord, ParameterMap, PAULI_NORMALIZED};
pub use gauge::{apply_gauge_transform, gauge_tangent, non_gauge_count, GaugeTangent, MAX_GAUGE_CONDITION};
pub use probs::{
    circuit_probabilities, effective_fiducial_effects, effective_fiducial_states, probability_hessian,
    probability_jacobian,
};
pub(crate) use probs::{hessian_for, jacobian_for, probabilities_for};
pub use superop::{EffectVec, StateVec, SuperOp};

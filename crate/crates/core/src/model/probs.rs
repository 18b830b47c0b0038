//! Outcome probabilities and their analytic derivatives with respect to θ.
//!
//! Derivatives use cached prefix states and suffix effect rows: for a gate
//! entry `(r, c)` at position `t`, `∂p_j = L_t[j, r] · R_t[c]`, summed over
//! every occurrence of that gate in the circuit.

use nalgebra::{DMatrix, DVector};

use super::circuit::Circuit;
use super::gateset::GateSet;
use super::superop::{EffectVec, StateVec};
use crate::error::Result;

/// `p_j = ⟨⟨E_j| G_{k_n} ⋯ G_{k_1} |ρ⟩⟩` for every effect.
pub fn circuit_probabilities(gs: &GateSet, c: &Circuit) -> Result<DVector<f64>> {
    let idx = gs.resolve(c)?;
    Ok(probabilities_for(gs, &idx))
}

pub(crate) fn probabilities_for(gs: &GateSet, idx: &[usize]) -> DVector<f64> {
    let mut state = gs.prep().0.clone();
    for &k in idx {
        state = gs.gate_at(k).matrix() * state;
    }
    gs.effect_matrix() * state
}

/// `|ρ'_j⟩⟩ = F_j |ρ⟩⟩` for each prep fiducial.
pub fn effective_fiducial_states(gs: &GateSet, fids: &[Circuit]) -> Result<Vec<StateVec>> {
    fids.iter()
        .map(|f| Ok(StateVec(gs.circuit_superop(f)? * &gs.prep().0)))
        .collect()
}

/// `⟨⟨E'_i| = ⟨⟨E_{i mod m}| H_{⌊i/m⌋}`: fiducial-major, effect-minor ordering.
pub fn effective_fiducial_effects(gs: &GateSet, fids: &[Circuit]) -> Result<Vec<EffectVec>> {
    let mut out = Vec::with_capacity(fids.len() * gs.n_outcomes());
    for h in fids {
        let op = gs.circuit_superop(h)?;
        for e in gs.effects() {
            out.push(EffectVec(op.tr_mul(&e.0)));
        }
    }
    Ok(out)
}

struct Sweep {
    /// `right[t]`: state entering position `t`; `right[n]` is the final state.
    right: Vec<DVector<f64>>,
    /// `left[t]`: effect rows after position `t` (`E · G_{n-1} ⋯ G_{t+1}`), `m × dim`.
    left: Vec<DMatrix<f64>>,
    /// `E · G_{n-1} ⋯ G_0`.
    left_all: DMatrix<f64>,
}

fn sweep(gs: &GateSet, idx: &[usize]) -> Sweep {
    let n = idx.len();
    let mut right = Vec::with_capacity(n + 1);
    right.push(gs.prep().0.clone());
    for (t, &k) in idx.iter().enumerate() {
        let next = gs.gate_at(k).matrix() * &right[t];
        right.push(next);
    }
    let mut left = vec![DMatrix::zeros(0, 0); n];
    let mut acc = gs.effect_matrix();
    for t in (0..n).rev() {
        left[t] = acc.clone();
        acc = &acc * gs.gate_at(idx[t]).matrix();
    }
    Sweep { right, left, left_all: acc }
}

/// `m × N_p` Jacobian of the outcome probabilities.
pub fn probability_jacobian(gs: &GateSet, c: &Circuit) -> Result<DMatrix<f64>> {
    let idx = gs.resolve(c)?;
    Ok(jacobian_for(gs, &idx))
}

pub(crate) fn jacobian_for(gs: &GateSet, idx: &[usize]) -> DMatrix<f64> {
    let dim = gs.dim();
    let m = gs.n_outcomes();
    let pm = gs.param_map();
    let sw = sweep(gs, idx);
    let mut jac = DMatrix::zeros(m, pm.len());
    for (t, &k) in idx.iter().enumerate() {
        let l = &sw.left[t];
        let r = &sw.right[t];
        for j in 0..m {
            for row in 1..dim {
                let lv = l[(j, row)];
                if lv == 0.0 {
                    continue;
                }
                let base = pm.gate_index(k, row, 0);
                for col in 0..dim {
                    jac[(j, base + col)] += lv * r[col];
                }
            }
        }
    }
    let prep = pm.prep_block();
    for j in 0..m {
        for a in 1..dim {
            jac[(j, prep.start + a - 1)] = sw.left_all[(j, a)];
        }
    }
    let fin = &sw.right[idx.len()];
    for e in 0..m - 1 {
        let blk = pm.effect_block(e);
        for a in 0..dim {
            jac[(e, blk.start + a)] = fin[a];
            jac[(m - 1, blk.start + a)] -= fin[a];
        }
    }
    jac
}

/// Per-outcome `N_p × N_p` Hessians of the outcome probabilities.
pub fn probability_hessian(gs: &GateSet, c: &Circuit) -> Result<Vec<DMatrix<f64>>> {
    let idx = gs.resolve(c)?;
    Ok(hessian_for(gs, &idx))
}

pub(crate) fn hessian_for(gs: &GateSet, idx: &[usize]) -> Vec<DMatrix<f64>> {
    let dim = gs.dim();
    let m = gs.n_outcomes();
    let pm = gs.param_map();
    let np = pm.len();
    let n = idx.len();
    let sw = sweep(gs, idx);
    let mut hess = vec![DMatrix::zeros(np, np); m];

    // Effect coefficients: outcome j < m-1 sees +1 on its own block, the
    // complement outcome sees -1 on every free block.
    let effect_sign = |j: usize, e: usize| -> f64 {
        if j == e {
            1.0
        } else if j == m - 1 {
            -1.0
        } else {
            0.0
        }
    };

    // Prefix products P_t = G_{t-1} ⋯ G_0 and suffix products S_t = G_{n-1} ⋯ G_{t+1}.
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(DMatrix::identity(dim, dim));
    for (t, &k) in idx.iter().enumerate() {
        let next = gs.gate_at(k).matrix() * &prefix[t];
        prefix.push(next);
    }
    let mut suffix = vec![DMatrix::zeros(0, 0); n];
    let mut acc = DMatrix::identity(dim, dim);
    for t in (0..n).rev() {
        suffix[t] = acc.clone();
        acc = &acc * gs.gate_at(idx[t]).matrix();
    }

    // gate–gate: positions s < t.
    for s in 0..n {
        let mut mid = DMatrix::<f64>::identity(dim, dim);
        for t in s + 1..n {
            if t > s + 1 {
                mid = gs.gate_at(idx[t - 1]).matrix() * &mid;
            }
            let (ks, kt) = (idx[s], idx[t]);
            let rs = &sw.right[s];
            let lt = &sw.left[t];
            for (j, h) in hess.iter_mut().enumerate() {
                for r2 in 1..dim {
                    let l = lt[(j, r2)];
                    if l == 0.0 {
                        continue;
                    }
                    for c2 in 0..dim {
                        let b = pm.gate_index(kt, r2, c2);
                        for r1 in 1..dim {
                            let lm = l * mid[(c2, r1)];
                            if lm == 0.0 {
                                continue;
                            }
                            let a0 = pm.gate_index(ks, r1, 0);
                            for c1 in 0..dim {
                                let v = lm * rs[c1];
                                h[(a0 + c1, b)] += v;
                                h[(b, a0 + c1)] += v;
                            }
                        }
                    }
                }
            }
        }
    }

    let prep = pm.prep_block();
    for t in 0..n {
        let k = idx[t];
        // prep–gate
        for (j, h) in hess.iter_mut().enumerate() {
            for row in 1..dim {
                let l = sw.left[t][(j, row)];
                if l == 0.0 {
                    continue;
                }
                for col in 0..dim {
                    let g = pm.gate_index(k, row, col);
                    for a in 1..dim {
                        let v = l * prefix[t][(col, a)];
                        h[(g, prep.start + a - 1)] += v;
                        h[(prep.start + a - 1, g)] += v;
                    }
                }
            }
        }
        // effect–gate
        for e in 0..m - 1 {
            let blk = pm.effect_block(e);
            for (j, h) in hess.iter_mut().enumerate() {
                let sign = effect_sign(j, e);
                if sign == 0.0 {
                    continue;
                }
                for row in 1..dim {
                    for col in 0..dim {
                        let g = pm.gate_index(k, row, col);
                        let rc = sw.right[t][col];
                        for a in 0..dim {
                            let v = sign * suffix[t][(a, row)] * rc;
                            h[(g, blk.start + a)] += v;
                            h[(blk.start + a, g)] += v;
                        }
                    }
                }
            }
        }
    }

    // effect–prep
    let total = &prefix[n];
    for e in 0..m - 1 {
        let blk = pm.effect_block(e);
        for (j, h) in hess.iter_mut().enumerate() {
            let sign = effect_sign(j, e);
            if sign == 0.0 {
                continue;
            }
            for a in 0..dim {
                for b in 1..dim {
                    let v = sign * total[(a, b)];
                    h[(blk.start + a, prep.start + b - 1)] += v;
                    h[(prep.start + b - 1, blk.start + a)] += v;
                }
            }
        }
    }
    hess
}

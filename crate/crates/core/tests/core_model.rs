use gst_design::model::{
    apply_gauge_transform, circuit_probabilities, effective_fiducial_effects, effective_fiducial_states,
    gauge_tangent, non_gauge_count, probability_hessian, probability_jacobian,
};
use gst_design::basis::{rotation, unitary_ptm};
use gst_design::stdsets::{xycphase, xyi, xyi_fiducials};
use gst_design::{Circuit, GateSet, GstError};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_circuit(gs: &GateSet, rng: &mut impl Rng, max_depth: usize) -> Circuit {
    let depth = rng.random_range(0..=max_depth);
    let labels = gs.labels();
    Circuit::new((0..depth).map(|_| labels[rng.random_range(0..labels.len())].clone()))
}

/// Generic (non-unitary, TP) model near XYI so derivatives have no accidental zeros.
fn generic_xyi(seed: u64) -> GateSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gs = xyi();
    let theta = gs.to_params();
    let noisy = theta.map(|v| v + 0.02 * (rng.random::<f64>() - 0.5));
    // keep the effects valid-ish by leaving SPAM as is
    let pm = gs.param_map().clone();
    let mut out = theta.clone();
    for i in 0..pm.n_gate_params() {
        out[i] = noisy[i] * 0.98;
    }
    gs.with_params(&out).unwrap()
}

fn random_tp_matrix(rng: &mut impl Rng, dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim, dim);
    for r in 1..dim {
        for c in 0..dim {
            m[(r, c)] += 0.3 * (rng.random::<f64>() - 0.5);
        }
    }
    m
}

#[test]
fn ideal_xyi_probabilities() {
    let gs = xyi();
    let p = circuit_probabilities(&gs, &Circuit::empty()).unwrap();
    assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12);
    let p = circuit_probabilities(&gs, &Circuit::new(["Gx", "Gx"])).unwrap();
    assert!(p[0].abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12);
    let p = circuit_probabilities(&gs, &Circuit::new(["Gx"])).unwrap();
    assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
}

#[test]
fn unknown_label_is_rejected() {
    let err = circuit_probabilities(&xyi(), &Circuit::new(["Gz"])).unwrap_err();
    assert!(matches!(err, GstError::UnknownLabel(l) if l == "Gz"));
}

#[test]
fn effective_fiducials() {
    let gs = xyi();
    let states = effective_fiducial_states(&gs, &[Circuit::empty(), Circuit::new(["Gx"])]).unwrap();
    assert_eq!(states[0].0, gs.prep().0);
    // Gx|0⟩ is the -Y eigenstate: Bloch (0, -1, 0)
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let expect = DVector::from_vec(vec![s, 0.0, -s, 0.0]);
    assert!((&states[1].0 - expect).amax() < 1e-12);

    let fids = xyi_fiducials();
    let effects = effective_fiducial_effects(&gs, &fids).unwrap();
    assert_eq!(effects.len(), 12);
    for (i, e) in effects.iter().enumerate() {
        let h = gs.circuit_superop(&fids[i / 2]).unwrap();
        let want = h.tr_mul(&gs.effects()[i % 2].0);
        assert!((&e.0 - want).amax() < 1e-14);
    }
}

#[test]
fn parameter_counts_xyi() {
    let gs = xyi();
    assert_eq!(gs.n_params(), 43);
    assert_eq!(non_gauge_count(&gs), 31);
}

#[test]
fn parameter_counts_xycphase() {
    let gs = xycphase();
    assert_eq!(gs.n_params(), 1263);
    assert_eq!(non_gauge_count(&gs), 1023);
}

#[test]
fn absent_gate_gives_zero_columns() {
    let gs = generic_xyi(1);
    let jac = probability_jacobian(&gs, &Circuit::new(["Gx", "Gy"])).unwrap();
    let gi = gs.param_map().gate_block(0);
    assert!(jac.columns(gi.start, gi.len()).iter().all(|&v| v == 0.0));
}

fn fd_jacobian(gs: &GateSet, c: &Circuit, h: f64) -> DMatrix<f64> {
    let theta = gs.to_params();
    let m = gs.n_outcomes();
    let mut out = DMatrix::zeros(m, theta.len());
    for i in 0..theta.len() {
        let mut tp = theta.clone();
        tp[i] += h;
        let mut tm = theta.clone();
        tm[i] -= h;
        let pp = circuit_probabilities(&gs.with_params(&tp).unwrap(), c).unwrap();
        let pm = circuit_probabilities(&gs.with_params(&tm).unwrap(), c).unwrap();
        out.set_column(i, &((pp - pm) / (2.0 * h)));
    }
    out
}

#[test]
fn jacobian_and_hessian_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let gs = generic_xyi(3);
    let theta = gs.to_params();
    let h = 1e-6;
    for _ in 0..12 {
        let c = random_circuit(&gs, &mut rng, 16);
        let jac = probability_jacobian(&gs, &c).unwrap();
        let fd = fd_jacobian(&gs, &c, h);
        assert!((&jac - &fd).amax() < 1e-6, "jacobian mismatch on {c}");

        let hess = probability_hessian(&gs, &c).unwrap();
        // Central differences of the analytic Jacobian.
        for i in 0..theta.len() {
            let mut tp = theta.clone();
            tp[i] += h;
            let mut tm = theta.clone();
            tm[i] -= h;
            let jp = probability_jacobian(&gs.with_params(&tp).unwrap(), &c).unwrap();
            let jm = probability_jacobian(&gs.with_params(&tm).unwrap(), &c).unwrap();
            let col = (jp - jm) / (2.0 * h);
            for (j, hj) in hess.iter().enumerate() {
                for k in 0..theta.len() {
                    assert!((hj[(k, i)] - col[(j, k)]).abs() < 1e-6, "hessian mismatch on {c}");
                }
            }
        }
        let sum = hess.iter().fold(DMatrix::zeros(theta.len(), theta.len()), |a, b| a + b);
        assert!(sum.amax() < 1e-9);
    }
}

#[test]
fn gauge_directions_leave_probabilities_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let gs = generic_xyi(9);
    let tangent = gauge_tangent(&gs);
    assert_eq!(tangent.basis.ncols(), 12);
    assert_eq!(tangent.rank, 12);
    let theta = gs.to_params();
    let eps = 1e-5;
    for col in 0..tangent.basis.ncols() {
        let v = tangent.basis.column(col).normalize();
        let moved = gs.with_params(&(&theta + v * eps)).unwrap();
        for _ in 0..5 {
            let c = random_circuit(&gs, &mut rng, 12);
            let dp = circuit_probabilities(&moved, &c).unwrap() - circuit_probabilities(&gs, &c).unwrap();
            assert!(dp.amax() <= 1e-8, "first-order gauge change {:e}", dp.amax());
        }
    }
}

#[test]
fn identity_gauge_transform_is_a_no_op() {
    let gs = xyi();
    let out = apply_gauge_transform(&gs, &DMatrix::identity(4, 4)).unwrap();
    assert_eq!(out.to_params(), gs.to_params());
}

#[test]
fn singular_gauge_transform_is_rejected() {
    let mut m = DMatrix::identity(4, 4);
    m[(3, 3)] = 0.0;
    assert!(matches!(apply_gauge_transform(&xyi(), &m), Err(GstError::SingularTransform(_))));
}

#[test]
fn random_tp_gauge_preserves_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let gs = generic_xyi(4);
    let m = random_tp_matrix(&mut rng, 4);
    let out = apply_gauge_transform(&gs, &m).unwrap();
    assert!(out.is_tp());
    for _ in 0..100 {
        let c = random_circuit(&gs, &mut rng, 16);
        let a = circuit_probabilities(&gs, &c).unwrap();
        let b = circuit_probabilities(&out, &c).unwrap();
        assert!((a - b).amax() < 1e-9);
    }
}

#[test]
fn unitary_gauge_keeps_gates_tp() {
    let m = unitary_ptm(&rotation(2, 0.7));
    let out = apply_gauge_transform(&xyi(), &m).unwrap();
    for l in out.labels() {
        let g = out.gate(l).unwrap().matrix();
        assert!((g[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((1..4).all(|c| g[(0, c)].abs() < 1e-12));
    }
}

#[test]
fn gate_set_json_round_trip() {
    let gs = xycphase();
    let back = GateSet::from_json(&gs.to_json()).unwrap();
    assert_eq!(back.labels(), gs.labels());
    assert_eq!(back.to_params(), gs.to_params());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probabilities_sum_to_one(seed in 0u64..10_000, depth in 0usize..24) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gs = generic_xyi(seed);
        let labels = gs.labels().to_vec();
        let c = Circuit::new((0..depth).map(|_| labels[rng.random_range(0..labels.len())].clone()));
        let p = circuit_probabilities(&gs, &c).unwrap();
        prop_assert!((p.sum() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn arbitrary_gauge_preserves_probabilities(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gs = generic_xyi(seed);
        let mut m = DMatrix::identity(4, 4);
        for v in m.iter_mut() {
            *v += 0.3 * (rng.random::<f64>() - 0.5);
        }
        let out = apply_gauge_transform(&gs, &m).unwrap();
        let c = random_circuit(&gs, &mut rng, 16);
        let a = circuit_probabilities(&gs, &c).unwrap();
        let b = circuit_probabilities(&out, &c).unwrap();
        prop_assert!((a - b).amax() < 1e-9);
    }
}

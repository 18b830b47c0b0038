use gst_design::design::{build_design, DepthSchedule, ExperimentDesign, FprPolicy};
use gst_design::fisher::{
    certify_design, circuit_fim, circuit_fim_with_hessian, circuits_fim, cumulative_fims, design_fim, fisher_series,
    incremental_fims, null_direction_gauge_angles, perturbed_evaluation_point, projected_fim, regularize_spam,
    CertifyThresholds, SeriesKind,
};
use gst_design::linalg;
use gst_design::model::{circuit_probabilities, gauge_tangent, probability_jacobian};
use gst_design::noise::simulate_dataset;
use gst_design::stdsets::{xyi, xyi_fiducials};
use gst_design::{Circuit, GateSet};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_circuit(gs: &GateSet, rng: &mut impl Rng, max_depth: usize) -> Circuit {
    let depth = rng.random_range(0..=max_depth);
    let labels = gs.labels();
    Circuit::new((0..depth).map(|_| labels[rng.random_range(0..labels.len())].clone()))
}

fn eval_point() -> GateSet {
    perturbed_evaluation_point(&xyi(), 7).unwrap()
}

fn standard_germs() -> Vec<Circuit> {
    [vec!["Gi"], vec!["Gx"], vec!["Gy"], vec!["Gx", "Gy"], vec!["Gx", "Gy", "Gi"], vec!["Gx", "Gx", "Gy"]]
        .into_iter()
        .map(Circuit::new)
        .collect()
}

fn small_design(l_max: usize) -> ExperimentDesign {
    let f = xyi_fiducials();
    build_design(&xyi(), &f, &f, &standard_germs(), &DepthSchedule::powers_of_two(l_max).unwrap(), &FprPolicy::Full).unwrap()
}

fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max() / a.abs().max().max(b.abs().max()).max(f64::MIN_POSITIVE)
}

#[test]
fn circuit_fims_are_symmetric_psd_and_forms_agree() {
    let gs = eval_point();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..30 {
        let c = random_circuit(&gs, &mut rng, 16);
        let f = circuit_fim(&gs, &c, 1000.0).unwrap();
        assert!(rel_diff(&f.matrix, &f.matrix.transpose()) < 1e-14);
        let lmin = linalg::sym_eigenvalues(&f.matrix)[0];
        assert!(lmin >= -1e-8, "{c}: {lmin}");
        let h = circuit_fim_with_hessian(&gs, &c, 1000.0).unwrap();
        assert!((&f.matrix - &h.matrix).abs().max() <= 1e-8 * f.matrix.abs().max().max(1.0));
    }
}

#[test]
fn fim_annihilates_gauge_directions() {
    let gs = eval_point();
    let gauge = gauge_tangent(&gs).orthonormal();
    let fim = design_fim(&gs, &small_design(8), 1000.0).unwrap();
    let norm = fim.matrix.norm();
    for v in gauge.column_iter() {
        assert!((&fim.matrix * v).norm() <= 1e-6 * norm);
    }
    for angle in null_direction_gauge_angles(&gs, &fim, 1e-9) {
        assert!(angle < 1e-6, "{angle}");
    }
}

#[test]
fn fim_matches_numerical_hessian_of_expected_log_likelihood() {
    // Balanced outcomes: Gx takes |0⟩ to p = (1/2, 1/2).
    let gs = regularize_spam(&xyi(), 0.0).unwrap();
    let c = Circuit::new(["Gx"]);
    let p0 = circuit_probabilities(&gs, &c).unwrap();
    assert!((p0[0] - 0.5).abs() < 1e-12);
    let shots = 100.0;
    let theta = gs.to_params();
    // Gradient of N Σ p⁰_i ln p_i(θ).
    let grad = |t: &nalgebra::DVector<f64>| {
        let m = gs.with_params(t).unwrap();
        let p = circuit_probabilities(&m, &c).unwrap();
        let j = probability_jacobian(&m, &c).unwrap();
        let mut g = nalgebra::DVector::zeros(t.len());
        for i in 0..p.len() {
            g += j.row(i).transpose() * (shots * p0[i] / p[i]);
        }
        g
    };
    let n = theta.len();
    let h = 1e-5;
    let mut numeric = DMatrix::zeros(n, n);
    for b in 0..n {
        let mut up = theta.clone();
        let mut dn = theta.clone();
        up[b] += h;
        dn[b] -= h;
        numeric.set_column(b, &(-(grad(&up) - grad(&dn)) / (2.0 * h)));
    }
    let f = circuit_fim(&gs, &c, shots).unwrap();
    assert!((&f.matrix - &numeric).abs().max() < 1e-5);
}

#[test]
fn fim_is_additive_and_cumulative_sums_incremental() {
    let gs = eval_point();
    let d = small_design(16);
    let cs: Vec<&Circuit> = d.circuits.iter().map(|c| &c.circuit).collect();
    let (a, b) = cs.split_at(cs.len() / 3);
    let sum = circuits_fim(&gs, a, 1000.0).unwrap().matrix + circuits_fim(&gs, b, 1000.0).unwrap().matrix;
    let whole = circuits_fim(&gs, &cs, 1000.0).unwrap().matrix;
    assert!(rel_diff(&whole, &sum) < 1e-12);

    let inc = incremental_fims(&gs, &d, 1000.0).unwrap();
    let cum = cumulative_fims(&gs, &d, 1000.0).unwrap();
    let mut acc = DMatrix::zeros(gs.n_params(), gs.n_params());
    for (i, c) in inc.iter().zip(&cum) {
        acc += &i.matrix;
        assert!(rel_diff(&c.matrix, &acc) < 1e-12);
    }
    assert!(rel_diff(&cum.last().unwrap().matrix, &whole) < 1e-12);
    // Summation order is fixed, so repeated runs agree bit for bit.
    assert_eq!(design_fim(&gs, &d, 1000.0).unwrap(), design_fim(&gs, &d, 1000.0).unwrap());
}

#[test]
fn shots_scale_the_fim_linearly() {
    let gs = eval_point();
    let c = Circuit::new(["Gx", "Gy", "Gy"]);
    let a = circuit_fim(&gs, &c, 10.0).unwrap().matrix;
    let b = circuit_fim(&gs, &c, 1000.0).unwrap().matrix;
    assert!(rel_diff(&(a * 100.0), &b) < 1e-12);
}

#[test]
fn full_design_informs_all_31_non_gauge_directions() {
    let gs = eval_point();
    let series = fisher_series(&gs, &small_design(8), 1000.0, SeriesKind::Cumulative).unwrap();
    assert_eq!(series.gauge_null, 12);
    let last = series.spectra.last().unwrap();
    assert_eq!(last.len(), 31);
    assert!(last[0] > 1e-6 * last[30]);
}

#[test]
fn projection_keeps_one_block() {
    let gs = eval_point();
    let fim = design_fim(&gs, &small_design(4), 1000.0).unwrap();
    for label in ["Gx", "prep", "meas", "spam"] {
        let p = projected_fim(&gs, &fim, label).unwrap();
        assert_eq!(projected_fim(&gs, &p, label).unwrap(), p);
        let block = gst_design::fisher::operation_block(&gs, label).unwrap();
        for r in 0..fim.dim() {
            for c in 0..fim.dim() {
                let inside = block.contains(&r) && block.contains(&c);
                assert_eq!(p.matrix[(r, c)], if inside { fim.matrix[(r, c)] } else { 0.0 });
            }
        }
    }
    assert!(projected_fim(&gs, &fim, "Gz").is_err());
}

#[test]
fn projected_spam_information_does_not_grow_like_gate_information() {
    let gs = eval_point();
    let d = small_design(64);
    let gate = fisher_series(&gs, &d, 1000.0, SeriesKind::Projected { label: "Gx".into() }).unwrap();
    let spam = fisher_series(&gs, &d, 1000.0, SeriesKind::Projected { label: "prep".into() }).unwrap();
    let top = |s: &Vec<f64>| s.last().copied().unwrap();
    let n = gate.spectra.len();
    let gate_growth = top(&gate.spectra[n - 1]) / top(&gate.spectra[2]);
    let spam_growth = top(&spam.spectra[n - 1]) / top(&spam.spectra[2]);
    assert!(gate_growth > 20.0 * spam_growth, "{gate_growth} vs {spam_growth}");
}

#[test]
fn cramer_rao_bound_is_met_by_the_frequency_estimator() {
    // One parameter, one circuit: the prep Z coordinate seen through the empty
    // circuit. θ̂ = θ₀ + (k/N − p)/a has variance p(1−p)/(N a²) = 1/F.
    let gs = regularize_spam(&xyi(), 0.2).unwrap();
    let c = Circuit::empty();
    let shots = 500u64;
    let p = circuit_probabilities(&gs, &c).unwrap()[0];
    let j = probability_jacobian(&gs, &c).unwrap();
    let t = gs.param_map().prep_block().start + 3;
    let a = j[(0, t)];
    assert!(a.abs() > 0.1);
    let f = circuit_fim(&gs, &c, shots as f64).unwrap().matrix[(t, t)];
    assert!((f - shots as f64 * a * a / (p * (1.0 - p))).abs() < 1e-9 * f);

    let circuits = vec![c; 4000];
    let data = simulate_dataset(&gs, &circuits, shots, 11).unwrap();
    let est: Vec<f64> = data.rows.iter().map(|r| (r.counts[0] as f64 / shots as f64 - p) / a).collect();
    let mean = est.iter().sum::<f64>() / est.len() as f64;
    let var = est.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (est.len() - 1) as f64;
    assert!((var * f - 1.0).abs() < 0.1, "var·F = {}", var * f);
}

#[test]
fn certification_needs_two_depths_and_is_deterministic() {
    let gs = eval_point();
    let th = CertifyThresholds::default();
    assert!(certify_design(&gs, &small_design(1), &th).is_err());
    let d = small_design(32);
    let a = certify_design(&gs, &d, &th).unwrap();
    assert_eq!(a, certify_design(&gs, &d, &th).unwrap());
    assert_eq!(a.non_gauge, 31);
    assert_eq!(a.growing + a.plateaued, 31);
    assert_eq!(a.directions.len(), 31);
    assert!(a.directions.windows(2).all(|w| w[0].slope <= w[1].slope));
}

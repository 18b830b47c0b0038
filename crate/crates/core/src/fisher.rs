//! Fisher information of circuits and designs, spectra versus depth, and
//! design certification.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::ExperimentDesign;
use crate::error::{GstError, Result};
use crate::germs::amplifiable_count;
use crate::linalg::{self, pairwise_sum};
use crate::model::{gauge_tangent, hessian_for, jacobian_for, probabilities_for, Circuit, GateSet};
use crate::noise::{sample_noisy_gateset, NoiseSpec};

/// Probabilities are floored here inside `1/p`.
pub const PROB_CLIP: f64 = 1e-10;
pub const DEFAULT_SHOTS: f64 = 1000.0;
/// Generator weight of the default unitary perturbation used for certification.
pub const EVAL_PERTURBATION: f64 = 1e-3;
/// SPAM depolarization applied at evaluation points.
pub const SPAM_REGULARIZATION: f64 = 1e-3;
/// Circuits per deterministic summation chunk.
const CHUNK: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct FisherMatrix {
    pub matrix: DMatrix<f64>,
    pub shots: f64,
}

impl FisherMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::sym_eigenvalues(&self.matrix)
    }
}

fn weighted_rows(gs: &GateSet, idx: &[usize], shots: f64) -> DMatrix<f64> {
    let p = probabilities_for(gs, idx);
    let mut j = jacobian_for(gs, idx);
    for (r, &pi) in p.iter().enumerate() {
        let w = (shots / pi.max(PROB_CLIP)).sqrt();
        j.row_mut(r).scale_mut(w);
    }
    j
}

/// `N Σ_i (1/p_i) ∇p_i ∇p_iᵀ`.
pub fn circuit_fim(gs: &GateSet, c: &Circuit, shots: f64) -> Result<FisherMatrix> {
    let idx = gs.resolve(c)?;
    let a = weighted_rows(gs, &idx, shots);
    Ok(FisherMatrix { matrix: a.tr_mul(&a), shots })
}

/// `N Σ_i [(1/p_i) ∇p_i ∇p_iᵀ − H_i]`, the form that includes outcome Hessians.
pub fn circuit_fim_with_hessian(gs: &GateSet, c: &Circuit, shots: f64) -> Result<FisherMatrix> {
    let idx = gs.resolve(c)?;
    let a = weighted_rows(gs, &idx, shots);
    let mut m = a.tr_mul(&a);
    for h in hessian_for(gs, &idx) {
        m -= h * shots;
    }
    Ok(FisherMatrix { matrix: m, shots })
}

/// Deterministic FIM sum over a circuit list: fixed chunks, each a single
/// `AᵀA`, reduced pairwise.
pub fn circuits_fim(gs: &GateSet, circuits: &[&Circuit], shots: f64) -> Result<FisherMatrix> {
    let n = gs.n_params();
    let m = gs.n_outcomes();
    let idx = circuits.iter().map(|c| gs.resolve(c)).collect::<Result<Vec<_>>>()?;
    let parts: Vec<DMatrix<f64>> = idx
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut a = DMatrix::zeros(chunk.len() * m, n);
            for (i, ix) in chunk.iter().enumerate() {
                a.rows_mut(i * m, m).copy_from(&weighted_rows(gs, ix, shots));
            }
            a.tr_mul(&a)
        })
        .collect();
    Ok(FisherMatrix { matrix: pairwise_sum(parts, n, n), shots })
}

pub fn design_fim(gs: &GateSet, design: &ExperimentDesign, shots: f64) -> Result<FisherMatrix> {
    let cs: Vec<&Circuit> = design.circuits.iter().map(|c| &c.circuit).collect();
    circuits_fim(gs, &cs, shots)
}

/// Per-bucket FIMs: entry `l` sums circuits first appearing at schedule depth `l`.
pub fn incremental_fims(gs: &GateSet, design: &ExperimentDesign, shots: f64) -> Result<Vec<FisherMatrix>> {
    (0..design.maxdepths.len())
        .map(|l| {
            let cs: Vec<&Circuit> = design.circuits.iter().filter(|c| c.bucket == l).map(|c| &c.circuit).collect();
            circuits_fim(gs, &cs, shots)
        })
        .collect()
}

pub fn cumulative_fims(gs: &GateSet, design: &ExperimentDesign, shots: f64) -> Result<Vec<FisherMatrix>> {
    let inc = incremental_fims(gs, design, shots)?;
    let mut acc: Option<DMatrix<f64>> = None;
    Ok(inc
        .into_iter()
        .map(|f| {
            let next = match acc.take() {
                Some(a) => a + f.matrix,
                None => f.matrix,
            };
            acc = Some(next.clone());
            FisherMatrix { matrix: next, shots }
        })
        .collect())
}

/// Parameter-index range owned by an operation label (`"prep"`, `"meas"`,
/// `"spam"` or a gate label).
pub fn operation_block(gs: &GateSet, label: &str) -> Result<std::ops::Range<usize>> {
    let pm = gs.param_map();
    match label {
        "prep" => Ok(pm.prep_block()),
        "meas" => Ok(pm.meas_block()),
        "spam" => Ok(pm.spam_block()),
        g => gs.gate_index(g).map(|k| pm.gate_block(k)).ok_or_else(|| GstError::UnknownLabel(g.to_string())),
    }
}

/// Zero every row and column outside the label's parameter block.
pub fn projected_fim(gs: &GateSet, fim: &FisherMatrix, label: &str) -> Result<FisherMatrix> {
    let block = operation_block(gs, label)?;
    let n = fim.dim();
    let mut m = DMatrix::zeros(n, n);
    for r in block.clone() {
        for c in block.clone() {
            m[(r, c)] = fim.matrix[(r, c)];
        }
    }
    Ok(FisherMatrix { matrix: m, shots: fim.shots })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SeriesKind {
    Cumulative,
    Incremental,
    /// Incremental matrices projected onto one operation's block.
    Projected { label: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FisherSeries {
    pub maxdepths: Vec<usize>,
    pub kind: SeriesKind,
    /// Ascending eigenvalues at each depth.
    pub spectra: Vec<Vec<f64>>,
    /// Number of gauge directions removed before the spectra were taken.
    pub gauge_null: usize,
}

/// Orthonormal basis of the non-gauge subspace at `gs`.
pub fn non_gauge_basis(gs: &GateSet) -> DMatrix<f64> {
    gauge_tangent(gs).complement()
}

fn restricted_spectrum(q: &DMatrix<f64>, m: &DMatrix<f64>) -> Vec<f64> {
    linalg::sym_eigenvalues(&(q.transpose() * m * q))
}

/// Spectra versus depth. Cumulative and incremental spectra are taken on the
/// non-gauge subspace; projected spectra are those of the projected block.
pub fn fisher_series(gs: &GateSet, design: &ExperimentDesign, shots: f64, kind: SeriesKind) -> Result<FisherSeries> {
    let maxdepths = design.maxdepths.depths().to_vec();
    let (spectra, gauge_null) = match &kind {
        SeriesKind::Cumulative | SeriesKind::Incremental => {
            let q = non_gauge_basis(gs);
            let fims = if kind == SeriesKind::Cumulative {
                cumulative_fims(gs, design, shots)?
            } else {
                incremental_fims(gs, design, shots)?
            };
            (fims.iter().map(|f| restricted_spectrum(&q, &f.matrix)).collect(), gs.n_params() - q.ncols())
        }
        SeriesKind::Projected { label } => {
            let block = operation_block(gs, label)?;
            let fims = incremental_fims(gs, design, shots)?;
            let spectra = fims
                .iter()
                .map(|f| {
                    let sub = f.matrix.view((block.start, block.start), (block.len(), block.len())).into_owned();
                    linalg::sym_eigenvalues(&sub)
                })
                .collect();
            (spectra, 0)
        }
    };
    Ok(FisherSeries { maxdepths, kind, spectra, gauge_null })
}

impl FisherSeries {
    /// CSV with columns `L,index,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("L,index,value\n");
        for (l, spec) in self.maxdepths.iter().zip(&self.spectra) {
            for (i, v) in spec.iter().enumerate() {
                writeln!(s, "{l},{i},{v:e}").unwrap();
            }
        }
        s
    }
}

impl CertificationReport {
    /// CSV with columns `L,index,value,classification`, one row per classified
    /// direction and depth.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("L,index,value,classification\n");
        for (li, l) in self.maxdepths.iter().enumerate() {
            for d in &self.directions {
                let class = if d.growing { "growing" } else { "plateaued" };
                writeln!(s, "{l},{},{:e},{class}", d.index, d.information[li]).unwrap();
            }
        }
        s
    }
}

/// Depolarize prep and effects by `amount` so that no outcome probability is
/// exactly 0 or 1.
pub fn regularize_spam(gs: &GateSet, amount: f64) -> Result<GateSet> {
    gs.map_spam(|v| {
        let mut out = v * (1.0 - amount);
        out[0] = v[0];
        out
    })
}

/// Default evaluation point: seeded unitary perturbation of the target gates
/// with SPAM regularized.
pub fn perturbed_evaluation_point(target: &GateSet, seed: u64) -> Result<GateSet> {
    let gs = sample_noisy_gateset(target, &NoiseSpec::coherent(EVAL_PERTURBATION, seed))?;
    regularize_spam(&gs, SPAM_REGULARIZATION)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyThresholds {
    /// Minimum log-log slope for a direction to count as growing.
    pub slope: f64,
    /// Directions with information below this fraction of the median are flagged.
    pub relative_floor: f64,
    pub shots: f64,
}

impl Default for CertifyThresholds {
    fn default() -> Self {
        CertifyThresholds { slope: 0.8, relative_floor: 1e-6, shots: DEFAULT_SHOTS }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionClass {
    pub index: usize,
    pub slope: f64,
    /// Information `vᵀ I_L v` along the unit direction at every scheduled depth.
    pub information: Vec<f64>,
    pub growing: bool,
}

impl DirectionClass {
    pub fn final_information(&self) -> f64 {
        self.information.last().copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub maxdepths: Vec<usize>,
    pub n_params: usize,
    pub non_gauge: usize,
    pub amplifiable: usize,
    pub expected_spam: usize,
    pub growing: usize,
    pub plateaued: usize,
    /// Non-gauge directions whose total information is below the relative floor.
    pub low_information: usize,
    pub median_information: f64,
    pub min_information: f64,
    pub well_constructed: bool,
    pub directions: Vec<DirectionClass>,
    pub series: FisherSeries,
}

/// Least-squares slope of `ln y` against `ln L` using entries from `start` on.
pub fn growth_slope(maxdepths: &[usize], values: &[f64], start: usize) -> f64 {
    let x: Vec<f64> = maxdepths[start..].iter().map(|&l| (l as f64).ln()).collect();
    let y: Vec<f64> = values[start..].iter().map(|&v| v.max(f64::MIN_POSITIVE).ln()).collect();
    if x.len() < 2 {
        return 0.0;
    }
    linalg::ls_slope(&x, &y)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    match s.len() {
        0 => 0.0,
        n if n % 2 == 1 => s[n / 2],
        n => 0.5 * (s[n / 2 - 1] + s[n / 2]),
    }
}

/// Directions of the non-gauge subspace that diagonalize the cumulative FIM
/// at the start of the fitting window and at `L_max` simultaneously, with the
/// log-log growth slope of the information along each one.
fn growth_directions(q: &DMatrix<f64>, cum: &[FisherMatrix], maxdepths: &[usize], th: &CertifyThresholds) -> Vec<DirectionClass> {
    let n = cum.len();
    let start = n / 2;
    let restrict = |m: &DMatrix<f64>| linalg::symmetrize(&(q.transpose() * m * q));
    let (va, vecs) = linalg::sym_eigen(&restrict(&cum[start].matrix));
    let top = va.iter().copied().fold(0.0, f64::max);
    let floor = (top * 1e-12).max(f64::MIN_POSITIVE);
    let whiten = &vecs * DMatrix::from_diagonal(&DVector::from_iterator(va.len(), va.iter().map(|v| 1.0 / v.max(floor).sqrt())));
    let last = restrict(&cum[n - 1].matrix);
    let (_, u) = linalg::sym_eigen(&linalg::symmetrize(&(whiten.transpose() * &last * &whiten)));
    let dirs = &whiten * u;
    let restricted: Vec<DMatrix<f64>> = cum.iter().map(|f| restrict(&f.matrix)).collect();
    // Information below this is numerical noise; flooring it keeps empty
    // directions from producing spurious slopes.
    let info_floor = linalg::sym_eigenvalues(&last).last().copied().unwrap_or(0.0).max(0.0) * 1e-12;
    let mut out: Vec<DirectionClass> = (0..dirs.ncols())
        .map(|i| {
            let v = dirs.column(i).normalize();
            let info: Vec<f64> = restricted.iter().map(|m| (v.transpose() * m * &v)[(0, 0)]).collect();
            let floored: Vec<f64> = info.iter().map(|&x| x.max(info_floor)).collect();
            let slope = growth_slope(maxdepths, &floored, start);
            DirectionClass { index: i, slope, information: info, growing: slope >= th.slope }
        })
        .collect();
    out.sort_by(|a, b| a.slope.total_cmp(&b.slope));
    for (i, d) in out.iter_mut().enumerate() {
        d.index = i;
    }
    out
}

/// Classify the non-gauge directions as growing or plateaued with depth and
/// decide whether the design amplifies everything it should.
///
/// Directions are the joint eigenvectors of the cumulative FIMs at the first
/// depth of the upper half of the schedule and at `L_max`; each one is
/// classified by the least-squares slope of `ln(vᵀ I_L v)` against `ln L` over
/// that upper half. Following fixed directions keeps a SPAM direction with
/// large information from inheriting the growth of a gate direction whose
/// eigenvalue it crosses.
pub fn certify_design(gs_eval: &GateSet, design: &ExperimentDesign, th: &CertifyThresholds) -> Result<CertificationReport> {
    if design.maxdepths.len() < 2 {
        return Err(GstError::InvalidArgument("certification needs at least two depths".into()));
    }
    let q = non_gauge_basis(gs_eval);
    let cum = cumulative_fims(gs_eval, design, th.shots)?;
    let maxdepths = design.maxdepths.depths().to_vec();
    let spectra: Vec<Vec<f64>> = cum.iter().map(|f| restricted_spectrum(&q, &f.matrix)).collect();
    let series = FisherSeries { maxdepths: maxdepths.clone(), kind: SeriesKind::Cumulative, spectra, gauge_null: gs_eval.n_params() - q.ncols() };
    let non_gauge = q.ncols();
    let amplifiable = amplifiable_count(gs_eval);
    let expected_spam = non_gauge.saturating_sub(amplifiable);
    let directions = growth_directions(&q, &cum, &maxdepths, th);
    let growing = directions.iter().filter(|d| d.growing).count();
    let finals: Vec<f64> = series.spectra.last().unwrap().clone();
    let med = median(&finals);
    let low_information = finals.iter().filter(|&&v| v < th.relative_floor * med).count();
    let plateaued = non_gauge - growing;
    Ok(CertificationReport {
        maxdepths,
        n_params: gs_eval.n_params(),
        non_gauge,
        amplifiable,
        expected_spam,
        growing,
        plateaued,
        low_information,
        median_information: med,
        min_information: finals.first().copied().unwrap_or(0.0),
        well_constructed: plateaued <= expected_spam && low_information == 0,
        directions,
        series,
    })
}

/// Principal angle between each near-null eigenvector of `fim` and the gauge
/// tangent span at `gs`. Directions count as null below `rel_tol · λ_max`.
pub fn null_direction_gauge_angles(gs: &GateSet, fim: &FisherMatrix, rel_tol: f64) -> Vec<f64> {
    let (vals, vecs) = linalg::sym_eigen(&fim.matrix);
    let top = vals.iter().copied().fold(0.0, f64::max);
    let gauge = gauge_tangent(gs).orthonormal();
    vals.iter()
        .enumerate()
        .filter(|(_, &v)| v < rel_tol * top)
        .map(|(i, _)| linalg::angle_to_span(&DVector::from(vecs.column(i)), &gauge))
        .collect()
}

//! Noisy gate set sampling and multinomial dataset simulation.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::basis::{hamiltonian_generator, qubits_for_superop_dim};
use crate::error::{GstError, Result};
use crate::fisher::PROB_CLIP;
use crate::model::{probabilities_for, Circuit, GateSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    CoherentOnly,
    CoherentDepolarizing,
}

/// Whether depolarization acts on the whole register or qubit by qubit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepolarizationScope {
    #[default]
    Global,
    Local,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Standard deviation of each Hamiltonian generator weight.
    pub sigma: f64,
    /// Depolarization rate per gate.
    pub eta: f64,
    pub seed: u64,
    #[serde(default)]
    pub scope: DepolarizationScope,
}

impl NoiseSpec {
    pub fn coherent(sigma: f64, seed: u64) -> Self {
        NoiseSpec { kind: NoiseKind::CoherentOnly, sigma, eta: 0.0, seed, scope: DepolarizationScope::Global }
    }

    pub fn coherent_depolarizing(sigma: f64, eta: f64, seed: u64) -> Self {
        NoiseSpec { kind: NoiseKind::CoherentDepolarizing, sigma, eta, seed, scope: DepolarizationScope::Global }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(GstError::InvalidArgument(format!("sigma must be ≥ 0, got {}", self.sigma)));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(GstError::InvalidArgument(format!("eta must be in [0, 1), got {}", self.eta)));
        }
        Ok(())
    }
}

/// `exp(Σ_a h_a H_a)` over the non-identity Pauli strings, `h.len() == dim − 1`.
pub fn hamiltonian_error(dim: usize, h: &[f64]) -> Result<DMatrix<f64>> {
    let n = qubits_for_superop_dim(dim).ok_or(GstError::InvalidGateSet(format!("dimension {dim} is not 4^n")))?;
    if h.len() != dim - 1 {
        return Err(GstError::DimensionMismatch { expected: dim - 1, found: h.len() });
    }
    let mut gen = DMatrix::zeros(dim, dim);
    for (a, &w) in h.iter().enumerate() {
        if w != 0.0 {
            gen += hamiltonian_generator(n, a + 1) * w;
        }
    }
    Ok(gen.exp())
}

/// `diag(1, 1−η, …, 1−η)`, or its tensor product over qubits for local scope.
pub fn depolarizing(dim: usize, eta: f64, scope: DepolarizationScope) -> Result<DMatrix<f64>> {
    let n = qubits_for_superop_dim(dim).ok_or(GstError::InvalidGateSet(format!("dimension {dim} is not 4^n")))?;
    let single = |d: usize| {
        let mut m = DMatrix::identity(d, d) * (1.0 - eta);
        m[(0, 0)] = 1.0;
        m
    };
    Ok(match scope {
        DepolarizationScope::Global => single(dim),
        DepolarizationScope::Local => (0..n).fold(DMatrix::identity(1, 1), |acc, _| acc.kronecker(&single(4))),
    })
}

/// Each gate becomes `D_η · exp(Σ h_a H_a) · G` with fresh `h_a ~ N(0, σ)`.
/// SPAM is left untouched.
pub fn sample_noisy_gateset(target: &GateSet, spec: &NoiseSpec) -> Result<GateSet> {
    spec.validate()?;
    let dim = target.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, spec.sigma).map_err(|e| GstError::InvalidArgument(e.to_string()))?;
    let depol = match spec.kind {
        NoiseKind::CoherentDepolarizing if spec.eta > 0.0 => Some(depolarizing(dim, spec.eta, spec.scope)?),
        _ => None,
    };
    let mut weights = Vec::with_capacity(target.n_gates());
    for _ in 0..target.n_gates() {
        let h: Vec<f64> = (0..dim - 1).map(|_| normal.sample(&mut rng)).collect();
        weights.push(h);
    }
    let mut k = 0;
    target.map_gates(|_, g| {
        let h = &weights[k];
        k += 1;
        let mut out = if h.iter().all(|&w| w == 0.0) {
            g.clone()
        } else {
            hamiltonian_error(dim, h).expect("dimension checked") * g
        };
        if let Some(d) = &depol {
            out = d * out;
        }
        out
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub circuit: Circuit,
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub shots: u64,
    pub rows: Vec<DatasetRow>,
}

fn checked_probabilities(gs: &GateSet, c: &Circuit) -> Result<Vec<f64>> {
    let p = probabilities_for(gs, &gs.resolve(c)?);
    if let Some(&bad) = p.iter().find(|&&v| v < -1e-9) {
        return Err(GstError::NegativeProbability(bad));
    }
    Ok(p.iter().map(|&v| v.clamp(0.0, 1.0)).collect())
}

/// Multinomial draw by sequential conditional binomials.
fn multinomial(rng: &mut ChaCha8Rng, n: u64, p: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; p.len()];
    let mut remaining = n;
    let mut mass: f64 = p.iter().sum();
    for (i, &pi) in p.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == p.len() {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { (pi / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(remaining, q).expect("q in [0, 1]").sample(rng);
        counts[i] = k;
        remaining -= k;
        mass -= pi;
    }
    counts
}

/// Draw outcome counts for every circuit; circuit `c` uses RNG stream `c`.
pub fn simulate_dataset(gs: &GateSet, circuits: &[Circuit], shots: u64, seed: u64) -> Result<Dataset> {
    let rows = circuits
        .par_iter()
        .enumerate()
        .map(|(idx, c)| {
            let p = checked_probabilities(gs, c)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64);
            Ok(DatasetRow { circuit: c.clone(), counts: multinomial(&mut rng, shots, &p) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset { shots, rows })
}

/// Multinomial log-likelihood of the dataset under `gs`, with probabilities
/// clipped from below at the Fisher clip floor.
pub fn log_likelihood(gs: &GateSet, data: &Dataset) -> Result<f64> {
    let terms = data
        .rows
        .par_iter()
        .map(|row| {
            let p = probabilities_for(gs, &gs.resolve(&row.circuit)?);
            if p.len() != row.counts.len() {
                return Err(GstError::DimensionMismatch { expected: p.len(), found: row.counts.len() });
            }
            let n: u64 = row.counts.iter().sum();
            let mut l = ln_gamma(n as f64 + 1.0);
            for (&k, &pi) in row.counts.iter().zip(p.iter()) {
                l -= ln_gamma(k as f64 + 1.0);
                if k > 0 {
                    l += k as f64 * pi.max(PROB_CLIP).ln();
                }
            }
            Ok(l)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum())
}

impl Dataset {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Whitespace-separated table: circuit string then counts in effect order.
    pub fn to_text(&self) -> String {
        let mut s = format!("## shots {}\n", self.shots);
        for r in &self.rows {
            s.push_str(&r.circuit.to_string());
            for c in &r.counts {
                s.push(' ');
                s.push_str(&c.to_string());
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut shots = None;
        let mut rows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix("## shots") {
                shots = Some(rest.trim().parse().map_err(|_| GstError::Parse(line.to_string()))?);
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let circuit = Circuit::parse(parts.next().unwrap_or_default())?;
            let counts = parts
                .map(|t| t.parse::<u64>().map_err(|_| GstError::Parse(format!("bad count {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(DatasetRow { circuit, counts });
        }
        let shots = match shots {
            Some(s) => s,
            None => rows.first().map(|r| r.counts.iter().sum()).unwrap_or(0),
        };
        Ok(Dataset { shots, rows })
    }
}

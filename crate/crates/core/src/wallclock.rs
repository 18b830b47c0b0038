//! Wall-clock cost of running a design: circuit execution plus batch upload.
//!
//! Circuits are serial gate-label sequences, so every label is one layer. A
//! layer costs `t_2q` when its gate acts on two or more qubits and `t_1q`
//! otherwise (idles included).

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::basis::qubit_support;
use crate::error::{GstError, Result};
use crate::model::{Circuit, GateSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub name: String,
    /// Seconds.
    pub t_1q: f64,
    pub t_2q: f64,
    pub t_measure_reset: f64,
    pub t_latency: f64,
    pub circuits_per_batch: u64,
    pub shots_per_circuit_per_batch: u64,
}

impl DeviceParams {
    pub fn transmon() -> Self {
        DeviceParams {
            name: "transmon".into(),
            t_1q: 20e-9,
            t_2q: 200e-9,
            t_measure_reset: 1e-6,
            t_latency: 1.0,
            circuits_per_batch: 100,
            shots_per_circuit_per_batch: 100,
        }
    }

    pub fn trapped_ion() -> Self {
        DeviceParams {
            name: "trapped-ion".into(),
            t_1q: 10e-6,
            t_2q: 200e-6,
            t_measure_reset: 3.5e-3,
            t_latency: 1.0,
            circuits_per_batch: 200,
            shots_per_circuit_per_batch: 100,
        }
    }

    pub fn simos() -> Self {
        DeviceParams {
            name: "simos".into(),
            t_1q: 0.5e-6,
            t_2q: 1e-6,
            t_measure_reset: 200e-6,
            t_latency: 300.0,
            circuits_per_batch: 2500,
            shots_per_circuit_per_batch: 100,
        }
    }

    pub fn builtin() -> Vec<DeviceParams> {
        vec![Self::transmon(), Self::trapped_ion(), Self::simos()]
    }

    pub fn validate(&self) -> Result<()> {
        let times = [self.t_1q, self.t_2q, self.t_measure_reset, self.t_latency];
        if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) || self.circuits_per_batch == 0 || self.shots_per_circuit_per_batch == 0 {
            return Err(GstError::InvalidArgument(format!("device `{}`: all parameters must be positive", self.name)));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let dev: DeviceParams = serde_json::from_str(s)?;
        dev.validate()?;
        Ok(dev)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device serializes")
    }
}

/// Labels whose gates act on two or more qubits.
pub fn two_qubit_labels(gs: &GateSet) -> HashSet<String> {
    gs.labels()
        .iter()
        .filter(|l| qubit_support(gs.gate(l).expect("own label").matrix(), 1e-9).len() >= 2)
        .cloned()
        .collect()
}

/// Per-label layer time for a gate set on a device.
pub fn label_times(gs: &GateSet, dev: &DeviceParams) -> HashMap<String, f64> {
    let two = two_qubit_labels(gs);
    gs.labels()
        .iter()
        .map(|l| (l.clone(), if two.contains(l) { dev.t_2q } else { dev.t_1q }))
        .collect()
}

/// `Σ_c N_shots · (t_measure_reset + Σ_layers t_layer)`.
pub fn circuit_exec_time(circuits: &[Circuit], n_shots: u64, times: &HashMap<String, f64>, dev: &DeviceParams) -> Result<f64> {
    let mut total = 0.0;
    for c in circuits {
        let mut t = dev.t_measure_reset;
        for l in c.labels() {
            t += times.get(l).ok_or_else(|| GstError::UnknownLabel(l.clone()))?;
        }
        total += n_shots as f64 * t;
    }
    Ok(total)
}

/// `t_latency · ⌈N_circ / circuits_per_batch⌉ · ⌈N_shots / shots_per_circuit_per_batch⌉`.
pub fn upload_time(n_circ: u64, n_shots: u64, dev: &DeviceParams) -> f64 {
    let batches = n_circ.div_ceil(dev.circuits_per_batch);
    let rounds = n_shots.div_ceil(dev.shots_per_circuit_per_batch);
    dev.t_latency * (batches * rounds) as f64
}

/// Summary input for approximate estimates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircuitCounts {
    /// (depth, number of circuits with that depth).
    pub depth_histogram: Vec<(usize, u64)>,
    /// Fraction of layers that are two-qubit gates.
    pub two_qubit_fraction: f64,
}

impl CircuitCounts {
    pub fn n_circuits(&self) -> u64 {
        self.depth_histogram.iter().map(|(_, n)| n).sum()
    }

    /// Histogram and two-qubit fraction of an explicit circuit list.
    pub fn from_circuits(circuits: &[Circuit], two_qubit: &HashSet<String>) -> Self {
        let mut hist: HashMap<usize, u64> = HashMap::new();
        let (mut layers, mut two) = (0usize, 0usize);
        for c in circuits {
            *hist.entry(c.depth()).or_default() += 1;
            layers += c.depth();
            two += c.labels().iter().filter(|l| two_qubit.contains(*l)).count();
        }
        let mut depth_histogram: Vec<(usize, u64)> = hist.into_iter().collect();
        depth_histogram.sort_unstable();
        let two_qubit_fraction = if layers == 0 { 0.0 } else { two as f64 / layers as f64 };
        CircuitCounts { depth_histogram, two_qubit_fraction }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    /// Every circuit's layers are timed label by label.
    Exact,
    /// Every layer costs the mean `f·t_2q + (1 − f)·t_1q` for the given
    /// two-qubit fraction `f`.
    Approximate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WallclockEstimate {
    pub device: String,
    pub mode: EstimateMode,
    pub n_circuits: u64,
    pub n_shots: u64,
    pub t_c: f64,
    pub t_u: f64,
    pub total: f64,
    pub note: String,
}

pub fn estimate_exact(gs: &GateSet, circuits: &[Circuit], n_shots: u64, dev: &DeviceParams) -> Result<WallclockEstimate> {
    dev.validate()?;
    let times = label_times(gs, dev);
    let t_c = circuit_exec_time(circuits, n_shots, &times, dev)?;
    let n = circuits.len() as u64;
    let t_u = upload_time(n, n_shots, dev);
    Ok(WallclockEstimate {
        device: dev.name.clone(),
        mode: EstimateMode::Exact,
        n_circuits: n,
        n_shots,
        t_c,
        t_u,
        total: t_c + t_u,
        note: "one layer per gate label".into(),
    })
}

pub fn estimate_approximate(counts: &CircuitCounts, n_shots: u64, dev: &DeviceParams) -> Result<WallclockEstimate> {
    dev.validate()?;
    let f = counts.two_qubit_fraction;
    if !(0.0..=1.0).contains(&f) {
        return Err(GstError::InvalidArgument(format!("two-qubit fraction {f} outside [0, 1]")));
    }
    let layer = f * dev.t_2q + (1.0 - f) * dev.t_1q;
    let t_c: f64 = counts
        .depth_histogram
        .iter()
        .map(|&(depth, n)| n as f64 * n_shots as f64 * (dev.t_measure_reset + depth as f64 * layer))
        .sum();
    let n = counts.n_circuits();
    let t_u = upload_time(n, n_shots, dev);
    Ok(WallclockEstimate {
        device: dev.name.clone(),
        mode: EstimateMode::Approximate,
        n_circuits: n,
        n_shots,
        t_c,
        t_u,
        total: t_c + t_u,
        note: format!("every layer assumed to take the mean layer time at two-qubit fraction {f:.3}"),
    })
}

/// Durations the way a results table reports them: seconds, minutes or hours.
pub fn human_duration(seconds: f64) -> String {
    if seconds < 60.0 {
        format!("{seconds:.3} s")
    } else if seconds < 3600.0 {
        format!("{:.1} min", seconds / 60.0)
    } else {
        format!("{:.1} hr", seconds / 3600.0)
    }
}

/// Rows are devices, columns are designs; speedups relative to the first
/// design.
pub fn format_table(design_names: &[String], rows: &[(String, Vec<WallclockEstimate>)]) -> String {
    let mut out = format!("{:<14}", "device");
    for (i, name) in design_names.iter().enumerate() {
        out += &format!(" | {name:>18}");
        if i > 0 {
            out += &format!(" {:>8}", "speedup");
        }
    }
    out.push('\n');
    for (device, ests) in rows {
        out += &format!("{device:<14}");
        for (i, e) in ests.iter().enumerate() {
            out += &format!(" | {:>18}", human_duration(e.total));
            if i > 0 {
                out += &format!(" {:>7.1}x", ests[0].total / e.total);
            }
        }
        out.push('\n');
    }
    out
}

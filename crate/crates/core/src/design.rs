//! Plaquette-structured GST experiment designs.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{GstError, Result};
use crate::fpr::{random_pairs, KeepRounding};

/// RNG stream key for LGST plaquettes under random FPR (minus the middle index).
const LGST_STREAM: usize = u32::MAX as usize;
use crate::model::{Circuit, CircuitStructure, GateSet};

/// Largest `p` with `depth(germ)·p ≤ L`; zero when the germ is longer than `L`.
pub fn germ_power(germ: &Circuit, max_depth: usize) -> usize {
    match germ.depth() {
        0 => 0,
        d => max_depth / d,
    }
}

/// Strictly increasing list of maximum depths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DepthSchedule(Vec<usize>);

impl DepthSchedule {
    pub fn new(maxdepths: Vec<usize>) -> Result<Self> {
        if maxdepths.is_empty() {
            return Err(GstError::Empty("depth schedule"));
        }
        if maxdepths[0] == 0 || maxdepths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GstError::InvalidArgument(format!(
                "depth schedule must be positive and strictly increasing: {maxdepths:?}"
            )));
        }
        Ok(DepthSchedule(maxdepths))
    }

    /// `[1, 2, 4, …]` up to and including the largest power of two `≤ l_max`.
    pub fn powers_of_two(l_max: usize) -> Result<Self> {
        if l_max == 0 {
            return Err(GstError::InvalidArgument("L_max must be positive".into()));
        }
        Self::new(std::iter::successors(Some(1usize), |l| l.checked_mul(2)).take_while(|&l| l <= l_max).collect())
    }

    pub fn depths(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> usize {
        *self.0.last().expect("nonempty schedule")
    }

    /// Schedule truncated to depths `≤ l`.
    pub fn truncated(&self, l: usize) -> Result<Self> {
        Self::new(self.0.iter().copied().filter(|&x| x <= l).collect())
    }
}

impl TryFrom<Vec<usize>> for DepthSchedule {
    type Error = GstError;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DepthSchedule> for Vec<usize> {
    fn from(s: DepthSchedule) -> Self {
        s.0
    }
}

/// How many fiducial pairs each plaquette keeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FprPolicy {
    Full,
    /// One list of `(prep, meas)` fiducial indices per germ.
    PerGerm { pairs: Vec<Vec<(usize, usize)>> },
    /// Independent random subsets per germ power.
    Random {
        gamma: f64,
        seed: u64,
        #[serde(default)]
        rounding: KeepRounding,
    },
}

/// Which LGST circuits a design starts with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LgstLayer {
    /// Every `F_j H_i` and `F_j G_k H_i` for full and per-germ policies; under
    /// random FPR each LGST plaquette is thinned like a germ plaquette.
    #[default]
    Auto,
    Full,
    Omit,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DesignOptions {
    pub lgst: LgstLayer,
}

/// LGST circuits sharing one middle operation (nothing, or one bare gate).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LgstPlaquette {
    pub gate: Option<String>,
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plaquette {
    pub germ: usize,
    /// Index into the depth schedule.
    pub depth: usize,
    pub max_depth: usize,
    pub power: usize,
    /// `(prep fiducial, meas fiducial)` index pairs.
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Lgst,
    Plaquette(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignCircuit {
    pub circuit: Circuit,
    /// Index into the schedule of the first depth at which the circuit appears.
    pub bucket: usize,
    pub sources: Vec<Source>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDesign {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gateset_ref: Option<String>,
    pub prep_fiducials: Vec<Circuit>,
    pub meas_fiducials: Vec<Circuit>,
    pub germs: Vec<Circuit>,
    pub maxdepths: DepthSchedule,
    pub fpr_policy: FprPolicy,
    pub lgst: Vec<LgstPlaquette>,
    pub plaquettes: Vec<Plaquette>,
    pub circuits: Vec<DesignCircuit>,
}

struct Builder {
    circuits: Vec<DesignCircuit>,
    index: HashMap<Circuit, usize>,
}

impl Builder {
    fn add(&mut self, c: Circuit, bucket: usize, source: Source) {
        match self.index.get(&c) {
            Some(&i) => {
                let sources = &mut self.circuits[i].sources;
                if !sources.contains(&source) {
                    sources.push(source);
                }
            }
            None => {
                self.index.insert(c.clone(), self.circuits.len());
                self.circuits.push(DesignCircuit { circuit: c, bucket, sources: vec![source] });
            }
        }
    }
}

fn sandwich(prep: &Circuit, middle: &Circuit, meas: &Circuit) -> Circuit {
    prep.concat(middle).concat(meas)
}

fn lgst_middles(gate_labels: &[String]) -> Vec<Option<String>> {
    std::iter::once(None).chain(gate_labels.iter().cloned().map(Some)).collect()
}

fn middle_circuit(gate: &Option<String>) -> Circuit {
    match gate {
        Some(g) => Circuit::new([g.as_str()]),
        None => Circuit::empty(),
    }
}

/// LGST circuits: every `F_j H_i` and every `F_j G_k H_i`.
pub fn lgst_circuits(gate_labels: &[String], prep: &[Circuit], meas: &[Circuit]) -> Vec<Circuit> {
    let mut out = Vec::new();
    for m in lgst_middles(gate_labels) {
        let m = middle_circuit(&m);
        for f in prep {
            for h in meas {
                out.push(sandwich(f, &m, h));
            }
        }
    }
    out
}

/// Build a deduplicated design: LGST circuits first, then one plaquette per
/// germ and depth whose power is positive and differs from the previous depth.
pub fn build_design(
    gs: &GateSet,
    prep: &[Circuit],
    meas: &[Circuit],
    germs: &[Circuit],
    schedule: &DepthSchedule,
    policy: &FprPolicy,
) -> Result<ExperimentDesign> {
    build_design_with(gs, prep, meas, germs, schedule, policy, &DesignOptions::default())
}

pub fn build_design_with(
    gs: &GateSet,
    prep: &[Circuit],
    meas: &[Circuit],
    germs: &[Circuit],
    schedule: &DepthSchedule,
    policy: &FprPolicy,
    options: &DesignOptions,
) -> Result<ExperimentDesign> {
    if prep.is_empty() {
        return Err(GstError::Empty("prep fiducials"));
    }
    if meas.is_empty() {
        return Err(GstError::Empty("measurement fiducials"));
    }
    for c in prep.iter().chain(meas).chain(germs) {
        gs.resolve(c)?;
    }
    if let Some(g) = germs.iter().find(|g| g.is_empty()) {
        return Err(GstError::InvalidArgument(format!("empty germ {g}")));
    }
    let full: Vec<(usize, usize)> = (0..prep.len()).flat_map(|j| (0..meas.len()).map(move |i| (j, i))).collect();
    if let FprPolicy::PerGerm { pairs } = policy {
        if pairs.len() != germs.len() {
            return Err(GstError::DimensionMismatch { expected: germs.len(), found: pairs.len() });
        }
        for p in pairs.iter().flatten() {
            if p.0 >= prep.len() || p.1 >= meas.len() {
                return Err(GstError::InvalidArgument(format!("fiducial pair {p:?} out of range")));
            }
        }
    }

    let mut b = Builder { circuits: Vec::new(), index: HashMap::new() };
    let mut lgst = Vec::new();
    if options.lgst != LgstLayer::Omit {
        for (k, gate) in lgst_middles(gs.labels()).into_iter().enumerate() {
            let pairs = match (options.lgst, policy) {
                (LgstLayer::Auto, FprPolicy::Random { gamma, seed, rounding }) => {
                    random_pairs(prep.len(), meas.len(), LGST_STREAM - k, 0, *gamma, *seed, *rounding)?
                }
                _ => full.clone(),
            };
            let m = middle_circuit(&gate);
            for &(j, i) in &pairs {
                b.add(sandwich(&prep[j], &m, &meas[i]), 0, Source::Lgst);
            }
            lgst.push(LgstPlaquette { gate, pairs });
        }
    }

    let mut plaquettes = Vec::new();
    for (l, &max_depth) in schedule.depths().iter().enumerate() {
        for (k, germ) in germs.iter().enumerate() {
            let power = germ_power(germ, max_depth);
            let prev = if l == 0 { 0 } else { germ_power(germ, schedule.depths()[l - 1]) };
            if power == 0 || power == prev {
                continue;
            }
            let pairs = match policy {
                FprPolicy::Full => full.clone(),
                FprPolicy::PerGerm { pairs } => pairs[k].clone(),
                FprPolicy::Random { gamma, seed, rounding } => {
                    random_pairs(prep.len(), meas.len(), k, power, *gamma, *seed, *rounding)?
                }
            };
            if pairs.is_empty() {
                return Err(GstError::EmptyPlaquette { germ: k, depth: max_depth });
            }
            let pidx = plaquettes.len();
            let body = germ.repeat(power);
            for &(j, i) in &pairs {
                let c = sandwich(&prep[j], &body, &meas[i]).with_structure(CircuitStructure {
                    prep_fiducial: j,
                    germ: k,
                    power,
                    meas_fiducial: i,
                });
                b.add(c, l, Source::Plaquette(pidx));
            }
            plaquettes.push(Plaquette { germ: k, depth: l, max_depth, power, pairs });
        }
    }

    Ok(ExperimentDesign {
        gateset_ref: None,
        prep_fiducials: prep.to_vec(),
        meas_fiducials: meas.to_vec(),
        germs: germs.to_vec(),
        maxdepths: schedule.clone(),
        fpr_policy: policy.clone(),
        lgst,
        plaquettes,
        circuits: b.circuits,
    })
}

impl ExperimentDesign {
    pub fn circuit_count(&self) -> usize {
        self.circuits.len()
    }

    /// Cumulative circuit count at each scheduled depth.
    pub fn count_by_depth(&self) -> Vec<(usize, usize)> {
        let mut per = vec![0usize; self.maxdepths.len()];
        for c in &self.circuits {
            per[c.bucket] += 1;
        }
        let mut acc = 0;
        self.maxdepths
            .depths()
            .iter()
            .zip(per)
            .map(|(&l, n)| {
                acc += n;
                (l, acc)
            })
            .collect()
    }

    pub fn circuit_list(&self) -> Vec<Circuit> {
        self.circuits.iter().map(|c| c.circuit.clone()).collect()
    }

    /// Circuits in buckets `≤ l`, i.e. the design truncated at max depth `l`.
    pub fn circuits_up_to(&self, l: usize) -> impl Iterator<Item = &DesignCircuit> {
        let last = self.maxdepths.depths().iter().take_while(|&&x| x <= l).count();
        self.circuits.iter().filter(move |c| c.bucket < last)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("design serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// One circuit per line, labels separated by dots, `{}` for the empty circuit.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.circuits {
            writeln!(s, "{}", c.circuit).unwrap();
        }
        s
    }
}

/// Parse a newline-delimited circuit list, skipping blank lines and `#` comments.
pub fn parse_circuit_list(text: &str) -> Result<Vec<Circuit>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(Circuit::parse)
        .collect()
}

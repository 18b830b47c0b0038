use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gst_design::design::{build_design, DepthSchedule, ExperimentDesign, FprPolicy};
use gst_design::fiducials::{fiducial_candidates, select_fiducials, FiducialKind};
use gst_design::fisher::{
    certify_design, fisher_series, perturbed_evaluation_point, regularize_spam, CertifyThresholds, SeriesKind,
    SPAM_REGULARIZATION,
};
use gst_design::fpr::{per_germ_fpr, random_fpr, KeepRounding, PerGermFprConfig, DEFAULT_SAMPLES_PER_SIZE, EPS_ONE_QUBIT, EPS_TWO_QUBIT};
use gst_design::germs::{germs_for_mode, GermMode, GermScoreKind, GermSelectConfig, DEFAULT_MAX_GERM_LENGTH};
use gst_design::noise::{sample_noisy_gateset, simulate_dataset, DepolarizationScope, NoiseKind, NoiseSpec};
use gst_design::stdsets;
use gst_design::wallclock::{estimate_exact, format_table, DeviceParams};
use gst_design::{Circuit, GateSet, GstError};

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_INPUT: u8 = 4;
const EXIT_NOT_IC: u8 = 5;
const EXIT_NOT_AC: u8 = 6;
const EXIT_NUMERICAL: u8 = 7;
const EXIT_NOT_CERTIFIED: u8 = 8;

#[derive(Parser)]
#[command(name = "gst-design", version, about = "Build, reduce and certify GST experiment designs")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "GST_DESIGN_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a design: fiducials, germs, fiducial pair reduction, circuit list.
    Design(DesignArgs),
    /// Fisher-information certification of a design.
    Certify(CertifyArgs),
    /// Sample a noisy model and simulate counts for a design.
    Simulate(SimulateArgs),
    /// Wall-clock estimates for designs on devices.
    Wallclock(WallclockArgs),
    /// Select prep and measurement fiducials.
    Fiducials(FiducialArgs),
    /// Select germs.
    Germs(GermArgs),
    /// Fiducial pair reduction for a germ list.
    Fpr(FprArgs),
}

#[derive(Args)]
struct GatesetArg {
    /// Gate set JSON file, or `xyi` / `xycphase` for the bundled targets.
    #[arg(long)]
    gateset: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum FprMethod {
    Full,
    PerGerm,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rounding {
    Floor,
    Ceil,
}

impl From<Rounding> for KeepRounding {
    fn from(r: Rounding) -> Self {
        match r {
            Rounding::Floor => KeepRounding::Floor,
            Rounding::Ceil => KeepRounding::Ceil,
        }
    }
}

#[derive(Args)]
struct DesignArgs {
    #[command(flatten)]
    gs: GatesetArg,
    /// `robust`, `standard`, `bare`, or a germ list file.
    #[arg(long, default_value = "standard")]
    germs: String,
    /// `standard` (bundled targets only), `select`, or a fiducial list file.
    #[arg(long)]
    fiducials: Option<String>,
    #[arg(long, value_enum, default_value = "full")]
    fpr: FprMethod,
    /// Per-germ eigenvalue ratio threshold (defaults to 1/30 for one qubit, 1/2 otherwise).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_enum, default_value = "floor")]
    rounding: Rounding,
    #[arg(long = "Lmax", alias = "lmax", default_value_t = 1024)]
    l_max: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "design.json")]
    output: PathBuf,
    /// Also write the circuit list, one circuit per line.
    #[arg(long)]
    circuits_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalPoint {
    Perturbed,
    Target,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesArg {
    Cumulative,
    Incremental,
    Projected,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    gs: GatesetArg,
    #[arg(long)]
    design: PathBuf,
    #[arg(long, value_enum, default_value = "perturbed")]
    eval: EvalPoint,
    /// Seed of the perturbed evaluation point.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1000.0)]
    shots: f64,
    #[arg(long, default_value_t = 0.8)]
    slope: f64,
    /// Spectra written to `--csv`.
    #[arg(long, value_enum, default_value = "cumulative")]
    series: SeriesArg,
    /// Operation label for projected spectra (`prep`, `meas`, `spam` or a gate).
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Exit with a distinct code when the design is not well constructed.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    CoherentOnly,
    CoherentDepolarizing,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Global,
    Local,
}

#[derive(Clone, Copy, ValueEnum)]
enum DataFormat {
    Json,
    Text,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    gs: GatesetArg,
    #[arg(long)]
    design: PathBuf,
    #[arg(long, value_enum, default_value = "coherent-depolarizing")]
    noise: NoiseArg,
    #[arg(long, default_value_t = 0.01)]
    sigma: f64,
    #[arg(long, default_value_t = 0.001)]
    eta: f64,
    #[arg(long, value_enum, default_value = "global")]
    scope: ScopeArg,
    #[arg(long, default_value_t = 1000)]
    shots: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "dataset.json")]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: DataFormat,
    /// Also write the sampled noisy gate set.
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Args)]
struct WallclockArgs {
    #[command(flatten)]
    gs: GatesetArg,
    /// Design files; speedups are relative to the first.
    #[arg(long, required = true, num_args = 1..)]
    design: Vec<PathBuf>,
    /// Device files (defaults to the bundled transmon, trapped-ion and SiMOS devices).
    #[arg(long, num_args = 1..)]
    device: Vec<PathBuf>,
    #[arg(long, default_value_t = 100)]
    shots: u64,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Prep,
    Meas,
    Both,
}

#[derive(Args)]
struct FiducialArgs {
    #[command(flatten)]
    gs: GatesetArg,
    #[arg(long, value_enum, default_value = "both")]
    kind: KindArg,
    /// Fixed set size (default: smallest set meeting the rank requirement).
    #[arg(long)]
    count: Option<usize>,
    /// Candidate pool file (default: built-in pool for the qubit count).
    #[arg(long)]
    pool: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Robust,
    Standard,
    Bare,
}

impl From<ModeArg> for GermMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Robust => GermMode::Robust,
            ModeArg::Standard => GermMode::Standard,
            ModeArg::Bare => GermMode::Bare,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScoreArg {
    All,
    Worst,
}

#[derive(Args)]
struct GermArgs {
    #[command(flatten)]
    gs: GatesetArg,
    #[arg(long, value_enum, default_value = "standard")]
    mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_MAX_GERM_LENGTH)]
    max_length: usize,
    #[arg(long, value_enum, default_value = "all")]
    score: ScoreArg,
    #[arg(long, default_value_t = 0.0)]
    length_penalty: f64,
    #[arg(long, default_value_t = 0.0)]
    count_penalty: f64,
    /// Seed of the perturbed models (robust mode).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FprArgs {
    #[command(flatten)]
    gs: GatesetArg,
    /// Germ list file.
    #[arg(long)]
    germs: PathBuf,
    /// `standard`, or a fiducial list file used for both prep and measurement.
    #[arg(long)]
    fiducials: Option<String>,
    #[arg(long, value_enum, default_value = "per-germ")]
    method: FprMethod,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_SIZE)]
    samples_per_size: usize,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_enum, default_value = "floor")]
    rounding: Rounding,
    #[arg(long = "Lmax", alias = "lmax", default_value_t = 1024)]
    l_max: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Failure with its exit code.
struct Failure(u8, String);

impl From<GstError> for Failure {
    fn from(e: GstError) -> Self {
        let code = match &e {
            GstError::Io(_) | GstError::Json(_) | GstError::Parse(_) => EXIT_IO,
            GstError::NotInformationallyComplete { .. } => EXIT_NOT_IC,
            GstError::NotAmplificationallyComplete { .. } => EXIT_NOT_AC,
            GstError::Eigensolver(_) | GstError::IllConditionedBasis(_) | GstError::NegativeProbability(_) | GstError::SingularTransform(_) => {
                EXIT_NUMERICAL
            }
            _ => EXIT_INPUT,
        };
        Failure(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_IO, e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn require_seed(seed: Option<u64>, what: &str) -> std::result::Result<u64, Failure> {
    seed.ok_or_else(|| usage(format!("--seed is required for {what}")))
}

/// Missing input files are usage errors.
fn input(path: &Path) -> std::result::Result<&Path, Failure> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(usage(format!("input file not found: {}", path.display())))
    }
}

fn load_gateset(arg: &str) -> std::result::Result<GateSet, Failure> {
    Ok(match arg {
        "xyi" => stdsets::xyi(),
        "xycphase" => stdsets::xycphase(),
        path => GateSet::load(input(Path::new(path))?)?,
    })
}

fn bundled_fiducials(arg: &str) -> Option<Vec<Circuit>> {
    match arg {
        "xyi" => Some(stdsets::xyi_fiducials()),
        "xycphase" => Some(stdsets::xycphase_fiducials()),
        _ => None,
    }
}

/// A JSON list of label arrays, or an object holding one under `key`.
fn load_circuits(path: &Path, key: &str) -> std::result::Result<Vec<Circuit>, Failure> {
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(input(path)?)?).map_err(GstError::from)?;
    let list = match value.get(key) {
        Some(inner) => inner.clone(),
        None => value,
    };
    let labels: Vec<Vec<String>> = serde_json::from_value(list).map_err(GstError::from)?;
    Ok(labels.into_iter().map(Circuit::from).collect())
}

fn circuit_json(cs: &[Circuit]) -> serde_json::Value {
    json!(cs.iter().map(|c| c.labels().to_vec()).collect::<Vec<_>>())
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("json value");
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn default_eps(gs: &GateSet) -> f64 {
    if gs.dim() <= 4 {
        EPS_ONE_QUBIT
    } else {
        EPS_TWO_QUBIT
    }
}

/// Fiducials for a design: explicit file, greedy selection, or the bundled list.
fn resolve_fiducials(gs_arg: &str, gs: &GateSet, choice: Option<&str>) -> std::result::Result<(Vec<Circuit>, Vec<Circuit>), Failure> {
    let choice = choice.unwrap_or(if bundled_fiducials(gs_arg).is_some() { "standard" } else { "select" });
    match choice {
        "standard" => {
            let f = bundled_fiducials(gs_arg).ok_or_else(|| usage("standard fiducials exist only for the bundled gate sets"))?;
            Ok((f.clone(), f))
        }
        "select" => {
            let pool = fiducial_candidates(gs);
            let prep = select_fiducials(gs, &pool, FiducialKind::Prep, None)?.fiducials;
            let meas = select_fiducials(gs, &pool, FiducialKind::Meas, None)?.fiducials;
            Ok((prep, meas))
        }
        path => {
            let f = load_circuits(Path::new(path), "fiducials")?;
            Ok((f.clone(), f))
        }
    }
}

fn cmd_design(a: DesignArgs) -> Outcome {
    let gs = load_gateset(&a.gs.gateset)?;
    let (prep, meas) = resolve_fiducials(&a.gs.gateset, &gs, a.fiducials.as_deref())?;
    let germs = match a.germs.as_str() {
        "robust" => {
            let seed = require_seed(a.seed, "robust germ selection")?;
            germs_for_mode(&gs, GermMode::Robust, DEFAULT_MAX_GERM_LENGTH, seed, &GermSelectConfig::default())?.germs
        }
        "standard" => germs_for_mode(&gs, GermMode::Standard, DEFAULT_MAX_GERM_LENGTH, 0, &GermSelectConfig::default())?.germs,
        "bare" => stdsets::bare_germs(&gs),
        path => load_circuits(Path::new(path), "germs")?,
    };
    let schedule = DepthSchedule::powers_of_two(a.l_max)?;
    let policy = match a.fpr {
        FprMethod::Full => FprPolicy::Full,
        FprMethod::PerGerm => {
            let seed = require_seed(a.seed, "per-germ FPR")?;
            let cfg = PerGermFprConfig::new(a.eps.unwrap_or_else(|| default_eps(&gs)), seed);
            per_germ_fpr(&gs, &prep, &meas, &germs, &cfg)?.policy()
        }
        FprMethod::Random => {
            let seed = require_seed(a.seed, "random FPR")?;
            let gamma = a.gamma.ok_or_else(|| usage("--gamma is required for random FPR"))?;
            FprPolicy::Random { gamma, seed, rounding: a.rounding.into() }
        }
    };
    let mut design = build_design(&gs, &prep, &meas, &germs, &schedule, &policy)?;
    design.gateset_ref = Some(a.gs.gateset.clone());
    design.save(&a.output)?;
    if let Some(p) = &a.circuits_out {
        std::fs::write(p, design.to_text())?;
    }
    println!("germs: {}", germs.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" "));
    println!("{:>6}  {:>10}", "L", "circuits");
    for (l, n) in design.count_by_depth() {
        println!("{l:>6}  {n:>10}");
    }
    println!("wrote {} ({} circuits)", a.output.display(), design.circuit_count());
    Ok(())
}

fn cmd_certify(a: CertifyArgs) -> Outcome {
    let gs = load_gateset(&a.gs.gateset)?;
    let design = ExperimentDesign::load(input(&a.design)?)?;
    let eval = match a.eval {
        EvalPoint::Perturbed => perturbed_evaluation_point(&gs, require_seed(a.seed, "the perturbed evaluation point")?)?,
        EvalPoint::Target => regularize_spam(&gs, SPAM_REGULARIZATION)?,
    };
    let th = CertifyThresholds { slope: a.slope, shots: a.shots, ..CertifyThresholds::default() };
    let report = certify_design(&eval, &design, &th)?;
    if let Some(p) = &a.csv {
        let csv = match a.series {
            SeriesArg::Cumulative => report.to_csv(),
            SeriesArg::Incremental => fisher_series(&eval, &design, a.shots, SeriesKind::Incremental)?.to_csv(),
            SeriesArg::Projected => {
                let label = a.label.clone().ok_or_else(|| usage("--label is required for projected spectra"))?;
                fisher_series(&eval, &design, a.shots, SeriesKind::Projected { label })?.to_csv()
            }
        };
        std::fs::write(p, csv)?;
    }
    if let Some(p) = &a.report {
        std::fs::write(p, serde_json::to_string_pretty(&report).expect("report serializes"))?;
    }
    println!("parameters: {} total, {} non-gauge, {} amplifiable", report.n_params, report.non_gauge, report.amplifiable);
    println!("growing: {}  plateaued: {} (expected SPAM {})", report.growing, report.plateaued, report.expected_spam);
    println!("low-information directions: {} (median {:.3e}, min {:.3e})", report.low_information, report.median_information, report.min_information);
    let verdict = if report.well_constructed { "well constructed" } else { "NOT well constructed" };
    println!("verdict: {verdict}");
    if a.strict && !report.well_constructed {
        return Err(Failure(EXIT_NOT_CERTIFIED, "design failed certification".into()));
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Outcome {
    let gs = load_gateset(&a.gs.gateset)?;
    let design = ExperimentDesign::load(input(&a.design)?)?;
    let seed = require_seed(a.seed, "simulation")?;
    let spec = NoiseSpec {
        kind: match a.noise {
            NoiseArg::CoherentOnly => NoiseKind::CoherentOnly,
            NoiseArg::CoherentDepolarizing => NoiseKind::CoherentDepolarizing,
        },
        sigma: a.sigma,
        eta: a.eta,
        seed,
        scope: match a.scope {
            ScopeArg::Global => DepolarizationScope::Global,
            ScopeArg::Local => DepolarizationScope::Local,
        },
    };
    let noisy = sample_noisy_gateset(&gs, &spec)?;
    let data = simulate_dataset(&noisy, &design.circuit_list(), a.shots, seed)?;
    let text = match a.format {
        DataFormat::Json => data.to_json(),
        DataFormat::Text => data.to_text(),
    };
    std::fs::write(&a.output, text)?;
    if let Some(p) = &a.model_out {
        std::fs::write(p, noisy.to_json())?;
    }
    println!("wrote {} ({} circuits, {} shots each)", a.output.display(), data.rows.len(), a.shots);
    Ok(())
}

fn cmd_wallclock(a: WallclockArgs) -> Outcome {
    let gs = load_gateset(&a.gs.gateset)?;
    let devices = if a.device.is_empty() {
        DeviceParams::builtin()
    } else {
        a.device.iter().map(|p| Ok(DeviceParams::load(input(p)?)?)).collect::<std::result::Result<Vec<_>, Failure>>()?
    };
    let designs = a.design.iter().map(|p| Ok(ExperimentDesign::load(input(p)?)?)).collect::<std::result::Result<Vec<_>, Failure>>()?;
    let names: Vec<String> = a
        .design
        .iter()
        .zip(&designs)
        .map(|(p, d)| format!("{} ({})", p.file_stem().unwrap_or_default().to_string_lossy(), d.circuit_count()))
        .collect();
    let mut rows = Vec::new();
    for dev in &devices {
        let ests = designs
            .iter()
            .map(|d| estimate_exact(&gs, &d.circuit_list(), a.shots, dev))
            .collect::<gst_design::Result<Vec<_>>>()?;
        rows.push((dev.name.clone(), ests));
    }
    print!("{}", format_table(&names, &rows));
    if let Some(p) = &a.json {
        let all: Vec<_> = rows.iter().flat_map(|(_, e)| e.iter()).collect();
        write_json(Some(p), &json!(all))?;
    }
    Ok(())
}

fn cmd_fiducials(a: FiducialArgs) -> Outcome {
    let gs = load_gateset(&a.gs.gateset)?;
    let pool = match &a.pool {
        Some(p) => load_circuits(p, "pool")?,
        None => fiducial_candidates(&gs),
    };
    let kinds = match a.kind {
        KindArg::Prep => vec![FiducialKind::Prep],
        KindArg::Meas => vec![FiducialKind::Meas],
        KindArg::Both => vec![FiducialKind::Prep, FiducialKind::Meas],
    };
    let mut out = serde_json::Map::new();
    for kind in kinds {
        let sel = select_fiducials(&gs, &pool, kind, a.count)?;
        let key = if kind == FiducialKind::Prep { "prep" } else { "meas" };
        out.insert(
            key.into(),
            json!({
                "fiducials": circuit_json(&sel.fiducials),
                "rank": sel.score.rank,
                "required": sel.score.required,
                "score": sel.score.score,
                "spectrum": sel.score.spectrum,
            }),
        );
    }
    write_json(a.output.as_deref(), &serde_json::Value::Object(out))
}

fn cmd_germs(a: GermArgs) -> Outcome {
    let gs = load_gateset(&a.gs.gateset)?;
    let mode: GermMode = a.mode.into();
    let seed = if mode == GermMode::Robust { require_seed(a.seed, "robust germ selection")? } else { a.seed.unwrap_or(0) };
    let cfg = GermSelectConfig {
        score: match a.score {
            ScoreArg::All => GermScoreKind::All,
            ScoreArg::Worst => GermScoreKind::Worst,
        },
        length_penalty: a.length_penalty,
        count_penalty: a.count_penalty,
    };
    let sel = germs_for_mode(&gs, mode, a.max_length, seed, &cfg)?;
    let value = json!({
        "mode": mode,
        "germs": circuit_json(&sel.germs),
        "targets": sel.targets,
        "per_model_amplified": sel.per_model_amplified,
        "trajectory": sel.trajectory,
    });
    write_json(a.output.as_deref(), &value)
}

fn cmd_fpr(a: FprArgs) -> Outcome {
    let gs = load_gateset(&a.gs.gateset)?;
    let germs = load_circuits(&a.germs, "germs")?;
    let (prep, meas) = resolve_fiducials(&a.gs.gateset, &gs, a.fiducials.as_deref())?;
    let value = match a.method {
        FprMethod::Full => return Err(usage("--method must be per-germ or random")),
        FprMethod::PerGerm => {
            let mut cfg = PerGermFprConfig::new(a.eps.unwrap_or_else(|| default_eps(&gs)), require_seed(a.seed, "per-germ FPR")?);
            cfg.samples_per_size = a.samples_per_size;
            let res = per_germ_fpr(&gs, &prep, &meas, &germs, &cfg)?;
            for g in res.germs.iter().filter(|g| g.fallback) {
                eprintln!("warning: no reduced set found for germ {}; keeping the full grid", g.germ);
            }
            serde_json::to_value(&res).map_err(GstError::from)?
        }
        FprMethod::Random => {
            let gamma = a.gamma.ok_or_else(|| usage("--gamma is required for random FPR"))?;
            let seed = require_seed(a.seed, "random FPR")?;
            let schedule = DepthSchedule::powers_of_two(a.l_max)?;
            let depths: Vec<usize> = germs.iter().map(|g| g.depth()).collect();
            let plaquettes = random_fpr(prep.len(), meas.len(), &depths, &schedule, gamma, seed, a.rounding.into())?;
            json!({ "gamma": gamma, "seed": seed, "plaquettes": plaquettes })
        }
    };
    write_json(a.output.as_deref(), &value)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let result = match cli.command {
        Command::Design(a) => cmd_design(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Wallclock(a) => cmd_wallclock(a),
        Command::Fiducials(a) => cmd_fiducials(a),
        Command::Germs(a) => cmd_germs(a),
        Command::Fpr(a) => cmd_fpr(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

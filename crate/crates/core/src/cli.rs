//! Scenario files, built-in scenarios and the `qkd` command line.
//!
//! Scenario files are TOML. Complex numbers are written as `[re, im]`
//! pairs, states either as amplitude vectors or as density matrices, and
//! the channel either by name or as explicit Kraus matrices:
//!
//! ```toml
//! name = "two-qubit copy"
//! key_size = 2
//! alphabet_size = 2
//! bob_dim = 2
//! eve_dim = 2
//!
//! [[states]]
//! letter = 0
//! amplitudes = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
//!
//! [[states]]
//! letter = 1
//! amplitudes = [[0.25, 0.0], [0.433, 0.0], [0.433, 0.0], [0.75, 0.0]]
//!
//! [channel]
//! kind = "identity"
//! ```
//!
//! [`run`] is the whole CLI; the `qkd` binary only forwards to it.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::keysim::{simulate, sweep, CoderChoice, EveChoice, KeySimReport, Scenario, SweepCell};
use crate::qchan::{CqEnsemble, QuantumChannel};
use crate::qinfo::{
    accessible_information, c1, c_k, classical_advantage, holevo_capacity, quantum_condition, ConditionReport,
    OptimizerConfig,
};
use crate::qmat::{pure_state, ComplexMatrix, DensityOperator, StateVector};
use crate::qmeas::ClassicalChannel;

/// `[re, im]`.
pub type ComplexPair = [f64; 2];

/// On-disk form of a [`Scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub key_size: usize,
    pub alphabet_size: usize,
    pub bob_dim: usize,
    pub eve_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<f64>>,
    pub states: Vec<StateSpec>,
    pub channel: ChannelSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub letter: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<ComplexPair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<ComplexPair>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelSpec {
    Identity,
    Depolarizing { lambda: f64 },
    /// Classical letters copied through independent channels to Bob and Eve.
    ClassicalBroadcast { bob: Vec<Vec<f64>>, eve: Vec<Vec<f64>> },
    Kraus { operators: Vec<Vec<Vec<ComplexPair>>> },
}

fn parse_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        line: None,
        field: field.into(),
        message: message.into(),
    }
}

fn to_matrix(rows: &[Vec<ComplexPair>], field: &str) -> Result<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map(Vec::len).unwrap_or(0);
    if r == 0 || c == 0 {
        return Err(parse_err(field, "empty matrix"));
    }
    if let Some(i) = rows.iter().position(|row| row.len() != c) {
        return Err(parse_err(field, format!("row {i} has {} entries, expected {c}", rows[i].len())));
    }
    Ok(ComplexMatrix::from_fn(r, c, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

fn from_matrix(m: &ComplexMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl ScenarioFile {
    /// Validates every matrix and assembles the scenario at block length 1.
    pub fn to_scenario(&self) -> Result<Scenario> {
        let mut states: Vec<Option<DensityOperator>> = vec![None; self.alphabet_size];
        for (i, spec) in self.states.iter().enumerate() {
            let field = format!("states[{i}]");
            if spec.letter >= self.alphabet_size {
                return Err(parse_err(field, format!("letter {} outside alphabet of size {}", spec.letter, self.alphabet_size)));
            }
            if states[spec.letter].is_some() {
                return Err(parse_err(field, format!("letter {} defined twice", spec.letter)));
            }
            let rho = match (&spec.amplitudes, &spec.matrix) {
                (Some(a), None) => {
                    let psi = StateVector::normalized(a.iter().map(|z| Complex64::new(z[0], z[1])).collect())?;
                    pure_state(&psi)
                }
                (None, Some(m)) => DensityOperator::new(to_matrix(m, &field)?)?,
                _ => return Err(parse_err(field, "give exactly one of `amplitudes` or `matrix`")),
            };
            states[spec.letter] = Some(rho);
        }
        let states = states
            .into_iter()
            .enumerate()
            .map(|(a, s)| s.ok_or_else(|| parse_err(format!("states.letter={a}"), format!("no state defined for letter {a}"))))
            .collect::<Result<Vec<_>>>()?;
        let ensemble = match &self.prior {
            Some(p) => CqEnsemble::new(p.clone(), states)?,
            None => CqEnsemble::uniform(states)?,
        };
        let d = ensemble.dim();
        let theta = match &self.channel {
            ChannelSpec::Identity => QuantumChannel::identity(d),
            ChannelSpec::Depolarizing { lambda } => QuantumChannel::depolarizing(d, *lambda)?,
            ChannelSpec::ClassicalBroadcast { bob, eve } => {
                QuantumChannel::classical_broadcast(&ClassicalChannel::new(bob.clone())?, &ClassicalChannel::new(eve.clone())?)?
            }
            ChannelSpec::Kraus { operators } => QuantumChannel::new(
                operators
                    .iter()
                    .enumerate()
                    .map(|(i, k)| to_matrix(k, &format!("channel.operators[{i}]")))
                    .collect::<Result<_>>()?,
            )?,
        };
        let theta = theta.with_output_split(&[self.bob_dim, self.eve_dim])?;
        Scenario::new(self.name.clone(), self.key_size, ensemble, theta, 1)
    }

    /// Explicit form of `s`: density matrices and Kraus operators.
    pub fn from_scenario(s: &Scenario) -> Self {
        let uniform = s.ensemble().prior().iter().all(|&p| p == 1.0 / s.ensemble().alphabet_size() as f64);
        ScenarioFile {
            name: s.name.clone(),
            key_size: s.key_count(),
            alphabet_size: s.ensemble().alphabet_size(),
            bob_dim: s.bob_dim(),
            eve_dim: s.eve_dim(),
            prior: (!uniform).then(|| s.ensemble().prior().to_vec()),
            states: s
                .ensemble()
                .states()
                .iter()
                .enumerate()
                .map(|(letter, rho)| StateSpec {
                    letter,
                    amplitudes: None,
                    matrix: Some(from_matrix(rho.matrix())),
                })
                .collect(),
            channel: ChannelSpec::Kraus {
                operators: s.theta().kraus_operators().iter().map(from_matrix).collect(),
            },
        }
    }
}

/// 1-based line of byte offset `at` in `src`.
fn line_of(src: &str, at: usize) -> usize {
    src[..at.min(src.len())].matches('\n').count() + 1
}

/// Parses TOML scenario text.
pub fn parse_scenario(src: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(src).map_err(|e| Error::Parse {
        line: e.span().map(|r| line_of(src, r.start)),
        field: "scenario".into(),
        message: e.message().to_string(),
    })?;
    file.to_scenario()
}

/// Serializes `s` so that [`parse_scenario`] reproduces it.
pub fn write_scenario(s: &Scenario) -> String {
    toml::to_string(&ScenarioFile::from_scenario(s)).expect("scenario file is plain data")
}

/// `|φ⟩⊗|φ⟩` and `|ψ⟩⊗|ψ⟩` with `⟨φ|ψ⟩ = s`, sent unchanged: Eve holds an
/// exact copy of what Bob receives.
pub fn paper_example(overlap: f64) -> Result<Scenario> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::validation("overlap_in_unit_interval", format!("s = {overlap}")));
    }
    let phi = StateVector::real_qubit(0.0);
    let psi = StateVector::real_qubit(overlap.acos());
    let states = vec![pure_state(&phi.kron(&phi)), pure_state(&psi.kron(&psi))];
    let theta = QuantumChannel::identity(4).with_output_split(&[2, 2])?;
    Scenario::new("paper-example", 2, CqEnsemble::uniform(states)?, theta, 1)
}

/// Orthogonal letters `|00⟩`, `|11⟩` copied to both parties.
pub fn orthogonal() -> Result<Scenario> {
    let mut s = paper_example(0.0)?;
    s.name = "orthogonal".into();
    Ok(s)
}

/// Diagonal qubit letters through binary symmetric channels to Bob and Eve.
pub fn bsc_pair(eps_bob: f64, eps_eve: f64) -> Result<Scenario> {
    for eps in [eps_bob, eps_eve] {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::validation("crossover_in_unit_interval", format!("ε = {eps}")));
        }
    }
    let states = vec![DensityOperator::from_diagonal(&[1.0, 0.0])?, DensityOperator::from_diagonal(&[0.0, 1.0])?];
    let theta = QuantumChannel::classical_broadcast(
        &ClassicalChannel::binary_symmetric(eps_bob),
        &ClassicalChannel::binary_symmetric(eps_eve),
    )?;
    Scenario::new("bsc-pair", 2, CqEnsemble::uniform(states)?, theta, 1)
}

/// Builtin by name. `paper-example` takes its overlap from `params[0]` or
/// `overlap`; `bsc-pair` takes two crossover probabilities.
pub fn builtin(name: &str, params: &[f64], overlap: Option<f64>) -> Result<Scenario> {
    match name {
        "paper-example" => paper_example(overlap.or(params.first().copied()).unwrap_or(0.5)),
        "orthogonal" => orthogonal(),
        "bsc-pair" => match params {
            [b, e] => bsc_pair(*b, *e),
            _ => Err(parse_err("bsc-pair", format!("expects two crossover probabilities, got {}", params.len()))),
        },
        _ => Err(Error::UnknownScenario(name.to_string())),
    }
}

/// A builtin name (optionally `name(a,b)`) or a path to a scenario file.
pub fn load_scenario(spec: &str, params: &[f64], overlap: Option<f64>) -> Result<Scenario> {
    let path = Path::new(spec);
    if path.is_file() {
        return parse_scenario(&std::fs::read_to_string(path)?);
    }
    if let Some((name, rest)) = spec.split_once('(') {
        let inner = rest.strip_suffix(')').ok_or_else(|| parse_err("scenario", format!("unbalanced parentheses in `{spec}`")))?;
        let mut inline = inner
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<f64>().map_err(|e| parse_err("scenario", format!("`{t}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        inline.extend_from_slice(params);
        return builtin(name, &inline, overlap);
    }
    builtin(spec, params, overlap)
}

/// Classical channels read off the diagonals of Bob's and Eve's letter
/// states, when every one of them is diagonal.
pub fn classical_marginals(s: &Scenario) -> Result<Option<(ClassicalChannel, ClassicalChannel)>> {
    let rows = |e: &CqEnsemble| -> Option<Vec<Vec<f64>>> {
        e.states()
            .iter()
            .map(|rho| {
                let m = rho.matrix();
                let d = m.nrows();
                let off = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).filter(|(i, j)| i != j);
                off.clone()
                    .all(|(i, j)| m[(i, j)].norm() < 1e-12)
                    .then(|| (0..d).map(|i| m[(i, i)].re.max(0.0)).collect())
            })
            .collect()
    };
    let bob = s.bob_ensemble()?;
    let eve = s.eve_ensemble()?;
    match (rows(&bob), rows(&eve)) {
        (Some(v), Some(w)) => Ok(Some((ClassicalChannel::new(v)?, ClassicalChannel::new(w)?))),
        _ => Ok(None),
    }
}

#[derive(Debug, Parser)]
#[command(name = "qkd", about = "Key-distribution feasibility and exact finite-block simulation", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test the classical and quantum feasibility conditions.
    Analyze(Common),
    /// Exact key-agreement statistics for one block length and seed.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimFlags,
        #[arg(short = 'n', default_value_t = 1)]
        n: usize,
    },
    /// Simulate over ranges of block lengths and seeds.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimFlags,
        /// Block lengths: `1..4`, `1,3,5` or empty.
        #[arg(short = 'n', default_value = "1")]
        n: String,
        /// Seeds, same syntax as `-n`.
        #[arg(long, default_value = "0")]
        seeds: String,
    },
    /// Holevo capacity of one party's letter ensemble.
    Capacity {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Party::Bob)]
        side: Party,
    },
    /// Accessible information, C₁, or C_k of one party's letter ensemble.
    Accessible {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Party::Eve)]
        side: Party,
        /// Block length for C_k; 1 gives C₁.
        #[arg(short = 'k', default_value_t = 1)]
        k: usize,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Builtin (`paper-example`, `orthogonal`, `bsc-pair`) or scenario file.
    pub scenario: String,
    /// Numeric builtin parameters, e.g. `bsc-pair 0.1 0.3`.
    #[arg(allow_negative_numbers = true)]
    pub params: Vec<f64>,
    #[arg(long)]
    pub overlap: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Prior grid points for binary alphabets.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SimFlags {
    #[arg(long, value_enum, default_value_t = CoderArg::Random)]
    pub coder: CoderArg,
    #[arg(long, value_enum, default_value_t = EveArg::Default)]
    pub eve: EveArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Party {
    Bob,
    Eve,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CoderArg {
    Random,
    Repetition,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EveArg {
    Default,
    Optimized,
}

impl From<CoderArg> for CoderChoice {
    fn from(c: CoderArg) -> Self {
        match c {
            CoderArg::Random => CoderChoice::Random,
            CoderArg::Repetition => CoderChoice::Repetition,
        }
    }
}

impl From<EveArg> for EveChoice {
    fn from(e: EveArg) -> Self {
        match e {
            EveArg::Default => EveChoice::Default,
            EveArg::Optimized => EveChoice::Optimized,
        }
    }
}

impl Common {
    fn config(&self) -> Result<OptimizerConfig> {
        let mut cfg = OptimizerConfig {
            seed: self.seed,
            ..OptimizerConfig::default()
        };
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(g) = self.grid {
            cfg.grid_points = g;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn load(&self) -> Result<Scenario> {
        load_scenario(&self.scenario, &self.params, self.overlap)
    }
}

/// Exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Failure = 1,
    /// Optimizer hit its iteration cap, or some sweep cells failed.
    Partial = 2,
    Budget = 3,
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::BudgetExceeded { .. } => Status::Budget,
        _ => Status::Failure,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
    pub satisfied: bool,
    pub converged: bool,
    pub lhs_prior: Vec<f64>,
}

impl From<&ConditionReport> for ConditionRecord {
    fn from(r: &ConditionReport) -> Self {
        ConditionRecord {
            lhs: r.lhs,
            rhs: r.rhs,
            difference: r.lhs - r.rhs,
            satisfied: r.satisfied,
            converged: r.converged,
            lhs_prior: r.lhs_prior.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeRecord {
    pub scenario: String,
    /// `C(Θ_B∘ξ)` against `C₁(Θ_E∘ξ)`.
    pub quantum: ConditionRecord,
    /// `max_P [I(P,V) − I(P,W)]`, present when both marginals are classical.
    pub classical: Option<ConditionRecord>,
    pub config: OptimizerConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateRecord {
    pub scenario: String,
    pub n: usize,
    pub seed: u64,
    pub coder: CoderChoice,
    pub eve: EveChoice,
    pub p_agree: f64,
    pub bob_info: f64,
    pub eve_info: f64,
    pub converged: bool,
    pub joint: Vec<Vec<Vec<f64>>>,
    pub config: OptimizerConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantityRecord {
    pub scenario: String,
    pub side: &'static str,
    pub quantity: String,
    pub value: f64,
    pub prior: Vec<f64>,
    pub converged: bool,
    pub config: OptimizerConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub scenario: String,
    pub n: usize,
    pub seed: u64,
    pub coder: CoderChoice,
    pub eve: EveChoice,
    pub p_agree: Option<f64>,
    pub bob_info: Option<f64>,
    pub eve_info: Option<f64>,
    pub flags: String,
}

pub const CSV_HEADER: &str = "scenario,n,seed,coder,eve,p_agree,bob_info,eve_info,flags";

/// Rounds every float in `v` to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
            *v = serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with 12 significant digits.
pub fn to_json<T: Serialize>(record: &T) -> String {
    let mut v = serde_json::to_value(record).expect("records serialize");
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

fn sig12(x: f64) -> String {
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{r}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let num = |x: Option<f64>| x.map(sig12).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            csv_field(&r.scenario),
            r.n,
            r.seed,
            r.coder.as_str(),
            r.eve.as_str(),
            num(r.p_agree),
            num(r.bob_info),
            num(r.eve_info),
            csv_field(&r.flags)
        ));
    }
    out
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Parses `a..b` (inclusive), `a-b`, `a,b,c`, a single value, or nothing.
pub fn parse_range(spec: &str, field: &str) -> Result<Vec<u64>> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| parse_err(field, format!("`{t}`: {e}")));
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bounds = part.split_once("..=").or_else(|| part.split_once("..")).or_else(|| part.split_once('-'));
        match bounds {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(parse_err(field, format!("empty range `{part}`")));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    Ok(out)
}

struct Output {
    text: String,
    status: Status,
}

fn human_condition(label: &str, lhs_name: &str, rhs_name: &str, c: &ConditionRecord) -> String {
    format!(
        "{label}\n  {lhs_name:<12} {:.6}\n  {rhs_name:<12} {:.6}\n  difference   {:.6}\n  satisfied    {}\n  converged    {}\n",
        c.lhs, c.rhs, c.difference, c.satisfied, c.converged
    )
}

fn analyze(common: &Common) -> Result<Output> {
    let cfg = common.config()?;
    let s = common.load()?;
    let quantum = ConditionRecord::from(&quantum_condition(s.ensemble(), s.theta(), &cfg)?);
    let classical = match classical_marginals(&s)? {
        Some((v, w)) => Some(ConditionRecord::from(&classical_advantage(&v, &w, &cfg)?)),
        None => None,
    };
    let converged = quantum.converged && classical.as_ref().is_none_or(|c| c.converged);
    let record = AnalyzeRecord {
        scenario: s.name.clone(),
        quantum,
        classical,
        config: cfg,
    };
    let text = match common.format {
        Some(Format::Json) => to_json(&record),
        Some(Format::Csv) => {
            let mut t = String::from("scenario,condition,lhs,rhs,difference,satisfied,converged\n");
            let mut row = |name: &str, c: &ConditionRecord| {
                t.push_str(&format!(
                    "{},{name},{},{},{},{},{}\n",
                    csv_field(&record.scenario),
                    sig12(c.lhs),
                    sig12(c.rhs),
                    sig12(c.difference),
                    c.satisfied,
                    c.converged
                ))
            };
            if let Some(c) = &record.classical {
                row("classical", c);
            }
            row("quantum", &record.quantum);
            t
        }
        None => {
            let mut t = format!("scenario {}\n", record.scenario);
            if let Some(c) = &record.classical {
                t.push_str(&human_condition("classical condition  max_P I(P,V) - I(P,W) > 0", "advantage", "threshold", c));
            }
            t.push_str(&human_condition("quantum condition  C(Θ_B∘ξ) > C₁(Θ_E∘ξ)", "C(Θ_B∘ξ)", "C₁(Θ_E∘ξ)", &record.quantum));
            t
        }
    };
    Ok(Output {
        text,
        status: if converged { Status::Ok } else { Status::Partial },
    })
}

fn human_report(s: &str, r: &KeySimReport) -> String {
    format!(
        "scenario {s}\n  n            {}\n  seed         {}\n  coder        {}\n  eve          {}\n  p_agree      {:.6}\n  bob_info     {:.6}\n  eve_info     {:.6}\n  converged    {}\n",
        r.n,
        r.seed.unwrap_or_default(),
        r.coder.map(CoderChoice::as_str).unwrap_or("-"),
        r.eve.map(EveChoice::as_str).unwrap_or("-"),
        r.p_agree,
        r.bob_info,
        r.eve_info,
        r.converged
    )
}

fn row_of(name: &str, n: usize, seed: u64, coder: CoderChoice, eve: EveChoice, result: &Result<KeySimReport>) -> SweepRow {
    let (p, b, e, flags) = match result {
        Ok(r) => (
            Some(r.p_agree),
            Some(r.bob_info),
            Some(r.eve_info),
            if r.converged { "ok".to_string() } else { "nonconverged".to_string() },
        ),
        Err(err) => (None, None, None, format!("error:{}", err.invariant_name())),
    };
    SweepRow {
        scenario: name.to_string(),
        n,
        seed,
        coder,
        eve,
        p_agree: p,
        bob_info: b,
        eve_info: e,
        flags,
    }
}

impl SweepRow {
    /// Flattens a sweep cell; failures keep their invariant in `flags`.
    pub fn from_cell(scenario: &str, cell: &SweepCell) -> Self {
        row_of(scenario, cell.n, cell.seed, cell.coder, cell.eve, &cell.result)
    }
}

fn simulate_cmd(common: &Common, sim: &SimFlags, n: usize) -> Result<Output> {
    let cfg = common.config()?;
    let s = common.load()?.with_block_length(n)?;
    let (coder, eve) = (sim.coder.into(), sim.eve.into());
    let r = simulate(&s, common.seed, coder, eve, &cfg)?;
    let status = if r.converged { Status::Ok } else { Status::Partial };
    let text = match common.format {
        Some(Format::Json) => to_json(&SimulateRecord {
            scenario: s.name.clone(),
            n,
            seed: common.seed,
            coder,
            eve,
            p_agree: r.p_agree,
            bob_info: r.bob_info,
            eve_info: r.eve_info,
            converged: r.converged,
            joint: r.joint.clone(),
            config: cfg,
        }),
        Some(Format::Csv) => sweep_csv(&[row_of(&s.name, n, common.seed, coder, eve, &Ok(r))]),
        None => human_report(&s.name, &r),
    };
    Ok(Output { text, status })
}

fn sweep_cmd(common: &Common, sim: &SimFlags, n: &str, seeds: &str) -> Result<Output> {
    let cfg = common.config()?;
    let template = common.load()?;
    let ns: Vec<usize> = parse_range(n, "n")?.into_iter().map(|x| x as usize).collect();
    if ns.contains(&0) {
        return Err(Error::validation("block_length_positive", "n = 0 in range"));
    }
    let seeds = parse_range(seeds, "seeds")?;
    let (coder, eve) = (sim.coder.into(), sim.eve.into());
    let cells = sweep(&template, &ns, &seeds, coder, eve, &cfg);
    let rows: Vec<SweepRow> = cells
        .iter()
        .map(|c| SweepRow::from_cell(&template.name, c))
        .collect();
    let status = if rows.iter().all(|r| r.flags == "ok") { Status::Ok } else { Status::Partial };
    let text = match common.format {
        Some(Format::Json) => to_json(&rows),
        // CSV is the natural form of a sweep, also for the terminal
        Some(Format::Csv) | None => sweep_csv(&rows),
    };
    Ok(Output { text, status })
}

fn party_ensemble(s: &Scenario, side: Party) -> Result<CqEnsemble> {
    match side {
        Party::Bob => s.bob_ensemble(),
        Party::Eve => s.eve_ensemble(),
    }
}

fn party_name(side: Party) -> &'static str {
    match side {
        Party::Bob => "bob",
        Party::Eve => "eve",
    }
}

fn quantity_output(common: &Common, record: QuantityRecord) -> Output {
    let status = if record.converged { Status::Ok } else { Status::Partial };
    let text = match common.format {
        Some(Format::Json) => to_json(&record),
        Some(Format::Csv) => format!(
            "scenario,side,quantity,value,converged\n{},{},{},{},{}\n",
            csv_field(&record.scenario),
            record.side,
            csv_field(&record.quantity),
            sig12(record.value),
            record.converged
        ),
        None => format!(
            "scenario {}\n  side         {}\n  {:<12} {:.6}\n  prior        [{}]\n  converged    {}\n",
            record.scenario,
            record.side,
            record.quantity,
            record.value,
            record.prior.iter().map(|p| format!("{p:.6}")).collect::<Vec<_>>().join(", "),
            record.converged
        ),
    };
    Output { text, status }
}

fn capacity_cmd(common: &Common, side: Party) -> Result<Output> {
    let cfg = common.config()?;
    let s = common.load()?;
    let r = holevo_capacity(&party_ensemble(&s, side)?, &cfg)?;
    Ok(quantity_output(
        common,
        QuantityRecord {
            scenario: s.name.clone(),
            side: party_name(side),
            quantity: "holevo".into(),
            value: r.value,
            prior: r.prior,
            converged: r.converged,
            config: cfg,
        },
    ))
}

fn accessible_cmd(common: &Common, side: Party, k: usize) -> Result<Output> {
    let cfg = common.config()?;
    let s = common.load()?;
    let e = party_ensemble(&s, side)?;
    let (quantity, r) = match k {
        0 => ("accessible".to_string(), accessible_information(&e, &cfg)?),
        1 => ("c1".to_string(), c1(&e, &cfg)?),
        k => (format!("c{k}"), c_k(&e, k, &cfg)?),
    };
    Ok(quantity_output(
        common,
        QuantityRecord {
            scenario: s.name.clone(),
            side: party_name(side),
            quantity,
            value: r.value,
            prior: r.prior,
            converged: r.converged,
            config: cfg,
        },
    ))
}

fn dispatch(cli: &Cli) -> Result<(Output, Option<&Path>)> {
    let (out, common) = match &cli.command {
        Command::Analyze(c) => (analyze(c)?, c),
        Command::Simulate { common, sim, n } => (simulate_cmd(common, sim, *n)?, common),
        Command::Sweep { common, sim, n, seeds } => (sweep_cmd(common, sim, n, seeds)?, common),
        Command::Capacity { common, side } => (capacity_cmd(common, *side)?, common),
        Command::Accessible { common, side, k } => (accessible_cmd(common, *side, *k)?, common),
    };
    Ok((out, common.out.as_deref()))
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
///
/// Results go to `stdout`, or to `--out` when given; diagnostics go to
/// `stderr` and always name the failed invariant.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            if e.use_stderr() {
                let _ = writeln!(stderr, "invariant: cli_arguments");
                return Status::Failure as i32;
            }
            return Status::Ok as i32;
        }
    };
    let mut cli = cli;
    let common = common_mut(&mut cli);
    if common.out.is_some() && common.format.is_none() {
        // files get the machine form
        common.format = Some(Format::Json);
    }
    let (out, path) = match dispatch(&cli) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            let _ = writeln!(stderr, "invariant: {}", e.invariant_name());
            return status_of(&e) as i32;
        }
    };
    let written = match path {
        Some(p) => write_atomic(p, &out.text),
        None => stdout.write_all(out.text.as_bytes()).map_err(Error::from),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        let _ = writeln!(stderr, "invariant: {}", e.invariant_name());
        return Status::Failure as i32;
    }
    if out.status == Status::Partial {
        let _ = writeln!(stderr, "warning: optimizer did not converge or some cells failed");
        let _ = writeln!(stderr, "invariant: converged");
    }
    out.status as i32
}

fn common_mut(cli: &mut Cli) -> &mut Common {
    match &mut cli.command {
        Command::Analyze(c) => c,
        Command::Simulate { common, .. }
        | Command::Sweep { common, .. }
        | Command::Capacity { common, .. }
        | Command::Accessible { common, .. } => common,
    }
}

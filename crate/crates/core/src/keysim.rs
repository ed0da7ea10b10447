//! Exact simulation of the key-distribution pipeline over `n` channel uses.
//!
//! Alice draws a uniform key `k ∈ K`, sends the codeword state
//! `ξ(w_k,1) ⊗ … ⊗ ξ(w_k,n)` through `Θ^⊗n`, Bob measures his `n` output
//! slots jointly (pretty-good measurement on his block states), and Eve
//! measures each of her slots separately and decides with a classical
//! function of the outcome tuple. The joint law of `(K_A, K_B, K_E)` is
//! computed exactly by contracting every outcome; nothing is sampled apart
//! from random codebooks and optimizer restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qchan::{push_through, Codeword, CqEnsemble, DimensionBudget, QuantumChannel, Side};
use crate::qinfo::{shannon_entropy, OptimizerConfig};
use crate::qmat::{
    identity, kron, partial_trace, partial_trace_matrix, permute_subsystems, trace_product,
    ComplexMatrix, TensorFactorization,
};
use crate::qmeas::{coarse_grain_onto, expand, helstrom, pretty_good_measurement, FactorizedPovm, Povm};
use crate::random;

/// Key set `K`, encoding `ξ`, channel `Θ` into `H_B ⊗ H_E`, and block length.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    key_count: usize,
    ensemble: CqEnsemble,
    theta: QuantumChannel,
    n: usize,
    pub budget: DimensionBudget,
}

impl Scenario {
    pub fn new(name: impl Into<String>, key_count: usize, ensemble: CqEnsemble, theta: QuantumChannel, n: usize) -> Result<Self> {
        if key_count < 2 {
            return Err(Error::validation("key_count_at_least_two", format!("|K| = {key_count}")));
        }
        if n == 0 {
            return Err(Error::validation("block_length_positive", "n = 0"));
        }
        if ensemble.dim() != theta.in_dim() {
            return Err(Error::DimensionMismatch {
                context: "encoding into channel",
                expected: theta.in_dim(),
                found: ensemble.dim(),
            });
        }
        match theta.output_split() {
            Some(f) if f.len() == 2 => {}
            _ => {
                return Err(Error::validation(
                    "output_split_two_factors",
                    "channel output must be split as H_B ⊗ H_E",
                ))
            }
        }
        Ok(Scenario {
            name: name.into(),
            key_count,
            ensemble,
            theta,
            n,
            budget: DimensionBudget::default(),
        })
    }

    pub fn with_block_length(&self, n: usize) -> Result<Self> {
        let mut s = Self::new(self.name.clone(), self.key_count, self.ensemble.clone(), self.theta.clone(), n)?;
        s.budget = self.budget;
        Ok(s)
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    pub fn ensemble(&self) -> &CqEnsemble {
        &self.ensemble
    }

    pub fn theta(&self) -> &QuantumChannel {
        &self.theta
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn bob_dim(&self) -> usize {
        self.theta.output_split().expect("checked on construction").dims()[0]
    }

    pub fn eve_dim(&self) -> usize {
        self.theta.output_split().expect("checked on construction").dims()[1]
    }

    /// `a ↦ Θ_B(ξ(a))`.
    pub fn bob_ensemble(&self) -> Result<CqEnsemble> {
        push_through(&self.ensemble, &self.theta.marginal(Side::Bob)?)
    }

    /// `a ↦ Θ_E(ξ(a))`.
    pub fn eve_ensemble(&self) -> Result<CqEnsemble> {
        push_through(&self.ensemble, &self.theta.marginal(Side::Eve)?)
    }

    fn check_budget(&self) -> Result<()> {
        self.budget.power("block input dimension", self.theta.in_dim(), self.n)?;
        self.budget.power("block output dimension", self.theta.out_dim(), self.n)?;
        Ok(())
    }
}

/// Which codebook construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoderChoice {
    Random,
    Repetition,
}

impl CoderChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            CoderChoice::Random => "random",
            CoderChoice::Repetition => "repetition",
        }
    }
}

/// Eve's strategy family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EveChoice {
    Default,
    Optimized,
}

impl EveChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            EveChoice::Default => "default",
            EveChoice::Optimized => "optimized",
        }
    }
}

/// One codeword per key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    words: Vec<Codeword>,
}

impl Codebook {
    pub fn new(words: Vec<Codeword>, alphabet_size: usize) -> Result<Self> {
        let n = words.first().map(Codeword::len).unwrap_or(0);
        if words.len() < 2 || n == 0 {
            return Err(Error::validation("codebook_shape", "need ≥ 2 nonempty codewords"));
        }
        for (k, w) in words.iter().enumerate() {
            if w.len() != n {
                return Err(Error::validation("codeword_length", format!("word {k} has length {} ≠ {n}", w.len())));
            }
            if let Some(&a) = w.letters().iter().find(|&&a| a >= alphabet_size) {
                return Err(Error::validation("letter_in_alphabet", format!("word {k} uses letter {a}")));
            }
        }
        Ok(Codebook { words })
    }

    /// Key `k` ↦ `kⁿ`.
    pub fn repetition(key_count: usize, n: usize, alphabet_size: usize) -> Result<Self> {
        if key_count > alphabet_size {
            return Err(Error::validation(
                "repetition_keys_fit_alphabet",
                format!("{key_count} keys, {alphabet_size} letters"),
            ));
        }
        Self::new((0..key_count).map(|k| Codeword(vec![k; n])).collect(), alphabet_size)
    }

    pub fn words(&self) -> &[Codeword] {
        &self.words
    }

    pub fn key_count(&self) -> usize {
        self.words.len()
    }

    pub fn block_length(&self) -> usize {
        self.words[0].len()
    }
}

/// Codewords with i.i.d. uniform letters, reproducible from `seed`.
pub fn sample_codebook(key_count: usize, n: usize, alphabet_size: usize, seed: u64) -> Result<Codebook> {
    if key_count < 2 {
        return Err(Error::validation("key_count_at_least_two", format!("|K| = {key_count}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = (0..key_count)
        .map(|_| Codeword((0..n).map(|_| rng.random_range(0..alphabet_size)).collect()))
        .collect();
    Codebook::new(words, alphabet_size)
}

/// Eve's observable: per-slot POVMs and a decision `f: Eⁿ → K` over joint
/// outcome indices in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct EveStrategy {
    slots: FactorizedPovm,
    decoder: Vec<usize>,
    key_count: usize,
}

impl EveStrategy {
    pub fn new(slots: FactorizedPovm, decoder: Vec<usize>, key_count: usize) -> Result<Self> {
        if decoder.len() != slots.outcomes() {
            return Err(Error::validation(
                "outcome_function_total",
                format!("decoder covers {} of {} outcome tuples", decoder.len(), slots.outcomes()),
            ));
        }
        if let Some(&k) = decoder.iter().find(|&&k| k >= key_count) {
            return Err(Error::validation("outcome_function_range", format!("decoder value {k} ≥ {key_count}")));
        }
        Ok(EveStrategy {
            slots,
            decoder,
            key_count,
        })
    }

    pub fn slots(&self) -> &FactorizedPovm {
        &self.slots
    }

    pub fn decoder(&self) -> &[usize] {
        &self.decoder
    }

    /// The flat observable `coarse_grain(expand(slots), f)` on `H_E^⊗n`.
    pub fn povm(&self, budget: &DimensionBudget) -> Result<Povm> {
        coarse_grain_onto(&expand(&self.slots, budget)?, &self.decoder, self.key_count)
    }

    /// `P(k_E | k)` from per-slot likelihoods, for codewords of `book`.
    fn conditional(&self, eve: &CqEnsemble, book: &Codebook) -> Result<Vec<Vec<f64>>> {
        let tables = likelihood_tables(self.slots.slots(), eve)?;
        let mut out = vec![vec![0.0; self.key_count]; book.key_count()];
        for (k, word) in book.words().iter().enumerate() {
            for (idx, &guess) in self.decoder.iter().enumerate() {
                out[k][guess] += tuple_likelihood(&tables, word, &self.slots.outcome_tuple(idx));
            }
        }
        Ok(out)
    }
}

/// `tables[i][a][e] = Tr M_i(e) Θ_E(ξ(a))`.
fn likelihood_tables(slots: &[Povm], eve: &CqEnsemble) -> Result<Vec<Vec<Vec<f64>>>> {
    slots
        .iter()
        .map(|m| eve.states().iter().map(|s| m.born_rule(s)).collect())
        .collect()
}

fn tuple_likelihood(tables: &[Vec<Vec<f64>>], word: &Codeword, tuple: &[usize]) -> f64 {
    tables
        .iter()
        .zip(word.letters())
        .zip(tuple)
        .map(|((t, &a), &e)| t[a][e])
        .product()
}

/// Maximum-likelihood decision over `book`, lowest key index on ties.
fn ml_decoder(slots: &FactorizedPovm, eve: &CqEnsemble, book: &Codebook) -> Result<Vec<usize>> {
    let tables = likelihood_tables(slots.slots(), eve)?;
    Ok((0..slots.outcomes())
        .map(|idx| {
            let tuple = slots.outcome_tuple(idx);
            let mut best = (0, f64::NEG_INFINITY);
            for (k, w) in book.words().iter().enumerate() {
                let l = tuple_likelihood(&tables, w, &tuple);
                if l > best.1 {
                    best = (k, l);
                }
            }
            best.0
        })
        .collect())
}

fn check_codebook(s: &Scenario, c: &Codebook) -> Result<()> {
    if c.key_count() != s.key_count() {
        return Err(Error::DimensionMismatch {
            context: "codebook size vs key set",
            expected: s.key_count(),
            found: c.key_count(),
        });
    }
    if c.block_length() != s.block_length() {
        return Err(Error::DimensionMismatch {
            context: "codeword length vs block length",
            expected: s.block_length(),
            found: c.block_length(),
        });
    }
    Codebook::new(c.words.clone(), s.ensemble().alphabet_size()).map(|_| ())
}

/// Channel output for codeword `word`, with factors reordered to `Bⁿ ⊗ Eⁿ`.
fn block_output(s: &Scenario, power: &QuantumChannel, word: &Codeword) -> Result<ComplexMatrix> {
    let out = power.apply(&s.ensemble().encode(word)?)?;
    let n = s.block_length();
    let f = TensorFactorization::repeated(&[s.bob_dim(), s.eve_dim()], n)?;
    let order: Vec<usize> = (0..n).map(|i| 2 * i).chain((0..n).map(|i| 2 * i + 1)).collect();
    permute_subsystems(out.matrix(), &f, &order)
}

/// Bob's block decoder: the pretty-good measurement for the states
/// `Tr_E Θⁿ(encode(w_k))` with uniform key prior.
pub fn bob_decoder(s: &Scenario, c: &Codebook) -> Result<Povm> {
    check_codebook(s, c)?;
    s.check_budget()?;
    let power = s.theta().tensor_power(s.block_length(), &s.budget)?;
    let n = s.block_length();
    let f = TensorFactorization::repeated(&[s.bob_dim(), s.eve_dim()], n)?;
    let bob_slots: Vec<usize> = (0..n).map(|i| 2 * i).collect();
    let states = c
        .words()
        .iter()
        .map(|w| partial_trace(&power.apply(&s.ensemble().encode(w)?)?, &f, &bob_slots))
        .collect::<Result<Vec<_>>>()?;
    let k = c.key_count() as f64;
    pretty_good_measurement(&states, &vec![1.0 / k; c.key_count()])
}

/// Per-slot Helstrom (binary alphabets) or pretty-good measurement on Eve's
/// single-letter states, then maximum-likelihood decoding over the codebook.
pub fn eve_default_strategy(s: &Scenario, c: &Codebook) -> Result<EveStrategy> {
    check_codebook(s, c)?;
    let eve = s.eve_ensemble()?;
    let slot = match eve.states() {
        [a, b] => helstrom(a, b, 0.5)?,
        states => pretty_good_measurement(states, &vec![1.0 / states.len() as f64; states.len()])?,
    };
    let slots = FactorizedPovm::uniform(slot, s.block_length())?;
    let decoder = ml_decoder(&slots, &eve, c)?;
    EveStrategy::new(slots, decoder, s.key_count())
}

/// Random per-slot POVMs with `outcomes` effects and a random decoder.
pub fn random_eve_strategy(s: &Scenario, outcomes: usize, rng: &mut impl Rng) -> Result<EveStrategy> {
    let slots = FactorizedPovm::new((0..s.block_length()).map(|_| random::povm(s.eve_dim(), outcomes, rng)).collect())?;
    let decoder = (0..slots.outcomes()).map(|_| rng.random_range(0..s.key_count())).collect();
    EveStrategy::new(slots, decoder, s.key_count())
}

/// `I(X;Y)` in bits from a joint table.
pub fn joint_mutual_information(joint: &[Vec<f64>]) -> f64 {
    let px: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let py: Vec<f64> = (0..joint[0].len()).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    (shannon_entropy(&px) + shannon_entropy(&py) - shannon_entropy(&flat)).max(0.0)
}

fn eve_information(s: &Scenario, c: &Codebook, strategy: &EveStrategy, eve: &CqEnsemble) -> Result<f64> {
    let cond = strategy.conditional(eve, c)?;
    let k = s.key_count() as f64;
    let joint: Vec<Vec<f64>> = cond.iter().map(|row| row.iter().map(|p| p / k).collect()).collect();
    Ok(joint_mutual_information(&joint))
}

/// Best factorized strategy found, with its information.
#[derive(Debug, Clone, PartialEq)]
pub struct EveOptimum {
    pub strategy: EveStrategy,
    pub eve_info: f64,
    pub converged: bool,
}

/// Searches Eve's factorized class for the strategy maximizing `I(K_A;K_E)`.
///
/// Each restart draws random rank-one per-slot POVMs with `d_E²` outcomes
/// (or `cfg.povm_outcomes`) and improves them by accepted random
/// perturbations, one slot at a time, re-deriving the maximum-likelihood
/// decoder after every change. The default strategy is the incumbent, so
/// the result never falls below it; with zero restarts it is returned as is.
pub fn eve_optimize(s: &Scenario, c: &Codebook, cfg: &OptimizerConfig) -> Result<EveOptimum> {
    cfg.validate()?;
    let eve = s.eve_ensemble()?;
    let default = eve_default_strategy(s, c)?;
    let mut best = EveOptimum {
        eve_info: eve_information(s, c, &default, &eve)?,
        strategy: default,
        converged: true,
    };
    let d = s.eve_dim();
    let outcomes = cfg.povm_outcomes.unwrap_or(d * d).max(1);
    cfg.budget.power("Eve outcome tuples", outcomes, s.block_length())?;
    let evaluate = |frames: &[Vec<ComplexMatrix>]| -> Option<(EveStrategy, f64)> {
        let slots = frames.iter().map(|f| Povm::from_frame(f).ok()).collect::<Option<Vec<_>>>()?;
        let slots = FactorizedPovm::new(slots).ok()?;
        let decoder = ml_decoder(&slots, &eve, c).ok()?;
        let strategy = EveStrategy::new(slots, decoder, s.key_count()).ok()?;
        let info = eve_information(s, c, &strategy, &eve).ok()?;
        Some((strategy, info))
    };
    for r in 0..cfg.restarts {
        let mut rng = cfg.restart_rng(r);
        let mut frames: Vec<Vec<ComplexMatrix>> = (0..s.block_length())
            .map(|_| (0..outcomes).map(|_| random::ginibre(d, 1, &mut rng)).collect())
            .collect();
        let Some((mut strategy, mut info)) = evaluate(&frames) else { continue };
        let mut step = 0.5;
        let mut converged = false;
        for it in 0..cfg.max_iters {
            if step < 1e-6 {
                converged = true;
                break;
            }
            let slot = it % frames.len();
            let mut proposal = frames.clone();
            for v in proposal[slot].iter_mut() {
                *v += random::ginibre(d, 1, &mut rng).scale(step);
            }
            match evaluate(&proposal) {
                Some((cand, v)) if v > info => {
                    frames = proposal;
                    strategy = cand;
                    info = v;
                    step *= 1.2;
                }
                _ => step *= 0.8,
            }
        }
        if info > best.eve_info {
            best = EveOptimum {
                strategy,
                eve_info: info,
                converged,
            };
        }
    }
    Ok(best)
}

/// Exact law of `(K_A, K_B, K_E)` and derived figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeySimReport {
    pub n: usize,
    pub key_count: usize,
    /// `joint[k_a][k_b][k_e]`.
    pub joint: Vec<Vec<Vec<f64>>>,
    pub p_agree: f64,
    pub bob_info: f64,
    pub eve_info: f64,
    pub seed: Option<u64>,
    pub coder: Option<CoderChoice>,
    pub eve: Option<EveChoice>,
    /// False when Eve's optimizer stopped on its iteration cap.
    pub converged: bool,
}

impl KeySimReport {
    fn from_joint(n: usize, joint: Vec<Vec<Vec<f64>>>) -> Self {
        let k = joint.len();
        let p_agree = (0..k).map(|a| joint[a][a].iter().sum::<f64>()).sum();
        let ab: Vec<Vec<f64>> = joint.iter().map(|m| m.iter().map(|r| r.iter().sum()).collect()).collect();
        let ae: Vec<Vec<f64>> = joint
            .iter()
            .map(|m| (0..k).map(|e| m.iter().map(|r| r[e]).sum()).collect())
            .collect();
        KeySimReport {
            n,
            key_count: k,
            bob_info: joint_mutual_information(&ab),
            eve_info: joint_mutual_information(&ae),
            p_agree,
            joint,
            seed: None,
            coder: None,
            eve: None,
            converged: true,
        }
    }

    pub fn total_probability(&self) -> f64 {
        self.joint.iter().flatten().flatten().sum()
    }

    /// `P(K_A = k)`.
    pub fn alice_marginal(&self) -> Vec<f64> {
        self.joint.iter().map(|m| m.iter().flatten().sum()).collect()
    }
}

/// Measures every global codeword state `Θⁿ(encode(w_k))` with `M_B ⊗ M_E`.
///
/// Bob's effect is contracted first, leaving an unnormalized conditional
/// state on `H_E^⊗n` that Eve's coarse-grained effects are traced against.
pub fn evaluate(s: &Scenario, c: &Codebook, mb: &Povm, me: &EveStrategy) -> Result<KeySimReport> {
    check_codebook(s, c)?;
    s.check_budget()?;
    let n = s.block_length();
    let (db, de) = (s.bob_dim().pow(n as u32), s.eve_dim().pow(n as u32));
    if mb.dim() != db {
        return Err(Error::DimensionMismatch {
            context: "Bob decoder dimension",
            expected: db,
            found: mb.dim(),
        });
    }
    if mb.outcomes() != s.key_count() {
        return Err(Error::DimensionMismatch {
            context: "Bob decoder outcomes",
            expected: s.key_count(),
            found: mb.outcomes(),
        });
    }
    let eve_povm = me.povm(&s.budget)?;
    if eve_povm.dim() != de {
        return Err(Error::DimensionMismatch {
            context: "Eve observable dimension",
            expected: de,
            found: eve_povm.dim(),
        });
    }
    let power = s.theta().tensor_power(n, &s.budget)?;
    let cut = TensorFactorization::new(vec![db, de])?;
    let id_e = identity(de);
    let bob_full: Vec<ComplexMatrix> = mb.effects().iter().map(|m| kron(m, &id_e)).collect();
    let kk = s.key_count();
    let weight = 1.0 / kk as f64;
    let mut joint = vec![vec![vec![0.0; kk]; kk]; kk];
    for (ka, word) in c.words().iter().enumerate() {
        let rho = block_output(s, &power, word)?;
        for (kb, mfull) in bob_full.iter().enumerate() {
            let conditional = partial_trace_matrix(&(mfull * &rho), &cut, &[1])?;
            for (ke, f) in eve_povm.effects().iter().enumerate() {
                joint[ka][kb][ke] = weight * trace_product(f, &conditional).re.max(0.0);
            }
        }
    }
    Ok(KeySimReport::from_joint(n, joint))
}

/// Shortcut for channels whose output is a product across the B/E cut for
/// every codeword: `P(k_B, k_E | k) = P(k_B | k)·P(k_E | k)`.
pub fn evaluate_factorized(s: &Scenario, c: &Codebook, mb: &Povm, me: &EveStrategy) -> Result<KeySimReport> {
    check_codebook(s, c)?;
    let n = s.block_length();
    let power = s.theta().tensor_power(n, &s.budget)?;
    let f = TensorFactorization::repeated(&[s.bob_dim(), s.eve_dim()], n)?;
    let bob_slots: Vec<usize> = (0..n).map(|i| 2 * i).collect();
    let eve_slots: Vec<usize> = (0..n).map(|i| 2 * i + 1).collect();
    let eve_povm = me.povm(&s.budget)?;
    let kk = s.key_count();
    let mut joint = vec![vec![vec![0.0; kk]; kk]; kk];
    for (ka, word) in c.words().iter().enumerate() {
        let out = power.apply(&s.ensemble().encode(word)?)?;
        let pb = mb.born_rule(&partial_trace(&out, &f, &bob_slots)?)?;
        let pe = eve_povm.born_rule(&partial_trace(&out, &f, &eve_slots)?)?;
        for kb in 0..kk {
            for ke in 0..kk {
                joint[ka][kb][ke] = pb[kb] * pe[ke] / kk as f64;
            }
        }
    }
    Ok(KeySimReport::from_joint(n, joint))
}

/// Builds the codebook and both decoders for one cell, then evaluates it.
pub fn simulate(s: &Scenario, seed: u64, coder: CoderChoice, eve: EveChoice, cfg: &OptimizerConfig) -> Result<KeySimReport> {
    let book = match coder {
        CoderChoice::Random => sample_codebook(s.key_count(), s.block_length(), s.ensemble().alphabet_size(), seed)?,
        CoderChoice::Repetition => Codebook::repetition(s.key_count(), s.block_length(), s.ensemble().alphabet_size())?,
    };
    let mb = bob_decoder(s, &book)?;
    let (me, converged) = match eve {
        EveChoice::Default => (eve_default_strategy(s, &book)?, true),
        EveChoice::Optimized => {
            let cell_cfg = OptimizerConfig {
                seed: cfg.seed ^ seed,
                ..cfg.clone()
            };
            let opt = eve_optimize(s, &book, &cell_cfg)?;
            (opt.strategy, opt.converged)
        }
    };
    let mut report = evaluate(s, &book, &mb, &me)?;
    report.converged = converged;
    report.seed = Some(seed);
    report.coder = Some(coder);
    report.eve = Some(eve);
    Ok(report)
}

/// One `(n, seed)` cell of a sweep.
#[derive(Debug)]
pub struct SweepCell {
    pub n: usize,
    pub seed: u64,
    pub coder: CoderChoice,
    pub eve: EveChoice,
    pub result: Result<KeySimReport>,
}

/// Runs [`simulate`] for every `(n, seed)` pair, ordered by `n` then seed.
/// Failing cells are kept with their error.
pub fn sweep(
    template: &Scenario,
    n_range: &[usize],
    seeds: &[u64],
    coder: CoderChoice,
    eve: EveChoice,
    cfg: &OptimizerConfig,
) -> Vec<SweepCell> {
    let mut ns = n_range.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut cells = Vec::with_capacity(ns.len() * seeds.len());
    for &n in &ns {
        for &seed in seeds {
            let result = template
                .with_block_length(n)
                .and_then(|s| simulate(&s, seed, coder, eve, cfg));
            cells.push(SweepCell {
                n,
                seed,
                coder,
                eve,
                result,
            });
        }
    }
    cells
}

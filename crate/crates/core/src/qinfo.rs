//! Information quantities and the optimizers behind them.
//!
//! All quantities are in bits. The two feasibility tests are
//!
//! - [`classical_advantage`]: `max_P [I(P,V) − I(P,W)] > 0` for classical
//!   channels to Bob (`V`) and Eve (`W`);
//! - [`quantum_condition`]: `C(Θ_B∘ξ) > C₁(Θ_E∘ξ)`, Holevo capacity of Bob's
//!   ensemble against the single-letter accessible capacity of Eve's.
//!
//! `C₁` has no closed form in general. It is computed by a seesaw: for a
//! fixed prior the POVM is improved by gradient ascent over rank-one
//! effects, and for a fixed POVM the prior is set to the capacity-achieving
//! input of the induced classical channel (Blahut–Arimoto). Several starts
//! are tried and the best is kept, lowest start index winning ties.
//!
//! Eve's single-letter quantity is taken over measurements on `H_E`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qchan::{check_distribution, push_through, CqEnsemble, DimensionBudget, QuantumChannel, Side};
use crate::qmat::{hermitian_part, spectral, von_neumann_entropy, ComplexMatrix, DensityOperator};
use crate::qmeas::{expand, helstrom, pretty_good_measurement, ClassicalChannel, FactorizedPovm, Povm};
use crate::random;

/// Knobs shared by every optimizer in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Points of the prior grid for binary alphabets.
    pub grid_points: usize,
    /// Random restarts on top of the deterministic starts.
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop when an iteration improves the objective by less than this.
    pub tol: f64,
    pub seed: u64,
    /// A condition is satisfied when `lhs > rhs + margin`.
    pub margin: f64,
    /// Outcomes per measurement for random starts; `None` means `d²`.
    pub povm_outcomes: Option<usize>,
    pub budget: DimensionBudget,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid_points: 2001,
            restarts: 8,
            max_iters: 500,
            tol: 1e-12,
            seed: 0,
            margin: 1e-6,
            povm_outcomes: None,
            budget: DimensionBudget::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::validation("grid_points_at_least_two", format!("grid_points = {}", self.grid_points)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::validation("tol_positive", format!("tol = {}", self.tol)));
        }
        Ok(())
    }

    /// Independent generator for restart `r`.
    pub fn restart_rng(&self, r: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(r as u64 + 1))
    }
}

/// `−Σ p log₂ p`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum::<f64>().max(0.0)
}

fn output_distribution(p: &[f64], rows: &[Vec<f64>]) -> Vec<f64> {
    let mut q = vec![0.0; rows[0].len()];
    for (pa, row) in p.iter().zip(rows) {
        for (qb, v) in q.iter_mut().zip(row) {
            *qb += pa * v;
        }
    }
    q
}

/// `D(V_a ‖ q)` in bits for each input letter.
fn row_divergences(rows: &[Vec<f64>], q: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|row| {
            row.iter()
                .zip(q)
                .filter(|(&v, _)| v > 0.0)
                .map(|(&v, &qb)| v * (v / qb).log2())
                .sum()
        })
        .collect()
}

fn mi_rows(p: &[f64], rows: &[Vec<f64>]) -> f64 {
    let q = output_distribution(p, rows);
    let d = row_divergences(rows, &q);
    p.iter().zip(&d).map(|(pa, da)| pa * da).sum::<f64>().max(0.0)
}

/// `I(P, V) = H(PV) − Σ P(a) H(V_a)`.
pub fn mutual_information(p: &[f64], v: &ClassicalChannel) -> Result<f64> {
    if p.len() != v.inputs() {
        return Err(Error::DimensionMismatch {
            context: "prior over channel inputs",
            expected: v.inputs(),
            found: p.len(),
        });
    }
    check_distribution(p, "prior_distribution")?;
    Ok(mi_rows(p, v.rows()))
}

/// `χ = H(Σ P(a)ξ(a)) − Σ P(a) H(ξ(a))` at the ensemble's own prior.
pub fn holevo_chi(e: &CqEnsemble) -> f64 {
    let mixed = von_neumann_entropy(&e.average_state());
    let internal: f64 = e
        .prior()
        .iter()
        .zip(e.states())
        .map(|(p, s)| p * von_neumann_entropy(s))
        .sum();
    (mixed - internal).max(0.0)
}

fn chi_at(prior: &[f64], states: &[DensityOperator], entropies: &[f64]) -> f64 {
    let avg = DensityOperator::mixture(prior, states).expect("mixture of valid states");
    let internal: f64 = prior.iter().zip(entropies).map(|(p, h)| p * h).sum();
    (von_neumann_entropy(&avg) - internal).max(0.0)
}

/// Maximizer of a concave function on `[lo, hi]`.
fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Grid over `p ∈ [0, 1]` followed by a golden-section polish of the best
/// cell. Returns `(p, value)`.
fn binary_prior_search(grid_points: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let steps = grid_points - 1;
    let grid: Vec<f64> = (0..grid_points).map(|i| f(i as f64 / steps as f64)).collect();
    let best = (0..grid_points).fold(0, |b, i| if grid[i] > grid[b] { i } else { b });
    let (mut p, mut value) = (best as f64 / steps as f64, grid[best]);
    let lo = best.saturating_sub(1) as f64 / steps as f64;
    let hi = (best + 1).min(steps) as f64 / steps as f64;
    let (q, v) = golden_section(lo, hi, &f);
    if v > value {
        p = q;
        value = v;
    }
    (p, value)
}

/// Optimal value with its maximizing prior.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub value: f64,
    pub prior: Vec<f64>,
    pub converged: bool,
}

/// Holevo capacity `C(ξ) = max_P χ(P, ξ)`.
///
/// Binary alphabets use a prior grid; larger ones use the cq Blahut–Arimoto
/// iteration `P(a) ← P(a)·2^{D(ξ(a) ‖ ρ̄)}`, stopping once the duality gap
/// `max_a D(ξ(a) ‖ ρ̄) − χ` drops below `tol`.
pub fn holevo_capacity(e: &CqEnsemble, cfg: &OptimizerConfig) -> Result<CapacityResult> {
    cfg.validate()?;
    let states = e.states();
    let entropies: Vec<f64> = states.iter().map(von_neumann_entropy).collect();
    match states.len() {
        1 => Ok(CapacityResult {
            value: 0.0,
            prior: vec![1.0],
            converged: true,
        }),
        2 => {
            let (p, value) = binary_prior_search(cfg.grid_points, |p| chi_at(&[p, 1.0 - p], states, &entropies));
            Ok(CapacityResult {
                value,
                prior: vec![p, 1.0 - p],
                converged: true,
            })
        }
        n => {
            let mut prior = vec![1.0 / n as f64; n];
            let mut converged = false;
            let mut value = 0.0;
            for _ in 0..cfg.max_iters.max(1) * 20 {
                let avg = DensityOperator::mixture(&prior, states)?;
                let log_avg = spectral(&avg).map(|l| l.max(1e-300).log2());
                let div: Vec<f64> = states
                    .iter()
                    .zip(&entropies)
                    .map(|(s, h)| -h - s.expectation(&log_avg))
                    .collect();
                value = prior.iter().zip(&div).map(|(p, d)| p * d).sum::<f64>().max(0.0);
                let upper = div.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if upper - value < cfg.tol.max(1e-12) {
                    converged = true;
                    break;
                }
                for (p, d) in prior.iter_mut().zip(&div) {
                    *p *= d.exp2();
                }
                let total: f64 = prior.iter().sum();
                prior.iter_mut().for_each(|p| *p /= total);
            }
            Ok(CapacityResult { value, prior, converged })
        }
    }
}

/// Capacity of a classical channel by Blahut–Arimoto.
pub fn channel_capacity(v: &ClassicalChannel, cfg: &OptimizerConfig) -> CapacityResult {
    blahut_arimoto(v.rows(), cfg.tol, cfg.max_iters.max(1) * 20)
}

fn blahut_arimoto(rows: &[Vec<f64>], tol: f64, max_iters: usize) -> CapacityResult {
    let n = rows.len();
    let mut prior = vec![1.0 / n as f64; n];
    let mut value = 0.0;
    for _ in 0..max_iters {
        let q = output_distribution(&prior, rows);
        let div = row_divergences(rows, &q);
        value = prior.iter().zip(&div).map(|(p, d)| p * d).sum::<f64>().max(0.0);
        let upper = div.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if upper - value < tol.max(1e-13) {
            return CapacityResult {
                value,
                prior,
                converged: true,
            };
        }
        for (p, d) in prior.iter_mut().zip(&div) {
            *p *= d.exp2();
        }
        let total: f64 = prior.iter().sum();
        prior.iter_mut().for_each(|p| *p /= total);
    }
    CapacityResult {
        value,
        prior,
        converged: false,
    }
}

/// Best measurement found, with the prior it was evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOptimum {
    pub value: f64,
    pub prior: Vec<f64>,
    pub povm: Povm,
    pub converged: bool,
}

/// Rank-one effects `wⱼwⱼ†` with `Σ wⱼwⱼ† = I`.
#[derive(Debug, Clone)]
struct Frame {
    vectors: Vec<ComplexMatrix>,
}

impl Frame {
    /// Normalizes arbitrary spanning vectors by `S^{-1/2}`.
    fn normalized(raw: Vec<ComplexMatrix>) -> Option<Frame> {
        let d = raw[0].nrows();
        let mut s = DMatrix::zeros(d, d);
        for v in &raw {
            s += v * v.adjoint();
        }
        let sp = spectral_of(&s)?;
        if *sp.values.last()? <= 1e-12 * sp.values[0].max(1.0) {
            return None;
        }
        let inv_sqrt = sp.map(|l| 1.0 / l.sqrt());
        Some(Frame {
            vectors: raw.iter().map(|v| &inv_sqrt * v).collect(),
        })
    }

    /// Rank-one refinement of an arbitrary POVM.
    fn from_povm(m: &Povm) -> Frame {
        let mut vectors = Vec::new();
        for effect in m.effects() {
            let Some(sp) = spectral_of(effect) else { continue };
            for (i, &l) in sp.values.iter().enumerate() {
                if l > 1e-12 {
                    vectors.push(ComplexMatrix::from_column_slice(sp.vectors.nrows(), 1, sp.vectors.column(i).as_slice()).scale(l.sqrt()));
                }
            }
        }
        Frame { vectors }
    }

    fn random(d: usize, outcomes: usize, rng: &mut ChaCha8Rng) -> Option<Frame> {
        Self::normalized((0..outcomes).map(|_| random::ginibre(d, 1, rng)).collect())
    }

    fn effects(&self) -> Vec<ComplexMatrix> {
        self.vectors.iter().map(|w| hermitian_part(&(w * w.adjoint()))).collect()
    }

    fn to_povm(&self) -> Povm {
        Povm::new(self.effects()).expect("normalized frame is a POVM")
    }

    /// `q[a][j] = ⟨wⱼ|ξ(a)|wⱼ⟩`.
    fn probabilities(&self, states: &[DensityOperator]) -> Vec<Vec<f64>> {
        states
            .iter()
            .map(|s| {
                let mut row: Vec<f64> = self
                    .vectors
                    .iter()
                    .map(|w| (w.adjoint() * s.matrix() * w)[(0, 0)].re.max(0.0))
                    .collect();
                let total: f64 = row.iter().sum();
                row.iter_mut().for_each(|x| *x /= total);
                row
            })
            .collect()
    }
}

fn spectral_of(m: &ComplexMatrix) -> Option<crate::qmat::Spectrum> {
    crate::qmat::hermitian_spectrum(&hermitian_part(m)).ok()
}

/// Gradient ascent of `I(P, M∘ξ)` over rank-one POVMs at a fixed prior.
///
/// The gradient with respect to effect `Πⱼ` is
/// `Rⱼ = Σ_a P(a) ξ(a) ln(q(j|a)/q(j))`; each step moves
/// `wⱼ ← wⱼ + ε(Rⱼ − Λ)wⱼ` with `Λ` the Hermitian part of `Σ Rⱼ Πⱼ`, then
/// renormalizes the frame. Steps are accepted only when they improve the
/// objective, so the value is monotone.
fn ascend_frame(prior: &[f64], states: &[DensityOperator], mut frame: Frame, cfg: &OptimizerConfig) -> (Frame, f64, bool) {
    let d = states[0].dim();
    let mut value = mi_rows(prior, &frame.probabilities(states));
    let mut step = 1.0;
    for _ in 0..cfg.max_iters {
        let q = frame.probabilities(states);
        let marginal = output_distribution(prior, &q);
        let grads: Vec<ComplexMatrix> = (0..frame.vectors.len())
            .map(|j| {
                let mut r = DMatrix::zeros(d, d);
                if marginal[j] > 0.0 {
                    for (a, s) in states.iter().enumerate() {
                        if prior[a] == 0.0 {
                            continue;
                        }
                        let ratio = (q[a][j] / marginal[j]).max(1e-300).ln().max(-50.0);
                        r += s.matrix().scale(prior[a] * ratio);
                    }
                }
                r
            })
            .collect();
        let mut lambda = DMatrix::<Complex64>::zeros(d, d);
        for (r, w) in grads.iter().zip(&frame.vectors) {
            lambda += r * w * w.adjoint();
        }
        let lambda = hermitian_part(&lambda);
        let directions: Vec<ComplexMatrix> = grads
            .iter()
            .zip(&frame.vectors)
            .map(|(r, w)| (r - &lambda) * w)
            .collect();
        let slope: f64 = directions.iter().map(|g| g.norm_squared()).sum();
        if slope < 1e-24 {
            return (frame, value, true);
        }
        let mut accepted = None;
        while step > 1e-14 {
            let raw = frame
                .vectors
                .iter()
                .zip(&directions)
                .map(|(w, g)| w + g.scale(step))
                .collect();
            if let Some(candidate) = Frame::normalized(raw) {
                let v = mi_rows(prior, &candidate.probabilities(states));
                if v > value {
                    accepted = Some((candidate, v));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((candidate, v)) => {
                let gain = v - value;
                frame = candidate;
                value = v;
                step = (step * 2.0).min(1e3);
                if gain < cfg.tol {
                    return (frame, value, true);
                }
            }
            None => return (frame, value, true),
        }
    }
    (frame, value, false)
}

/// Deterministic starting measurements: Helstrom for binary alphabets,
/// the pretty-good measurement, and the computational basis.
fn deterministic_starts(e: &CqEnsemble) -> Vec<Frame> {
    let mut starts = Vec::new();
    let states = e.states();
    if states.len() == 2 {
        if let Ok(h) = helstrom(&states[0], &states[1], e.prior()[0]) {
            starts.push(Frame::from_povm(&h));
        }
    }
    if let Ok(pgm) = pretty_good_measurement(states, e.prior()) {
        starts.push(Frame::from_povm(&pgm));
    }
    starts.push(Frame::from_povm(&Povm::computational(e.dim())));
    starts
}

fn random_starts(e: &CqEnsemble, cfg: &OptimizerConfig) -> Vec<Frame> {
    let d = e.dim();
    let outcomes = cfg.povm_outcomes.unwrap_or(d * d).max(1);
    (0..cfg.restarts)
        .filter_map(|r| Frame::random(d, outcomes, &mut cfg.restart_rng(r)))
        .collect()
}

/// Accessible information `max_M I(P, M∘ξ)` at the ensemble's prior.
///
/// The returned value is exactly the mutual information of the returned POVM.
pub fn accessible_information(e: &CqEnsemble, cfg: &OptimizerConfig) -> Result<MeasurementOptimum> {
    cfg.validate()?;
    cfg.budget.check("ensemble dimension", e.dim())?;
    let prior = e.prior().to_vec();
    let mut best: Option<(Frame, f64, bool)> = None;
    for start in deterministic_starts(e).into_iter().chain(random_starts(e, cfg)) {
        let (frame, value, converged) = ascend_frame(&prior, e.states(), start, cfg);
        if best.as_ref().is_none_or(|(_, b, _)| value > *b) {
            best = Some((frame, value, converged));
        }
    }
    let (frame, value, converged) = best.expect("at least one start");
    Ok(MeasurementOptimum {
        value,
        prior,
        povm: frame.to_povm(),
        converged,
    })
}

fn seesaw(e: &CqEnsemble, start: Frame, cfg: &OptimizerConfig) -> (Frame, Vec<f64>, f64, bool) {
    let states = e.states();
    let n = states.len();
    let mut prior = vec![1.0 / n as f64; n];
    let mut frame = start;
    let mut value = f64::NEG_INFINITY;
    let outer = cfg.max_iters.clamp(1, 100);
    for _ in 0..outer {
        let (f, _, inner_ok) = ascend_frame(&prior, states, frame, cfg);
        frame = f;
        let cap = blahut_arimoto(&frame.probabilities(states), cfg.tol, cfg.max_iters.max(1) * 20);
        let gain = cap.value - value;
        prior = cap.prior;
        value = cap.value;
        if gain.abs() < cfg.tol.max(1e-13) {
            return (frame, prior, value, inner_ok && cap.converged);
        }
    }
    (frame, prior, value, false)
}

fn c1_from_starts(e: &CqEnsemble, starts: Vec<Frame>, cfg: &OptimizerConfig) -> Result<MeasurementOptimum> {
    let mut best: Option<(Frame, Vec<f64>, f64, bool)> = None;
    for start in starts {
        let run = seesaw(e, start, cfg);
        if best.as_ref().is_none_or(|b| run.2 > b.2) {
            best = Some(run);
        }
    }
    let (frame, prior, value, converged) = best.expect("at least one start");
    Ok(MeasurementOptimum {
        value,
        prior,
        povm: frame.to_povm(),
        converged,
    })
}

/// `C₁(ξ) = max_{P, M} I(P, M∘ξ)`, jointly over priors and single-copy
/// measurements. The ensemble's own prior is ignored.
pub fn c1(e: &CqEnsemble, cfg: &OptimizerConfig) -> Result<MeasurementOptimum> {
    cfg.validate()?;
    cfg.budget.check("ensemble dimension", e.dim())?;
    if e.alphabet_size() == 1 {
        return Ok(MeasurementOptimum {
            value: 0.0,
            prior: vec![1.0],
            povm: Povm::trivial(e.dim()),
            converged: true,
        });
    }
    let uniform = e.with_prior(vec![1.0 / e.alphabet_size() as f64; e.alphabet_size()])?;
    let starts = deterministic_starts(&uniform).into_iter().chain(random_starts(e, cfg)).collect();
    c1_from_starts(e, starts, cfg)
}

/// `C_k = max I(P, M∘ξ^{(k)})` over priors on `A^k` and arbitrary (entangled)
/// measurements on `H^{⊗k}`.
///
/// The `k`-fold product of the `C₁` optimum is always among the starts, so
/// the result is at least `k·C₁` up to optimizer tolerance.
pub fn c_k(e: &CqEnsemble, k: usize, cfg: &OptimizerConfig) -> Result<MeasurementOptimum> {
    cfg.validate()?;
    if k == 0 {
        return Err(Error::validation("block_length_positive", "k = 0"));
    }
    let single = c1(e, cfg)?;
    if k == 1 {
        return Ok(single);
    }
    let block = e.power(k, &cfg.budget)?;
    let product = expand(&FactorizedPovm::uniform(single.povm.clone(), k)?, &cfg.budget)?;
    let product_prior: Vec<f64> = crate::qchan::all_words(e.alphabet_size(), k)
        .iter()
        .map(|w| w.letters().iter().map(|&a| single.prior[a]).product())
        .collect();
    let product_value = mi_rows(&product_prior, &Frame::from_povm(&product).probabilities(block.states()));

    let uniform = block.with_prior(vec![1.0 / block.alphabet_size() as f64; block.alphabet_size()])?;
    let starts = std::iter::once(Frame::from_povm(&product))
        .chain(deterministic_starts(&uniform))
        .chain(random_starts(&block, cfg))
        .collect();
    let mut best = c1_from_starts(&block, starts, cfg)?;
    if product_value > best.value {
        best = MeasurementOptimum {
            value: product_value,
            prior: product_prior,
            povm: product,
            converged: best.converged,
        };
    }
    Ok(best)
}

/// Outcome of a feasibility test `lhs > rhs + margin`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub satisfied: bool,
    /// Prior attaining `lhs`.
    pub lhs_prior: Vec<f64>,
    /// Prior attaining `rhs`, when `rhs` is itself optimized.
    pub rhs_prior: Option<Vec<f64>>,
    /// Measurement attaining `rhs`, when there is one.
    pub rhs_povm: Option<Povm>,
    pub converged: bool,
}

impl ConditionReport {
    fn new(lhs: f64, rhs: f64, margin: f64) -> Self {
        ConditionReport {
            lhs,
            rhs,
            margin,
            satisfied: lhs > rhs + margin,
            lhs_prior: Vec::new(),
            rhs_prior: None,
            rhs_povm: None,
            converged: true,
        }
    }
}

/// `max_P [I(P,V) − I(P,W)]`: Bob's channel `V` against Eve's `W`.
///
/// The objective is a difference of concave functions, so binary alphabets
/// are searched on a grid and larger ones by multi-start mirror ascent from
/// the uniform prior, every vertex, and `restarts` random points.
pub fn classical_advantage(v: &ClassicalChannel, w: &ClassicalChannel, cfg: &OptimizerConfig) -> Result<ConditionReport> {
    cfg.validate()?;
    if v.inputs() != w.inputs() {
        return Err(Error::DimensionMismatch {
            context: "Bob and Eve input alphabets",
            expected: v.inputs(),
            found: w.inputs(),
        });
    }
    let objective = |p: &[f64]| mi_rows(p, v.rows()) - mi_rows(p, w.rows());
    let n = v.inputs();
    let (prior, value, converged) = match n {
        1 => (vec![1.0], 0.0, true),
        2 => {
            let (p, value) = binary_prior_search(cfg.grid_points, |p| objective(&[p, 1.0 - p]));
            (vec![p, 1.0 - p], value, true)
        }
        _ => {
            let mut starts = vec![vec![1.0 / n as f64; n]];
            starts.extend((0..n).map(|a| (0..n).map(|b| if a == b { 1.0 } else { 0.0 }).collect()));
            starts.extend((0..cfg.restarts).map(|r| random::simplex_point(n, &mut cfg.restart_rng(r))));
            let mut best: Option<(Vec<f64>, f64, bool)> = None;
            for start in starts {
                let run = mirror_ascent(start, v, w, cfg);
                if best.as_ref().is_none_or(|b| run.1 > b.1) {
                    best = Some(run);
                }
            }
            best.expect("at least one start")
        }
    };
    let mut report = ConditionReport::new(value.max(0.0), 0.0, cfg.margin);
    report.lhs_prior = prior;
    report.converged = converged;
    Ok(report)
}

/// Exponentiated-gradient ascent of `I(P,V) − I(P,W)` on the simplex.
fn mirror_ascent(mut p: Vec<f64>, v: &ClassicalChannel, w: &ClassicalChannel, cfg: &OptimizerConfig) -> (Vec<f64>, f64, bool) {
    let f = |p: &[f64]| mi_rows(p, v.rows()) - mi_rows(p, w.rows());
    let mut value = f(&p);
    let mut step = 1.0;
    for _ in 0..cfg.max_iters {
        let gv = row_divergences(v.rows(), &output_distribution(&p, v.rows()));
        let gw = row_divergences(w.rows(), &output_distribution(&p, w.rows()));
        let grad: Vec<f64> = gv.iter().zip(&gw).map(|(a, b)| a - b).collect();
        let mut moved = None;
        while step > 1e-14 {
            let mut q: Vec<f64> = p.iter().zip(&grad).map(|(pa, g)| pa * (step * g).exp2()).collect();
            let total: f64 = q.iter().sum();
            q.iter_mut().for_each(|x| *x /= total);
            let fq = f(&q);
            if fq > value {
                moved = Some((q, fq));
                break;
            }
            step *= 0.5;
        }
        match moved {
            Some((q, fq)) => {
                let gain = fq - value;
                p = q;
                value = fq;
                step = (step * 2.0).min(1e3);
                if gain < cfg.tol {
                    return (p, value, true);
                }
            }
            None => return (p, value, true),
        }
    }
    (p, value, false)
}

/// `C(Θ_B∘ξ) > C₁(Θ_E∘ξ)` for an encoding `ξ` and a channel `Θ` into
/// `H_B ⊗ H_E`.
pub fn quantum_condition(e: &CqEnsemble, theta: &QuantumChannel, cfg: &OptimizerConfig) -> Result<ConditionReport> {
    let bob = push_through(e, &theta.marginal(Side::Bob)?)?;
    let eve = push_through(e, &theta.marginal(Side::Eve)?)?;
    let lhs = holevo_capacity(&bob, cfg)?;
    let rhs = c1(&eve, cfg)?;
    let mut report = ConditionReport::new(lhs.value, rhs.value, cfg.margin);
    report.lhs_prior = lhs.prior;
    report.rhs_prior = Some(rhs.prior);
    report.rhs_povm = Some(rhs.povm);
    report.converged = lhs.converged && rhs.converged;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{pure_state, tensor, StateVector};
    use crate::qmeas::{coarse_grain, induced_channel};
    use approx::assert_abs_diff_eq;
    use rand::Rng as _;

    fn h2(p: f64) -> f64 {
        shannon_entropy(&[p, 1.0 - p])
    }

    fn pure_pair(s: f64, prior: [f64; 2]) -> CqEnsemble {
        CqEnsemble::new(
            prior.to_vec(),
            vec![
                pure_state(&StateVector::real_qubit(0.0)),
                pure_state(&StateVector::real_qubit(s.acos())),
            ],
        )
        .unwrap()
    }

    fn fast() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 3,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&[1.0, 0.0]), 0.0);
        assert_abs_diff_eq!(shannon_entropy(&[0.25; 4]), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(shannon_entropy(&[0.25, 0.75]), 0.811278124459, epsilon = 1e-11);
    }

    #[test]
    fn mutual_information_examples() {
        assert_abs_diff_eq!(mutual_information(&[0.5, 0.5], &ClassicalChannel::noiseless(2)).unwrap(), 1.0, epsilon = 1e-15);
        let constant = ClassicalChannel::new(vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        assert_abs_diff_eq!(mutual_information(&[0.4, 0.6], &constant).unwrap(), 0.0, epsilon = 1e-15);
        let bsc = ClassicalChannel::binary_symmetric(0.1);
        let got = mutual_information(&[0.5, 0.5], &bsc).unwrap();
        assert_abs_diff_eq!(got, 1.0 - h2(0.1), epsilon = 1e-14);
        assert_abs_diff_eq!(got, 0.531004, epsilon = 1e-6);
        assert!(mutual_information(&[1.0], &bsc).is_err());
    }

    #[test]
    fn holevo_chi_examples() {
        assert_abs_diff_eq!(holevo_chi(&pure_pair(0.0, [0.5, 0.5])), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(holevo_chi(&pure_pair(1.0, [0.5, 0.5])), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(holevo_chi(&pure_pair(0.5, [0.5, 0.5])), h2(0.75), epsilon = 1e-12);
        assert_abs_diff_eq!(h2(0.75), 0.811278, epsilon = 1e-6);
    }

    /// χ of a binary pure pair at prior p from the closed-form mixture
    /// eigenvalue (1 + √(1 − 4p(1−p)(1−s²)))/2.
    fn chi_closed(p: f64, s: f64) -> f64 {
        h2((1.0 + (1.0 - 4.0 * p * (1.0 - p) * (1.0 - s * s)).sqrt()) / 2.0)
    }

    #[test]
    fn holevo_capacity_examples() {
        let cfg = fast();
        let r = holevo_capacity(&pure_pair(0.0, [0.5, 0.5]), &cfg).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.prior[0], 0.5, epsilon = 1e-6);

        let oracle = (0..=10_000).map(|i| chi_closed(i as f64 / 10_000.0, 0.5)).fold(0.0, f64::max);
        let r = holevo_capacity(&pure_pair(0.5, [0.9, 0.1]), &cfg).unwrap();
        assert_abs_diff_eq!(r.value, oracle, epsilon = 1e-9);
        assert_abs_diff_eq!(r.value, 0.811278, epsilon = 1e-6);
        assert_abs_diff_eq!(r.prior[0], 0.5, epsilon = 1e-4);

        let single = CqEnsemble::uniform(vec![DensityOperator::maximally_mixed(2)]).unwrap();
        assert_eq!(holevo_capacity(&single, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn holevo_capacity_blahut_arimoto_matches_binary_grid() {
        // a duplicated letter must not change the capacity
        let e = pure_pair(0.3, [0.5, 0.5]);
        let mut states = e.states().to_vec();
        states.push(states[1].clone());
        let three = CqEnsemble::uniform(states).unwrap();
        let cfg = fast();
        let a = holevo_capacity(&e, &cfg).unwrap();
        let b = holevo_capacity(&three, &cfg).unwrap();
        assert!(b.converged);
        assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-8);

        // trine: three symmetric real qubit states, capacity 1 bit
        let trine: Vec<_> = (0..3)
            .map(|k| pure_state(&StateVector::real_qubit(std::f64::consts::PI * k as f64 / 3.0)))
            .collect();
        let r = holevo_capacity(&CqEnsemble::uniform(trine).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-8);
    }

    /// Brute force over real projective measurements at angle θ and priors.
    fn projective_grid(e: &CqEnsemble, priors: &[f64]) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..2000 {
            let theta = std::f64::consts::PI * i as f64 / 2000.0;
            let m = Povm::projective(&crate::qmat::from_row_major(2, 2, &[
                Complex64::new(theta.cos(), 0.0), Complex64::new(-theta.sin(), 0.0),
                Complex64::new(theta.sin(), 0.0), Complex64::new(theta.cos(), 0.0),
            ]).unwrap()).unwrap();
            let v = induced_channel(&m, e).unwrap();
            for &p in priors {
                best = best.max(mutual_information(&[p, 1.0 - p], &v).unwrap());
            }
        }
        best
    }

    #[test]
    fn accessible_information_examples() {
        let cfg = fast();
        let r = accessible_information(&pure_pair(0.0, [0.5, 0.5]), &cfg).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);

        let e = pure_pair(0.5, [0.5, 0.5]);
        let r = accessible_information(&e, &cfg).unwrap();
        let oracle = projective_grid(&e, &[0.5]);
        assert_abs_diff_eq!(oracle, 0.645421, epsilon = 1e-6);
        assert_abs_diff_eq!(r.value, oracle, epsilon = 1e-6);
        // the reported value belongs to the reported measurement
        let direct = mutual_information(&r.prior, &induced_channel(&r.povm, &e).unwrap()).unwrap();
        assert_abs_diff_eq!(direct, r.value, epsilon = 1e-12);

        let r = accessible_information(&pure_pair(1.0, [0.5, 0.5]), &cfg).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn c1_examples() {
        let cfg = fast();
        assert_abs_diff_eq!(c1(&pure_pair(0.0, [0.5, 0.5]), &cfg).unwrap().value, 1.0, epsilon = 1e-9);
        let e = pure_pair(0.5, [0.8, 0.2]);
        let r = c1(&e, &cfg).unwrap();
        let grid: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
        let oracle = projective_grid(&e, &grid);
        assert_abs_diff_eq!(r.value, oracle, epsilon = 1e-5);
        assert_abs_diff_eq!(r.value, 1.0 - h2((1.0 - 0.75f64.sqrt()) / 2.0), epsilon = 1e-6);
        assert_abs_diff_eq!(r.prior[0], 0.5, epsilon = 1e-3);
        assert_abs_diff_eq!(c1(&pure_pair(1.0, [0.5, 0.5]), &cfg).unwrap().value, 0.0, epsilon = 1e-12);
        let at_uniform = accessible_information(&pure_pair(0.5, [0.5, 0.5]), &cfg).unwrap().value;
        assert!(r.value >= at_uniform - 1e-9);
    }

    #[test]
    fn c_k_examples() {
        let cfg = fast();
        let e = pure_pair(0.5, [0.5, 0.5]);
        let one = c1(&e, &cfg).unwrap().value;
        assert_abs_diff_eq!(c_k(&e, 1, &cfg).unwrap().value, one, epsilon = 1e-12);

        let orth = pure_pair(0.0, [0.5, 0.5]);
        assert_abs_diff_eq!(c_k(&orth, 2, &cfg).unwrap().value, 2.0, epsilon = 1e-8);

        let two = c_k(&e, 2, &cfg).unwrap().value;
        let cap = holevo_capacity(&e, &cfg).unwrap().value;
        assert!(two >= 2.0 * one - 1e-6, "C2 = {two}, 2·C1 = {}", 2.0 * one);
        assert!(two <= 2.0 * cap + 1e-6);
        assert!((1.290832 - 1e-3..=1.622556 + 1e-3).contains(&two));
        assert!(matches!(c_k(&e, 0, &cfg), Err(Error::Validation { .. })));
    }

    #[test]
    fn classical_advantage_examples() {
        let cfg = fast();
        let bsc = ClassicalChannel::binary_symmetric(0.2);
        let r = classical_advantage(&bsc, &bsc, &cfg).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(!r.satisfied);

        let dumb = ClassicalChannel::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let r = classical_advantage(&ClassicalChannel::noiseless(2), &dumb, &cfg).unwrap();
        assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-12);
        assert!(r.satisfied);

        let v = ClassicalChannel::binary_symmetric(0.1);
        let w = ClassicalChannel::binary_symmetric(0.3);
        let r = classical_advantage(&v, &w, &cfg).unwrap();
        let oracle = (0..=20_000)
            .map(|i| {
                let p = [i as f64 / 20_000.0, 1.0 - i as f64 / 20_000.0];
                mutual_information(&p, &v).unwrap() - mutual_information(&p, &w).unwrap()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(oracle, h2(0.3) - h2(0.1), epsilon = 1e-9);
        assert_abs_diff_eq!(r.lhs, oracle, epsilon = 1e-9);
        assert_abs_diff_eq!(r.lhs, 0.412295, epsilon = 1e-6);
        assert_abs_diff_eq!(r.lhs_prior[0], 0.5, epsilon = 1e-4);
        assert!(r.satisfied);
    }

    #[test]
    fn classical_advantage_ternary_is_nonnegative_and_beats_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let cfg = fast();
        for _ in 0..5 {
            let v = ClassicalChannel::new((0..3).map(|_| random::simplex_point(3, &mut rng)).collect()).unwrap();
            let w = ClassicalChannel::new((0..3).map(|_| random::simplex_point(3, &mut rng)).collect()).unwrap();
            let r = classical_advantage(&v, &w, &cfg).unwrap();
            let mut grid: f64 = 0.0;
            for i in 0..=60 {
                for j in 0..=(60 - i) {
                    let p = [i as f64 / 60.0, j as f64 / 60.0, (60 - i - j) as f64 / 60.0];
                    grid = grid.max(mutual_information(&p, &v).unwrap() - mutual_information(&p, &w).unwrap());
                }
            }
            assert!(r.lhs >= grid - 1e-4, "ascent {} < grid {grid}", r.lhs);
        }
    }

    #[test]
    fn quantum_condition_on_ideal_eavesdropping() {
        let cfg = fast();
        let theta = QuantumChannel::identity(4).with_output_split(&[2, 2]).unwrap();
        for (s, expect_sat) in [(0.5, true), (0.0, false), (1.0, false)] {
            let phi = pure_state(&StateVector::real_qubit(0.0));
            let psi = pure_state(&StateVector::real_qubit(f64::acos(s)));
            let e = CqEnsemble::uniform(vec![tensor(&phi, &phi), tensor(&psi, &psi)]).unwrap();
            let r = quantum_condition(&e, &theta, &cfg).unwrap();
            assert_eq!(r.satisfied, expect_sat, "s = {s}: {r:?}");
            if expect_sat {
                assert_abs_diff_eq!(r.lhs, 0.811278, epsilon = 1e-6);
                assert_abs_diff_eq!(r.rhs, 0.645421, epsilon = 1e-6);
            } else {
                assert!((r.lhs - r.rhs).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn config_validation() {
        let bad = OptimizerConfig { grid_points: 1, ..OptimizerConfig::default() };
        assert_eq!(bad.validate().unwrap_err().invariant_name(), "grid_points_at_least_two");
        let bad = OptimizerConfig { tol: 0.0, ..OptimizerConfig::default() };
        assert_eq!(bad.validate().unwrap_err().invariant_name(), "tol_positive");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn random_qubit_ensemble(rng: &mut ChaCha8Rng, letters: usize) -> CqEnsemble {
            let states = (0..letters).map(|_| random::density(2, 1 + rng.random_range(0..2), rng)).collect();
            CqEnsemble::new(random::simplex_point(letters, rng), states).unwrap()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(50))]

            #[test]
            fn holevo_bound(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let letters = 2 + rng.random_range(0..2);
                let e = random_qubit_ensemble(&mut rng, letters);
                let cfg = OptimizerConfig { restarts: 1, ..OptimizerConfig::default() };
                let acc = accessible_information(&e, &cfg).unwrap();
                let chi = holevo_chi(&e);
                prop_assert!(acc.value <= chi + 1e-6);
                prop_assert!(chi <= shannon_entropy(e.prior()) + 1e-9);
            }

            #[test]
            fn coarse_graining_never_helps(seed in any::<u64>(), k in 1usize..4) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let e = random_qubit_ensemble(&mut rng, 3);
                let m = random::povm(2, 4, &mut rng);
                let f: Vec<usize> = (0..4).map(|_| rng.random_range(0..k)).collect();
                let fine = mutual_information(e.prior(), &induced_channel(&m, &e).unwrap()).unwrap();
                let coarse_povm = coarse_grain(&m, &f).unwrap().povm;
                let coarse = mutual_information(e.prior(), &induced_channel(&coarse_povm, &e).unwrap()).unwrap();
                prop_assert!(coarse <= fine + 1e-9);
            }

            #[test]
            fn self_advantage_is_zero(seed in any::<u64>(), n in 2usize..4) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let v = ClassicalChannel::new((0..n).map(|_| random::simplex_point(3, &mut rng)).collect()).unwrap();
                let r = classical_advantage(&v, &v, &OptimizerConfig { restarts: 2, ..OptimizerConfig::default() }).unwrap();
                prop_assert!(r.lhs.abs() <= 1e-9);
                prop_assert!(!r.satisfied);
            }

            #[test]
            fn mutual_information_bounds(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let v = ClassicalChannel::new((0..3).map(|_| random::simplex_point(2, &mut rng)).collect()).unwrap();
                let p = random::simplex_point(3, &mut rng);
                let i = mutual_information(&p, &v).unwrap();
                prop_assert!(i >= 0.0);
                prop_assert!(i <= shannon_entropy(&p).min(1.0) + 1e-12);
            }
        }
    }
}

//! Quantum channels in Kraus form and classical-quantum ensembles.
//!
//! A key-distribution channel maps Alice's space into `H_B ⊗ H_E`; the
//! output split is recorded on the channel so that Bob's and Eve's marginal
//! channels can be derived from it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{
    self, hermitian_part, identity, kron, max_abs_diff, ComplexMatrix, DensityOperator,
    TensorFactorization,
};
use crate::qmeas::ClassicalChannel;

/// Tolerance on `‖Σ K†K − I‖_max`.
pub const TRACE_PRESERVING_TOL: f64 = 1e-9;

/// Above this many Kraus operators a tensor power is applied slot by slot
/// instead of materializing the Kronecker family.
pub const LAZY_KRAUS_THRESHOLD: usize = 10_000;

/// Upper bound on any Hilbert-space dimension the crate will materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionBudget {
    pub max_dim: usize,
}

impl Default for DimensionBudget {
    fn default() -> Self {
        DimensionBudget { max_dim: 1 << 12 }
    }
}

impl DimensionBudget {
    /// `base^n`, failing when it overflows or exceeds the budget.
    pub fn power(&self, what: &str, base: usize, n: usize) -> Result<usize> {
        let mut acc: usize = 1;
        for _ in 0..n {
            acc = acc.checked_mul(base).filter(|&v| v <= self.max_dim).ok_or_else(|| {
                Error::BudgetExceeded {
                    dimension: format!("{what} = {base}^{n}"),
                    required: base.saturating_pow(n as u32),
                    limit: self.max_dim,
                }
            })?;
        }
        Ok(acc)
    }

    pub fn check(&self, what: &str, dim: usize) -> Result<()> {
        if dim > self.max_dim {
            return Err(Error::BudgetExceeded {
                dimension: what.to_string(),
                required: dim,
                limit: self.max_dim,
            });
        }
        Ok(())
    }
}

/// Which party's output leg to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Bob,
    Eve,
}

#[derive(Debug, Clone, PartialEq)]
enum Kraus {
    Explicit(Vec<ComplexMatrix>),
    /// `n`-fold tensor power of `base`, applied slot by slot.
    Power { base: Box<QuantumChannel>, n: usize },
}

/// A completely positive trace-preserving map `ρ ↦ Σ KᵢρKᵢ†`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Kraus,
    out_split: Option<TensorFactorization>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::validation("kraus_nonempty", "no Kraus operators"))?;
        let (out_dim, in_dim) = first.shape();
        let mut sum = DMatrix::<Complex64>::zeros(in_dim, in_dim);
        for k in &kraus {
            if k.shape() != (out_dim, in_dim) {
                return Err(Error::validation(
                    "kraus_shapes_agree",
                    format!("{:?} vs {:?}", k.shape(), (out_dim, in_dim)),
                ));
            }
            sum += k.adjoint() * k;
        }
        let defect = max_abs_diff(&sum, &identity(in_dim));
        if defect > TRACE_PRESERVING_TOL {
            return Err(Error::validation(
                "trace_preserving",
                format!("‖Σ K†K − I‖_max = {defect:e}"),
            ));
        }
        Ok(QuantumChannel {
            in_dim,
            out_dim,
            kraus: Kraus::Explicit(kraus),
            out_split: None,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(vec![identity(d)]).expect("identity is a channel")
    }

    /// `ρ ↦ (1 − λ)ρ + λ·Tr(ρ)·I/d`, via the Weyl operators `XᵃZᵇ`.
    pub fn depolarizing(d: usize, lambda: f64) -> Result<Self> {
        let max = (d * d) as f64 / (d * d - 1).max(1) as f64;
        if !(0.0..=max).contains(&lambda) {
            return Err(Error::validation(
                "depolarizing_parameter",
                format!("λ = {lambda} outside [0, {max}]"),
            ));
        }
        let omega = Complex64::from_polar(1.0, std::f64::consts::TAU / d as f64);
        let mut kraus = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let weight = if a == 0 && b == 0 {
                    1.0 - lambda + lambda / (d * d) as f64
                } else {
                    lambda / (d * d) as f64
                };
                if weight <= 0.0 {
                    continue;
                }
                // (XᵃZᵇ)|j⟩ = ωᵇʲ |j + a⟩
                let w = DMatrix::from_fn(d, d, |r, c| {
                    if r == (c + a) % d {
                        omega.powu((b * c) as u32)
                    } else {
                        qmat::ZERO
                    }
                });
                kraus.push(w.scale(weight.sqrt()));
            }
        }
        Self::new(kraus)
    }

    /// Classical broadcast `|a⟩ ↦ Σ V(b|a)W(e|a) |b⟩⟨b| ⊗ |e⟩⟨e|`, with the
    /// output split as `[|B|, |E|]`.
    pub fn classical_broadcast(bob: &ClassicalChannel, eve: &ClassicalChannel) -> Result<Self> {
        if bob.inputs() != eve.inputs() {
            return Err(Error::DimensionMismatch {
                context: "broadcast input alphabets",
                expected: bob.inputs(),
                found: eve.inputs(),
            });
        }
        let (nb, ne) = (bob.outputs(), eve.outputs());
        let mut kraus = Vec::new();
        for a in 0..bob.inputs() {
            for b in 0..nb {
                for e in 0..ne {
                    let p = bob.prob(a, b) * eve.prob(a, e);
                    if p == 0.0 {
                        continue;
                    }
                    let mut k = DMatrix::zeros(nb * ne, bob.inputs());
                    k[(b * ne + e, a)] = Complex64::new(p.sqrt(), 0.0);
                    kraus.push(k);
                }
            }
        }
        Self::new(kraus)?.with_output_split(&[nb, ne])
    }

    /// `Φ ⊗ Ψ` on `H_in(Φ) ⊗ H_in(Ψ)`, output split as `[out(Φ), out(Ψ)]`.
    pub fn product(first: &QuantumChannel, second: &QuantumChannel) -> Result<Self> {
        let (a, b) = (first.kraus_operators(), second.kraus_operators());
        let kraus = a.iter().flat_map(|k| b.iter().map(move |l| kron(k, l))).collect();
        Self::new(kraus)?.with_output_split(&[first.out_dim, second.out_dim])
    }

    /// `after ∘ before`.
    pub fn compose(after: &QuantumChannel, before: &QuantumChannel) -> Result<Self> {
        if after.in_dim != before.out_dim {
            return Err(Error::DimensionMismatch {
                context: "channel composition",
                expected: after.in_dim,
                found: before.out_dim,
            });
        }
        let (a, b) = (after.kraus_operators(), before.kraus_operators());
        let kraus = a.iter().flat_map(|k| b.iter().map(move |l| k * l)).collect();
        let mut out = Self::new(kraus)?;
        out.out_split = after.out_split.clone();
        Ok(out)
    }

    /// Marks the output space as a tensor product of the given factors.
    pub fn with_output_split(mut self, factors: &[usize]) -> Result<Self> {
        let f = TensorFactorization::new(factors.to_vec())?;
        if f.total() != self.out_dim {
            return Err(Error::validation(
                "factorization_consistent",
                format!("split {factors:?} for output dimension {}", self.out_dim),
            ));
        }
        self.out_split = Some(f);
        Ok(self)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn output_split(&self) -> Option<&TensorFactorization> {
        self.out_split.as_ref()
    }

    /// Number of Kraus operators, materialized or not.
    pub fn kraus_count(&self) -> usize {
        match &self.kraus {
            Kraus::Explicit(k) => k.len(),
            Kraus::Power { base, n } => base.kraus_count().saturating_pow(*n as u32),
        }
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.kraus, Kraus::Power { .. })
    }

    /// Materializes the Kraus family (expensive for lazy powers).
    pub fn kraus_operators(&self) -> Vec<ComplexMatrix> {
        match &self.kraus {
            Kraus::Explicit(k) => k.clone(),
            Kraus::Power { base, n } => kron_power(&base.kraus_operators(), *n),
        }
    }

    /// `Σ KᵢρKᵢ†` for a bare matrix, without validation.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.nrows() != self.in_dim || rho.ncols() != self.in_dim {
            return Err(Error::DimensionMismatch {
                context: "channel input",
                expected: self.in_dim,
                found: rho.nrows(),
            });
        }
        match &self.kraus {
            Kraus::Explicit(kraus) => {
                let mut out = DMatrix::zeros(self.out_dim, self.out_dim);
                for k in kraus {
                    out += k * rho * k.adjoint();
                }
                Ok(out)
            }
            Kraus::Power { base, n } => {
                let mut current = rho.clone();
                for slot in 0..*n {
                    let left = identity(base.out_dim.pow(slot as u32));
                    let right = identity(base.in_dim.pow((*n - slot - 1) as u32));
                    let d = left.nrows() * base.out_dim * right.nrows();
                    let mut next = DMatrix::zeros(d, d);
                    for k in base.kraus_operators() {
                        let full = kron(&kron(&left, &k), &right);
                        next += &full * &current * full.adjoint();
                    }
                    current = next;
                }
                Ok(current)
            }
        }
    }

    /// Applies the channel to a state.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let mut out = hermitian_part(&self.apply_matrix(rho.matrix())?);
        // absorb trace drift permitted by the trace-preservation tolerance
        let tr = qmat::trace(&out).re;
        if (tr - 1.0).abs() <= TRACE_PRESERVING_TOL * self.in_dim as f64 {
            out.unscale_mut(tr);
        }
        DensityOperator::new(out)
    }

    /// `Θ^⊗n`, acting on `H_in^⊗n` with output split repeated per slot.
    pub fn tensor_power(&self, n: usize, budget: &DimensionBudget) -> Result<Self> {
        self.tensor_power_with_threshold(n, budget, LAZY_KRAUS_THRESHOLD)
    }

    pub(crate) fn tensor_power_with_threshold(
        &self,
        n: usize,
        budget: &DimensionBudget,
        lazy_threshold: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("block_length_positive", "n = 0"));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let in_dim = budget.power("channel input dimension", self.in_dim, n)?;
        let out_dim = budget.power("channel output dimension", self.out_dim, n)?;
        let out_split = match &self.out_split {
            Some(f) => Some(TensorFactorization::repeated(f.dims(), n)?),
            None => Some(TensorFactorization::repeated(&[self.out_dim], n)?),
        };
        let count = self.kraus_count().checked_pow(n as u32);
        let kraus = match count {
            Some(c) if c <= lazy_threshold => Kraus::Explicit(kron_power(&self.kraus_operators(), n)),
            _ => Kraus::Power {
                base: Box::new(self.clone()),
                n,
            },
        };
        Ok(QuantumChannel {
            in_dim,
            out_dim,
            kraus,
            out_split,
        })
    }

    /// `Tr_E ∘ Θ` or `Tr_B ∘ Θ`; requires a two-factor output split.
    pub fn marginal(&self, side: Side) -> Result<Self> {
        let split = self.out_split.as_ref().ok_or_else(|| {
            Error::validation("output_split_present", "channel has no B/E output split")
        })?;
        if let Kraus::Power { base, n } = &self.kraus {
            // per-slot marginals of a power are the power of the marginal
            let m = base.marginal(side)?;
            return Ok(QuantumChannel {
                in_dim: self.in_dim,
                out_dim: m.out_dim.pow(*n as u32),
                kraus: Kraus::Power { base: Box::new(m), n: *n },
                out_split: None,
            });
        }
        if split.len() != 2 {
            return Err(Error::validation(
                "output_split_two_factors",
                format!("split {:?} has {} factors", split.dims(), split.len()),
            ));
        }
        let (db, de) = (split.dims()[0], split.dims()[1]);
        let mut kraus = Vec::new();
        for k in self.kraus_operators() {
            match side {
                Side::Bob => {
                    for e in 0..de {
                        kraus.push(DMatrix::from_fn(db, self.in_dim, |r, c| k[(r * de + e, c)]));
                    }
                }
                Side::Eve => {
                    for b in 0..db {
                        kraus.push(DMatrix::from_fn(de, self.in_dim, |r, c| k[(b * de + r, c)]));
                    }
                }
            }
        }
        Self::new(kraus)
    }
}

fn kron_power(base: &[ComplexMatrix], n: usize) -> Vec<ComplexMatrix> {
    let mut family = base.to_vec();
    for _ in 1..n {
        family = family
            .iter()
            .flat_map(|k| base.iter().map(move |l| kron(k, l)))
            .collect();
    }
    family
}

/// Finite sequence of alphabet letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword(pub Vec<usize>);

impl Codeword {
    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Tolerance on `|Σ P(a) − 1|`.
pub const PRIOR_TOL: f64 = 1e-10;

pub(crate) fn check_distribution(p: &[f64], what: &'static str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::validation(what, "empty distribution"));
    }
    if let Some(bad) = p.iter().find(|&&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::validation(what, format!("entry {bad} is negative or not finite")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PRIOR_TOL {
        return Err(Error::validation(what, format!("entries sum to {total}")));
    }
    Ok(())
}

/// A finite alphabet `{0, …, |A|−1}` with a prior and a state per letter.
#[derive(Debug, Clone, PartialEq)]
pub struct CqEnsemble {
    prior: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl CqEnsemble {
    pub fn new(prior: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::validation("alphabet_nonempty", "no letters"));
        }
        if prior.len() != states.len() {
            return Err(Error::DimensionMismatch {
                context: "prior length",
                expected: states.len(),
                found: prior.len(),
            });
        }
        check_distribution(&prior, "prior_distribution")?;
        let d = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                context: "ensemble state dimension",
                expected: d,
                found: s.dim(),
            });
        }
        Ok(CqEnsemble { prior, states })
    }

    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(vec![1.0 / n as f64; states.len()], states)
    }

    pub fn with_prior(&self, prior: Vec<f64>) -> Result<Self> {
        Self::new(prior, self.states.clone())
    }

    pub fn alphabet_size(&self) -> usize {
        self.states.len()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn state(&self, letter: usize) -> Option<&DensityOperator> {
        self.states.get(letter)
    }

    /// `Σ P(a) ξ(a)`.
    pub fn average_state(&self) -> DensityOperator {
        DensityOperator::mixture(&self.prior, &self.states).expect("mixture of valid states")
    }

    /// `ξ(a₁) ⊗ … ⊗ ξ(aₙ)`.
    pub fn encode(&self, word: &Codeword) -> Result<DensityOperator> {
        if word.is_empty() {
            return Err(Error::validation("codeword_nonempty", "empty codeword"));
        }
        let states = word
            .letters()
            .iter()
            .map(|&a| {
                self.state(a).cloned().ok_or_else(|| {
                    Error::validation(
                        "letter_in_alphabet",
                        format!("letter {a} not in alphabet of size {}", self.alphabet_size()),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(qmat::tensor_all(&states))
    }

    /// The memoryless extension over `A^k`: words in lexicographic order,
    /// product priors and product states.
    pub fn power(&self, k: usize, budget: &DimensionBudget) -> Result<Self> {
        budget.power("block state dimension", self.dim(), k)?;
        let words = all_words(self.alphabet_size(), k);
        let prior = words
            .iter()
            .map(|w| w.letters().iter().map(|&a| self.prior[a]).product())
            .collect();
        let states = words.iter().map(|w| self.encode(w)).collect::<Result<_>>()?;
        Self::new(prior, states)
    }
}

/// All words of length `n` over `{0, …, q−1}` in lexicographic order.
pub fn all_words(q: usize, n: usize) -> Vec<Codeword> {
    let total = q.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut letters = vec![0; n];
            for slot in letters.iter_mut().rev() {
                *slot = idx % q;
                idx /= q;
            }
            Codeword(letters)
        })
        .collect()
}

/// `a ↦ Θ(ξ(a))`, keeping the prior.
pub fn push_through(e: &CqEnsemble, c: &QuantumChannel) -> Result<CqEnsemble> {
    if e.dim() != c.in_dim() {
        return Err(Error::DimensionMismatch {
            context: "ensemble into channel",
            expected: c.in_dim(),
            found: e.dim(),
        });
    }
    let states = e.states().iter().map(|s| c.apply(s)).collect::<Result<_>>()?;
    CqEnsemble::new(e.prior().to_vec(), states)
}

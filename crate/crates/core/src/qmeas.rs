//! Measurements: POVMs, factorized and coarse-grained observables, and the
//! classical channels they induce through the Born rule.
//!
//! Eve's admissible observables are always built as `coarse_grain(expand(slots), f)`,
//! i.e. a product of per-slot POVMs followed by a classical decision rule.
//! Joint outcomes of a [`FactorizedPovm`] are enumerated in lexicographic order.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qchan::{check_distribution, CqEnsemble, DimensionBudget};
use crate::qmat::{
    self, hermitian_part, hermitian_spectrum, identity, kron, max_abs_diff, ComplexMatrix,
    DensityOperator, HERMITIAN_TOL, PSD_TOL,
};

/// Tolerance on `‖Σ M(b) − I‖_max`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Tolerance on classical channel row sums.
pub const ROW_SUM_TOL: f64 = 1e-10;

/// Eigenvalues below this are treated as zero when inverting.
const RANK_TOL: f64 = 1e-12;

/// Positive operator-valued measure with outcomes `0..effects.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::validation("povm_nonempty", "no effects"))?;
        let d = first.nrows();
        let mut sum = DMatrix::zeros(d, d);
        for (b, m) in effects.iter().enumerate() {
            if m.shape() != (d, d) {
                return Err(Error::DimensionMismatch {
                    context: "POVM effect",
                    expected: d,
                    found: m.nrows(),
                });
            }
            let defect = qmat::hermiticity_defect(m);
            if defect > HERMITIAN_TOL {
                return Err(Error::validation(
                    "effect_hermitian",
                    format!("effect {b}: ‖M − M†‖_max = {defect:e}"),
                ));
            }
            let min = hermitian_spectrum(m)?.values.last().copied().unwrap_or(0.0);
            if min < -PSD_TOL {
                return Err(Error::validation(
                    "effect_positive",
                    format!("effect {b} has eigenvalue {min:e}"),
                ));
            }
            sum += m;
        }
        let defect = max_abs_diff(&sum, &identity(d));
        if defect > COMPLETENESS_TOL {
            return Err(Error::validation(
                "povm_completeness",
                format!("‖Σ M(b) − I‖_max = {defect:e}"),
            ));
        }
        Ok(Povm { effects })
    }

    /// `{I}`.
    pub fn trivial(d: usize) -> Self {
        Povm {
            effects: vec![identity(d)],
        }
    }

    /// Projective measurement in the computational basis.
    pub fn computational(d: usize) -> Self {
        Self::projective(&identity(d)).expect("identity is unitary")
    }

    /// Projectors onto the columns of a unitary.
    pub fn projective(basis: &ComplexMatrix) -> Result<Self> {
        let effects = (0..basis.ncols())
            .map(|j| {
                let v = basis.column(j);
                v * v.adjoint()
            })
            .collect();
        Self::new(effects)
    }

    /// Rank-one POVM `S^{-1/2} vⱼvⱼ† S^{-1/2}` with `S = Σ vⱼvⱼ†`; the frame
    /// must span the space.
    pub fn from_frame(vectors: &[ComplexMatrix]) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::validation("povm_nonempty", "empty frame"))?;
        let d = first.nrows();
        let mut s = DMatrix::zeros(d, d);
        for v in vectors {
            s += v * v.adjoint();
        }
        let spectrum = hermitian_spectrum(&hermitian_part(&s))?;
        let min = spectrum.values.last().copied().unwrap_or(0.0);
        if min <= RANK_TOL * spectrum.values[0].max(1.0) {
            return Err(Error::validation("frame_spans", format!("frame operator eigenvalue {min:e}")));
        }
        let inv_sqrt = spectrum.map(|l| 1.0 / l.sqrt());
        let effects = vectors
            .iter()
            .map(|v| {
                let w = &inv_sqrt * v;
                hermitian_part(&(&w * w.adjoint()))
            })
            .collect();
        Self::new(effects)
    }

    pub fn dim(&self) -> usize {
        self.effects[0].nrows()
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, b: usize) -> &ComplexMatrix {
        &self.effects[b]
    }

    /// `P(b) = Tr M(b)ρ`, with round-off negatives clipped to zero.
    pub fn born_rule(&self, rho: &DensityOperator) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "measured state",
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(self.effects.iter().map(|m| rho.expectation(m).max(0.0)).collect())
    }
}

/// `P(b) = Tr M(b)ρ`.
pub fn born_rule(m: &Povm, rho: &DensityOperator) -> Result<Vec<f64>> {
    m.born_rule(rho)
}

/// Row-stochastic transition matrix `V(b|a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannel {
    rows: Vec<Vec<f64>>,
}

impl ClassicalChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map(Vec::len).unwrap_or(0);
        if width == 0 {
            return Err(Error::validation("channel_nonempty", "no rows or no outputs"));
        }
        for (a, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch {
                    context: "channel row length",
                    expected: width,
                    found: row.len(),
                });
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::validation("row_stochastic", format!("row {a} has entries outside [0,1]")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::validation("row_stochastic", format!("row {a} sums to {total}")));
            }
        }
        Ok(ClassicalChannel { rows })
    }

    pub fn binary_symmetric(eps: f64) -> Self {
        Self::new(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]]).expect("valid crossover")
    }

    pub fn noiseless(n: usize) -> Self {
        ClassicalChannel {
            rows: (0..n).map(|a| (0..n).map(|b| if a == b { 1.0 } else { 0.0 }).collect()).collect(),
        }
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.rows[a][b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.rows[a]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// The classical channel `a ↦ born_rule(m, ξ(a))`.
pub fn induced_channel(m: &Povm, e: &CqEnsemble) -> Result<ClassicalChannel> {
    let rows = e
        .states()
        .iter()
        .map(|s| {
            let mut row = m.born_rule(s)?;
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p = (*p / total).min(1.0));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    ClassicalChannel::new(rows)
}

/// Product of per-slot POVMs on `H₁ ⊗ … ⊗ Hₙ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizedPovm {
    slots: Vec<Povm>,
}

impl FactorizedPovm {
    pub fn new(slots: Vec<Povm>) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::validation("slots_nonempty", "no slots"));
        }
        Ok(FactorizedPovm { slots })
    }

    /// The same POVM in each of `n` slots.
    pub fn uniform(slot: Povm, n: usize) -> Result<Self> {
        Self::new(vec![slot; n])
    }

    pub fn slots(&self) -> &[Povm] {
        &self.slots
    }

    pub fn dim(&self) -> usize {
        self.slots.iter().map(Povm::dim).product()
    }

    pub fn outcomes(&self) -> usize {
        self.slots.iter().map(Povm::outcomes).product()
    }

    /// Per-slot outcome tuple of a flat joint outcome index.
    pub fn outcome_tuple(&self, mut index: usize) -> Vec<usize> {
        let mut tuple = vec![0; self.slots.len()];
        for (t, slot) in tuple.iter_mut().zip(&self.slots).rev() {
            *t = index % slot.outcomes();
            index /= slot.outcomes();
        }
        tuple
    }

    /// Born probabilities of the joint outcomes on a product state, from the
    /// per-slot marginals.
    pub fn product_born_rule(&self, states: &[DensityOperator]) -> Result<Vec<f64>> {
        if states.len() != self.slots.len() {
            return Err(Error::DimensionMismatch {
                context: "product state slots",
                expected: self.slots.len(),
                found: states.len(),
            });
        }
        let per_slot = self
            .slots
            .iter()
            .zip(states)
            .map(|(m, s)| m.born_rule(s))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.outcomes())
            .map(|i| {
                self.outcome_tuple(i)
                    .iter()
                    .zip(&per_slot)
                    .map(|(&b, p)| p[b])
                    .product()
            })
            .collect())
    }
}

/// Flattens a factorized POVM into Kronecker-product effects.
pub fn expand(f: &FactorizedPovm, budget: &DimensionBudget) -> Result<Povm> {
    budget.check("factorized POVM dimension", f.dim())?;
    budget.check("factorized POVM outcome count", f.outcomes())?;
    let mut effects = f.slots[0].effects.clone();
    for slot in &f.slots[1..] {
        effects = effects
            .iter()
            .flat_map(|a| slot.effects.iter().map(move |b| kron(a, b)))
            .collect();
    }
    Ok(Povm { effects })
}

/// A POVM whose outcomes are relabelled by an outcome function.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseGrained {
    pub povm: Povm,
    /// Image of the outcome function; outcome `i` of `povm` is `labels[i]`.
    pub labels: Vec<usize>,
}

fn check_outcome_function(m: &Povm, f: &[usize]) -> Result<()> {
    if f.len() != m.outcomes() {
        return Err(Error::validation(
            "outcome_function_total",
            format!("function defined on {} of {} outcomes", f.len(), m.outcomes()),
        ));
    }
    Ok(())
}

/// `F(k) = Σ_{b ∈ f⁻¹(k)} M(b)`; the outcome set is the image of `f`.
pub fn coarse_grain(m: &Povm, f: &[usize]) -> Result<CoarseGrained> {
    check_outcome_function(m, f)?;
    let mut labels = f.to_vec();
    labels.sort_unstable();
    labels.dedup();
    let effects = labels
        .iter()
        .map(|&k| {
            f.iter()
                .zip(&m.effects)
                .filter(|(&fk, _)| fk == k)
                .fold(DMatrix::zeros(m.dim(), m.dim()), |acc, (_, e)| acc + e)
        })
        .collect();
    Ok(CoarseGrained {
        povm: Povm { effects },
        labels,
    })
}

/// Like [`coarse_grain`] but onto the fixed outcome set `0..count`, leaving
/// zero effects for keys outside the image.
pub fn coarse_grain_onto(m: &Povm, f: &[usize], count: usize) -> Result<Povm> {
    check_outcome_function(m, f)?;
    if let Some(&bad) = f.iter().find(|&&k| k >= count) {
        return Err(Error::validation("outcome_function_range", format!("value {bad} ≥ {count}")));
    }
    let mut effects = vec![DMatrix::zeros(m.dim(), m.dim()); count];
    for (&k, e) in f.iter().zip(&m.effects) {
        effects[k] += e;
    }
    Ok(Povm { effects })
}

fn check_prior(p0: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::validation("prior_distribution", format!("p0 = {p0}")));
    }
    Ok(())
}

fn helstrom_operator(rho0: &DensityOperator, rho1: &DensityOperator, p0: f64) -> Result<ComplexMatrix> {
    check_prior(p0)?;
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch {
            context: "Helstrom pair",
            expected: rho0.dim(),
            found: rho1.dim(),
        });
    }
    Ok(rho0.matrix().scale(p0) - rho1.matrix().scale(1.0 - p0))
}

/// Minimum-error measurement for two states: outcome 0 projects onto the
/// positive eigenspace of `p₀ρ₀ − (1−p₀)ρ₁`.
pub fn helstrom(rho0: &DensityOperator, rho1: &DensityOperator, p0: f64) -> Result<Povm> {
    let gamma = helstrom_operator(rho0, rho1, p0)?;
    let spectrum = hermitian_spectrum(&gamma)?;
    let positive = spectrum.map(|l| if l > RANK_TOL { 1.0 } else { 0.0 });
    let rest = identity(rho0.dim()) - &positive;
    Povm::new(vec![positive, rest])
}

/// `(1 + ‖p₀ρ₀ − (1−p₀)ρ₁‖₁)/2`.
pub fn helstrom_success(rho0: &DensityOperator, rho1: &DensityOperator, p0: f64) -> Result<f64> {
    let gamma = helstrom_operator(rho0, rho1, p0)?;
    let trace_norm: f64 = hermitian_spectrum(&gamma)?.values.iter().map(|l| l.abs()).sum();
    Ok((1.0 + trace_norm) / 2.0)
}

/// Square-root measurement `ρ̄^{-1/2} pᵢρᵢ ρ̄^{-1/2}`; the projector onto
/// the kernel of `ρ̄` goes to outcome 0.
pub fn pretty_good_measurement(states: &[DensityOperator], priors: &[f64]) -> Result<Povm> {
    if states.len() != priors.len() {
        return Err(Error::DimensionMismatch {
            context: "PGM priors",
            expected: states.len(),
            found: priors.len(),
        });
    }
    check_distribution(priors, "prior_distribution")?;
    let avg = DensityOperator::mixture(priors, states)?;
    let spectrum = qmat::spectral(&avg);
    let inv_sqrt = spectrum.map(|l| if l > RANK_TOL { 1.0 / l.sqrt() } else { 0.0 });
    let support = spectrum.map(|l| if l > RANK_TOL { 1.0 } else { 0.0 });
    let mut effects: Vec<ComplexMatrix> = states
        .iter()
        .zip(priors)
        .map(|(s, &p)| hermitian_part(&(&inv_sqrt * s.matrix().scale(p) * &inv_sqrt)))
        .collect();
    effects[0] += identity(avg.dim()) - support;
    Povm::new(effects)
}

/// `Σᵢ pᵢ Tr M(i)ρᵢ` for a POVM guessing the index of the state.
pub fn success_probability(m: &Povm, states: &[DensityOperator], priors: &[f64]) -> f64 {
    states
        .iter()
        .zip(priors)
        .enumerate()
        .map(|(i, (s, &p))| p * s.expectation(m.effect(i)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{pure_state, tensor, StateVector};
    use crate::random;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair(s: f64) -> (DensityOperator, DensityOperator) {
        (
            pure_state(&StateVector::real_qubit(0.0)),
            pure_state(&StateVector::real_qubit(s.acos())),
        )
    }

    /// Success of the best projective measurement in the real plane, by grid.
    fn projective_grid_success(rho0: &DensityOperator, rho1: &DensityOperator, p0: f64) -> f64 {
        (0..20_000)
            .map(|i| {
                let theta = std::f64::consts::PI * i as f64 / 20_000.0;
                let basis = StateVector::real_qubit(theta);
                let e0 = pure_state(&basis).into_matrix();
                let q0 = rho0.expectation(&e0);
                let q1 = rho1.expectation(&e0);
                p0 * q0 + (1.0 - p0) * (1.0 - q1)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn born_rule_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = pure_state(&StateVector::from_real(&[h, h]).unwrap());
        let p = Povm::computational(2).born_rule(&plus).unwrap();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-15);
        let p = Povm::trivial(2).born_rule(&plus).unwrap();
        assert_eq!(p.len(), 1);
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-15);
        assert!(Povm::trivial(3).born_rule(&plus).is_err());
    }

    #[test]
    fn helstrom_examples() {
        let (phi, psi) = pair(0.5);
        let m = helstrom(&phi, &psi, 0.5).unwrap();
        let oracle = projective_grid_success(&phi, &psi, 0.5);
        let closed = (1.0 + (1.0f64 - 0.25).sqrt()) / 2.0;
        assert_abs_diff_eq!(oracle, closed, epsilon = 1e-6);
        assert_abs_diff_eq!(closed, 0.933013, epsilon = 1e-6);
        assert_abs_diff_eq!(success_probability(&m, &[phi.clone(), psi.clone()], &[0.5, 0.5]), closed, epsilon = 1e-12);
        assert_abs_diff_eq!(helstrom_success(&phi, &psi, 0.5).unwrap(), closed, epsilon = 1e-12);

        let (zero, one) = pair(0.0);
        assert_abs_diff_eq!(helstrom_success(&zero, &one, 0.5).unwrap(), 1.0, epsilon = 1e-12);

        for &p0 in &[0.2, 0.5, 0.9] {
            let m = helstrom(&phi, &phi, p0).unwrap();
            let s = success_probability(&m, &[phi.clone(), phi.clone()], &[p0, 1.0 - p0]);
            assert_abs_diff_eq!(s, p0.max(1.0 - p0), epsilon = 1e-12);
        }
    }

    #[test]
    fn helstrom_beats_random_projective() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho0 = random::density(2, 2, &mut rng);
        let rho1 = random::density(2, 1, &mut rng);
        let p0 = 0.37;
        let best = success_probability(&helstrom(&rho0, &rho1, p0).unwrap(), &[rho0.clone(), rho1.clone()], &[p0, 1.0 - p0]);
        assert_abs_diff_eq!(best, helstrom_success(&rho0, &rho1, p0).unwrap(), epsilon = 1e-12);
        for _ in 0..100 {
            let m = Povm::projective(&random::unitary(2, &mut rng)).unwrap();
            let direct = success_probability(&m, &[rho0.clone(), rho1.clone()], &[p0, 1.0 - p0]);
            let swapped = success_probability(&m, &[rho1.clone(), rho0.clone()], &[1.0 - p0, p0]);
            assert!(best >= direct.max(swapped) - 1e-12);
        }
    }

    #[test]
    fn induced_channel_examples() {
        let (zero, one) = pair(0.0);
        let e = CqEnsemble::uniform(vec![zero.clone(), one]).unwrap();
        let v = induced_channel(&Povm::computational(2), &e).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_abs_diff_eq!(v.prob(a, b), ClassicalChannel::noiseless(2).prob(a, b), epsilon = 1e-15);
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let constant = CqEnsemble::uniform(vec![zero.clone(), zero]).unwrap();
        let v = induced_channel(&random::povm(2, 4, &mut rng), &constant).unwrap();
        assert_eq!(v.row(0), v.row(1));

        let (phi, psi) = pair(0.5);
        let eve = CqEnsemble::uniform(vec![phi.clone(), psi.clone()]).unwrap();
        let v = induced_channel(&helstrom(&phi, &psi, 0.5).unwrap(), &eve).unwrap();
        let cross = (1.0 - (1.0f64 - 0.25).sqrt()) / 2.0;
        assert_abs_diff_eq!(cross, 0.066987, epsilon = 1e-6);
        assert_abs_diff_eq!(v.prob(0, 1), cross, epsilon = 1e-12);
        assert_abs_diff_eq!(v.prob(1, 0), cross, epsilon = 1e-12);
    }

    #[test]
    fn expand_examples() {
        let budget = DimensionBudget::default();
        let m = Povm::computational(2);
        let one = expand(&FactorizedPovm::new(vec![m.clone()]).unwrap(), &budget).unwrap();
        assert_eq!(one, m);
        let two = expand(&FactorizedPovm::uniform(m, 2).unwrap(), &budget).unwrap();
        assert_eq!(two, Povm::computational(4));

        let (phi, psi) = pair(0.5);
        let h = helstrom(&phi, &psi, 0.5).unwrap();
        let hh = expand(&FactorizedPovm::uniform(h, 2).unwrap(), &budget).unwrap();
        let sum = hh.effects().iter().fold(DMatrix::zeros(4, 4), |acc, e| acc + e);
        assert!(max_abs_diff(&sum, &identity(4)) <= COMPLETENESS_TOL);
        assert!(Povm::new(hh.effects().to_vec()).is_ok());

        let tiny = DimensionBudget { max_dim: 8 };
        let f = FactorizedPovm::uniform(Povm::computational(2), 4).unwrap();
        assert!(matches!(expand(&f, &tiny), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn coarse_grain_examples() {
        let m = Povm::computational(3);
        let same = coarse_grain(&m, &[0, 1, 2]).unwrap();
        assert_eq!(same.povm, m);
        let constant = coarse_grain(&m, &[4, 4, 4]).unwrap();
        assert_eq!(constant.labels, vec![4]);
        assert_eq!(constant.povm, Povm::trivial(3));
        assert_eq!(
            coarse_grain(&m, &[0, 1]).unwrap_err().invariant_name(),
            "outcome_function_total"
        );
    }

    #[test]
    fn majority_of_three_helstrom_slots() {
        let (phi, psi) = pair(0.5);
        let h = helstrom(&phi, &psi, 0.5).unwrap();
        let f = FactorizedPovm::uniform(h.clone(), 3).unwrap();
        let flat = expand(&f, &DimensionBudget::default()).unwrap();
        let majority: Vec<usize> = (0..8)
            .map(|i| usize::from(f.outcome_tuple(i).iter().sum::<usize>() >= 2))
            .collect();
        let cg = coarse_grain(&flat, &majority).unwrap();
        assert_eq!(cg.labels, vec![0, 1]);

        for (rho, truth) in [(&phi, 0usize), (&psi, 1usize)] {
            let state = qmat::tensor_all(&[rho.clone(), rho.clone(), rho.clone()]);
            let got = cg.povm.born_rule(&state).unwrap();
            // enumerate the 8 outcome triples from the single-slot distribution
            let single = h.born_rule(rho).unwrap();
            let mut expect = [0.0; 2];
            for t in 0..8 {
                let bits = [(t >> 2) & 1, (t >> 1) & 1, t & 1];
                let p: f64 = bits.iter().map(|&b| single[b]).product();
                expect[usize::from(bits.iter().sum::<usize>() >= 2)] += p;
            }
            assert_abs_diff_eq!(got[0], expect[0], epsilon = 1e-12);
            assert_abs_diff_eq!(got[1], expect[1], epsilon = 1e-12);
            assert!(got[truth] > 0.98);
        }
    }

    #[test]
    fn pgm_examples() {
        let (zero, one) = pair(0.0);
        let m = pretty_good_measurement(&[zero.clone(), one.clone()], &[0.5, 0.5]).unwrap();
        assert!(max_abs_diff(m.effect(0), zero.matrix()) < 1e-12);
        assert!(max_abs_diff(m.effect(1), one.matrix()) < 1e-12);

        let (phi, psi) = pair(0.5);
        let m = pretty_good_measurement(&[phi.clone(), psi.clone()], &[0.5, 0.5]).unwrap();
        let s = success_probability(&m, &[phi.clone(), psi.clone()], &[0.5, 0.5]);
        assert_abs_diff_eq!(s, helstrom_success(&phi, &psi, 0.5).unwrap(), epsilon = 1e-12);

        let single = pretty_good_measurement(std::slice::from_ref(&phi), &[1.0]).unwrap();
        assert!(max_abs_diff(single.effect(0), &identity(2)) < 1e-12);

        // singular average state: kernel completed on outcome 0
        let m = pretty_good_measurement(&[tensor(&phi, &zero), tensor(&psi, &zero)], &[0.5, 0.5]).unwrap();
        assert_eq!(m.outcomes(), 2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn constructed_povms_are_valid(seed in any::<u64>(), d in 2usize..4) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let states: Vec<_> = (0..3).map(|_| random::density(d, 1, &mut rng)).collect();
                let p = random::simplex_point(3, &mut rng);
                let pgm = pretty_good_measurement(&states, &p).unwrap();
                prop_assert!(Povm::new(pgm.effects().to_vec()).is_ok());
                let h = helstrom(&states[0], &states[1], p[0]).unwrap();
                prop_assert!(Povm::new(h.effects().to_vec()).is_ok());
                let r = random::povm(d, d * d, &mut rng);
                prop_assert!(Povm::new(r.effects().to_vec()).is_ok());
            }

            #[test]
            fn expanded_born_rule_factorizes(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let f = FactorizedPovm::new(vec![random::povm(2, 3, &mut rng), random::povm(2, 4, &mut rng)]).unwrap();
                let (a, b) = (random::density(2, 2, &mut rng), random::density(2, 1, &mut rng));
                let flat = expand(&f, &DimensionBudget::default()).unwrap();
                let joint = flat.born_rule(&tensor(&a, &b)).unwrap();
                let product = f.product_born_rule(&[a, b]).unwrap();
                for (x, y) in joint.iter().zip(&product) {
                    prop_assert!((x - y).abs() <= 1e-9);
                }
            }

            #[test]
            fn coarse_grain_preserves_total_probability(seed in any::<u64>(), k in 1usize..4) {
                use rand::Rng;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let m = random::povm(3, 6, &mut rng);
                let f: Vec<usize> = (0..6).map(|_| rng.random_range(0..k)).collect();
                let cg = coarse_grain(&m, &f).unwrap();
                let rho = random::density(3, 2, &mut rng);
                let total: f64 = cg.povm.born_rule(&rho).unwrap().iter().sum();
                prop_assert!((total - 1.0).abs() <= 1e-9);
                prop_assert!(Povm::new(cg.povm.effects().to_vec()).is_ok());
            }
        }
    }
}

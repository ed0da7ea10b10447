//! Dense complex matrices and quantum states.
//!
//! Everything here is small and dense: a single party never exceeds a few
//! qubits, so plain `DMatrix<Complex64>` arithmetic is adequate. States are
//! validated on construction and immutable afterwards.
//!
//! Entropies are in bits.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Tolerance on `‖M − M†‖_max` for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on `|Tr ρ − 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as zero.
pub const PSD_TOL: f64 = 1e-10;
/// Tolerance on `|‖v‖₂ − 1|` for state vectors.
pub const NORM_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Builds a matrix from entries listed row by row.
pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<ComplexMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::validation(
            "matrix_nonempty",
            format!("dimensions {rows}x{cols}"),
        ));
    }
    if entries.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            context: "row-major entries",
            expected: rows * cols,
            found: entries.len(),
        });
    }
    Ok(DMatrix::from_row_slice(rows, cols, entries))
}

/// Entries of `m` listed row by row.
pub fn to_row_major(m: &ComplexMatrix) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push(m[(r, c)]);
        }
    }
    out
}

pub fn identity(d: usize) -> ComplexMatrix {
    DMatrix::identity(d, d)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Tr(a·b)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff on different shapes");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues sorted in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.vectors.nrows();
        let mut out = DMatrix::zeros(d, d);
        for (i, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(i);
            out += (v * v.adjoint()).scale(lambda);
        }
        out
    }

    /// Applies `f` to the eigenvalues: `Σ f(λᵢ) vᵢvᵢ†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.vectors.nrows();
        let mut out = DMatrix::zeros(d, d);
        for (i, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            let v = self.vectors.column(i);
            out += (v * v.adjoint()).scale(w);
        }
        out
    }
}

/// Spectral decomposition of any Hermitian matrix.
pub fn hermitian_spectrum(m: &ComplexMatrix) -> Result<Spectrum> {
    let defect = hermiticity_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(Error::validation(
            "hermitian",
            format!("‖M − M†‖_max = {defect:e}"),
        ));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Ok(Spectrum { values, vectors })
}

/// A unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::validation("state_nonempty", "no amplitudes"));
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(
                "unit_norm",
                format!("‖v‖₂ = {norm}"),
            ));
        }
        Ok(StateVector { amplitudes: v })
    }

    /// Normalizes `amplitudes` first; fails only on the zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::validation("unit_norm", "cannot normalize zero vector"));
        }
        Ok(StateVector {
            amplitudes: v.unscale(norm),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `|i⟩` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Self {
        assert!(i < d, "basis index {i} out of range for dimension {d}");
        let mut v = DVector::zeros(d);
        v[i] = ONE;
        StateVector { amplitudes: v }
    }

    /// `cos θ |0⟩ + sin θ |1⟩`.
    pub fn real_qubit(theta: f64) -> Self {
        StateVector {
            amplitudes: DVector::from_vec(vec![
                Complex64::new(theta.cos(), 0.0),
                Complex64::new(theta.sin(), 0.0),
            ]),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

/// A density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::validation(
                "square",
                format!("shape {}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::validation("unit_trace", format!("Tr ρ = {tr}")));
        }
        let spectrum = hermitian_spectrum(&matrix)?;
        let min = spectrum.values.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::validation(
                "positive_semidefinite",
                format!("smallest eigenvalue {min:e}"),
            ));
        }
        Ok(DensityOperator { matrix })
    }

    /// `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        DensityOperator {
            matrix: identity(d).unscale(d as f64),
        }
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let diag = DVector::from_iterator(probs.len(), probs.iter().map(|&p| Complex64::new(p, 0.0)));
        Self::new(DMatrix::from_diagonal(&diag))
    }

    /// Mixture `Σ wᵢ ρᵢ`; weights must form a distribution.
    pub fn mixture(weights: &[f64], states: &[DensityOperator]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "mixture weights",
                expected: states.len(),
                found: weights.len(),
            });
        }
        let d = states[0].dim();
        let mut acc = DMatrix::zeros(d, d);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    context: "mixture states",
                    expected: d,
                    found: s.dim(),
                });
            }
            acc += s.matrix.scale(*w);
        }
        Self::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Tr(Mρ)` as a real number (imaginary part dropped).
    pub fn expectation(&self, m: &ComplexMatrix) -> f64 {
        trace_product(m, &self.matrix).re
    }
}

/// Ordered subsystem dimensions of a composite space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorFactorization {
    dims: Vec<usize>,
}

impl TensorFactorization {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::validation(
                "factor_dims_positive",
                format!("factor dims {dims:?}"),
            ));
        }
        Ok(TensorFactorization { dims })
    }

    /// `factor` repeated `n` times.
    pub fn repeated(factor: &[usize], n: usize) -> Result<Self> {
        Self::new(factor.iter().copied().cycle().take(factor.len() * n).collect())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn check(&self, d: usize) -> Result<()> {
        if self.total() != d {
            return Err(Error::validation(
                "factorization_consistent",
                format!("factors {:?} multiply to {}, operator has dimension {d}", self.dims, self.total()),
            ));
        }
        Ok(())
    }

    /// Digits of a flat index, most significant factor first.
    fn digits(&self, mut index: usize, out: &mut [usize]) {
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
    }
}

/// `|v⟩⟨v|`.
pub fn pure_state(v: &StateVector) -> DensityOperator {
    let a = v.amplitudes();
    DensityOperator {
        matrix: a * a.adjoint(),
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> DensityOperator {
    DensityOperator {
        matrix: kron(&a.matrix, &b.matrix),
    }
}

/// `ρ₁ ⊗ … ⊗ ρₙ`; panics on an empty slice.
pub fn tensor_all(states: &[DensityOperator]) -> DensityOperator {
    let (first, rest) = states.split_first().expect("tensor_all of empty slice");
    rest.iter().fold(first.clone(), |acc, s| tensor(&acc, s))
}

fn split_indices(f: &TensorFactorization, keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(Error::validation("keep_nonempty", "no factors kept"));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= f.len()) {
        return Err(Error::validation(
            "keep_valid",
            format!("keep set {keep:?} for {} factors", f.len()),
        ));
    }
    let d = f.total();
    let mut digits = vec![0; f.len()];
    let mut kept_index = Vec::with_capacity(d);
    let mut traced_index = Vec::with_capacity(d);
    for i in 0..d {
        f.digits(i, &mut digits);
        let (mut k, mut t) = (0usize, 0usize);
        for (slot, (&digit, &dim)) in digits.iter().zip(f.dims()).enumerate() {
            if kept.binary_search(&slot).is_ok() {
                k = k * dim + digit;
            } else {
                t = t * dim + digit;
            }
        }
        kept_index.push(k);
        traced_index.push(t);
    }
    Ok((kept_index, traced_index))
}

/// Partial trace of an arbitrary square operator; kept factors stay in
/// ascending order.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    f: &TensorFactorization,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    f.check(m.nrows())?;
    f.check(m.ncols())?;
    let (kept_index, traced_index) = split_indices(f, keep)?;
    let kept_dim: usize = {
        let mut k = keep.to_vec();
        k.sort_unstable();
        k.iter().map(|&i| f.dims()[i]).product()
    };
    let mut out = DMatrix::zeros(kept_dim, kept_dim);
    let d = f.total();
    for j in 0..d {
        for i in 0..d {
            if traced_index[i] == traced_index[j] {
                out[(kept_index[i], kept_index[j])] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Traces out every factor not listed in `keep`.
pub fn partial_trace(
    rho: &DensityOperator,
    f: &TensorFactorization,
    keep: &[usize],
) -> Result<DensityOperator> {
    partial_trace_matrix(&rho.matrix, f, keep).map(|matrix| DensityOperator { matrix })
}

/// Reorders tensor factors: position `k` of the result holds old factor
/// `order[k]`.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    f: &TensorFactorization,
    order: &[usize],
) -> Result<ComplexMatrix> {
    f.check(m.nrows())?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..f.len()).collect::<Vec<_>>() {
        return Err(Error::validation(
            "permutation",
            format!("{order:?} is not a permutation of {} factors", f.len()),
        ));
    }
    let d = f.total();
    let new_dims: Vec<usize> = order.iter().map(|&o| f.dims()[o]).collect();
    let mut digits = vec![0; f.len()];
    let map: Vec<usize> = (0..d)
        .map(|i| {
            f.digits(i, &mut digits);
            order
                .iter()
                .zip(&new_dims)
                .fold(0, |acc, (&o, &dim)| acc * dim + digits[o])
        })
        .collect();
    let mut out = DMatrix::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a state.
pub fn spectral(rho: &DensityOperator) -> Spectrum {
    hermitian_spectrum(&rho.matrix).expect("density operators are Hermitian")
}

/// `−Σ λ log₂ λ` over eigenvalues clipped to `[0, 1]`.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let h: f64 = values
        .iter()
        .map(|&l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .fold(0.0, |acc, l| acc - l * l.log2());
    h.clamp(0.0, (values.len() as f64).log2())
}

/// Von Neumann entropy `H(ρ) = −Tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_of_spectrum(&spectral(rho).values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn pure_state_of_basis_and_plus() {
        let rho = pure_state(&StateVector::basis(2, 0));
        assert_eq!(rho.matrix()[(0, 0)], ONE);
        assert_eq!(rho.matrix()[(1, 1)], ZERO);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = pure_state(&StateVector::from_real(&[h, h]).unwrap());
        for z in plus.matrix().iter() {
            assert_abs_diff_eq!(z.re, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn pure_state_matches_outer_product() {
        for &theta in &[0.1, 0.7, 1.3, 2.9] {
            let rho = pure_state(&StateVector::real_qubit(theta));
            let (cs, sn) = (f64::cos(theta), f64::sin(theta));
            let expect = from_row_major(2, 2, &[c(cs * cs), c(cs * sn), c(cs * sn), c(sn * sn)]).unwrap();
            assert!(max_abs_diff(rho.matrix(), &expect) < 1e-15);
        }
    }

    #[test]
    fn unnormalized_vector_rejected() {
        let err = StateVector::from_real(&[1.0, 1.0]).unwrap_err();
        assert_eq!(err.invariant_name(), "unit_norm");
    }

    #[test]
    fn density_validation_names_invariant() {
        let not_unit = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.6), c(0.6)]));
        assert_eq!(DensityOperator::new(not_unit).unwrap_err().invariant_name(), "unit_trace");

        let negative = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert_eq!(
            DensityOperator::new(negative).unwrap_err().invariant_name(),
            "positive_semidefinite"
        );

        let mut skew = identity(2).unscale(2.0);
        skew[(0, 1)] = c(0.1);
        assert_eq!(DensityOperator::new(skew).unwrap_err().invariant_name(), "hermitian");

        // jitter below the tolerance is accepted
        let jitter = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0 + 5e-11), c(-5e-11)]));
        assert!(DensityOperator::new(jitter).is_ok());
    }

    #[test]
    fn tensor_of_maximally_mixed() {
        let m = tensor(&DensityOperator::maximally_mixed(2), &DensityOperator::maximally_mixed(2));
        assert!(max_abs_diff(m.matrix(), DensityOperator::maximally_mixed(4).matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_and_bell() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random::density(2, 2, &mut rng);
        let sigma = random::density(3, 3, &mut rng);
        let f = TensorFactorization::new(vec![2, 3]).unwrap();
        let back = partial_trace(&tensor(&rho, &sigma), &f, &[0]).unwrap();
        assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-12);
        let back = partial_trace(&tensor(&rho, &sigma), &f, &[1]).unwrap();
        assert!(max_abs_diff(back.matrix(), sigma.matrix()) < 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = pure_state(&StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap());
        let f = TensorFactorization::new(vec![2, 2]).unwrap();
        let reduced = partial_trace(&bell, &f, &[0]).unwrap();
        assert!(max_abs_diff(reduced.matrix(), DensityOperator::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_factorization() {
        let rho = DensityOperator::maximally_mixed(4);
        let f = TensorFactorization::new(vec![2, 3]).unwrap();
        assert_eq!(
            partial_trace(&rho, &f, &[0]).unwrap_err().invariant_name(),
            "factorization_consistent"
        );
        let f = TensorFactorization::new(vec![2, 2]).unwrap();
        assert!(partial_trace(&rho, &f, &[]).is_err());
        assert!(partial_trace(&rho, &f, &[2]).is_err());
    }

    #[test]
    fn permute_swaps_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random::density(2, 2, &mut rng);
        let b = random::density(3, 2, &mut rng);
        let f = TensorFactorization::new(vec![2, 3]).unwrap();
        let swapped = permute_subsystems(tensor(&a, &b).matrix(), &f, &[1, 0]).unwrap();
        assert!(max_abs_diff(&swapped, tensor(&b, &a).matrix()) < 1e-15);
    }

    #[test]
    fn spectral_examples() {
        let rho = DensityOperator::from_diagonal(&[0.25, 0.75]).unwrap();
        let s = spectral(&rho);
        assert_abs_diff_eq!(s.values[0], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(s.values[1], 0.25, epsilon = 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = pure_state(&StateVector::from_real(&[h, h]).unwrap());
        let s = spectral(&plus);
        assert_abs_diff_eq!(s.values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.values[1], 0.0, epsilon = 1e-12);
        assert!(max_abs_diff(&s.reconstruct(), plus.matrix()) <= 1e-9);
    }

    /// Closed-form 2×2 Hermitian eigenvalues: (t ± √(t² − 4 det)) / 2.
    fn eig2(m: &ComplexMatrix) -> (f64, f64) {
        let t = (m[(0, 0)] + m[(1, 1)]).re;
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
        let disc = (t * t - 4.0 * det).max(0.0).sqrt();
        ((t + disc) / 2.0, (t - disc) / 2.0)
    }

    #[test]
    fn spectral_of_equal_mixture_of_pure_pair() {
        for &s in &[0.0, 0.25, 0.5, 0.8, 1.0] {
            let phi = StateVector::real_qubit(0.0);
            let psi = StateVector::real_qubit(f64::acos(s));
            assert_abs_diff_eq!(phi.inner(&psi).norm(), s, epsilon = 1e-12);
            let mix = DensityOperator::mixture(&[0.5, 0.5], &[pure_state(&phi), pure_state(&psi)]).unwrap();
            let (l0, l1) = eig2(mix.matrix());
            assert_abs_diff_eq!(l0, (1.0 + s) / 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(l1, (1.0 - s) / 2.0, epsilon = 1e-12);
            let sp = spectral(&mix);
            assert_abs_diff_eq!(sp.values[0], l0, epsilon = 1e-12);
            assert_abs_diff_eq!(sp.values[1], l1, epsilon = 1e-12);
        }
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(von_neumann_entropy(&pure_state(&StateVector::real_qubit(0.4))), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(von_neumann_entropy(&DensityOperator::maximally_mixed(2)), 1.0, epsilon = 1e-12);
        let rho = DensityOperator::from_diagonal(&[0.75, 0.25]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&rho), 0.811278124459, epsilon = 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn entropy_unitarily_invariant(seed in any::<u64>(), d in 2usize..5) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let rho = random::density(d, d, &mut rng);
                let u = random::unitary(d, &mut rng);
                let rotated = DensityOperator::new(hermitian_part(&(&u * rho.matrix() * u.adjoint()))).unwrap();
                prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&rotated)).abs() <= 1e-9);
            }

            #[test]
            fn entropy_additive_and_bounded(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random::density(d1, d1, &mut rng);
                let b = random::density(d2, 1 + d2 / 2, &mut rng);
                let (ha, hb) = (von_neumann_entropy(&a), von_neumann_entropy(&b));
                let hab = von_neumann_entropy(&tensor(&a, &b));
                prop_assert!((hab - ha - hb).abs() <= 1e-9);
                prop_assert!(ha >= 0.0 && ha <= (d1 as f64).log2() + 1e-12);
            }

            #[test]
            fn spectrum_sums_to_one_and_reconstructs(seed in any::<u64>(), d in 1usize..6) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let rho = random::density(d, d, &mut rng);
                let s = spectral(&rho);
                prop_assert!((s.values.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
                prop_assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
                prop_assert!(max_abs_diff(&s.reconstruct(), rho.matrix()) <= 1e-9);
            }

            #[test]
            fn partial_traces_commute(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let rho = random::density(12, 4, &mut rng);
                let f = TensorFactorization::new(vec![2, 3, 2]).unwrap();
                // drop factor 2 then factor 0, versus the reverse order
                let step = partial_trace(&rho, &f, &[0, 1]).unwrap();
                let a = partial_trace(&step, &TensorFactorization::new(vec![2, 3]).unwrap(), &[1]).unwrap();
                let step = partial_trace(&rho, &f, &[1, 2]).unwrap();
                let b = partial_trace(&step, &TensorFactorization::new(vec![3, 2]).unwrap(), &[0]).unwrap();
                let direct = partial_trace(&rho, &f, &[1]).unwrap();
                prop_assert!(max_abs_diff(a.matrix(), b.matrix()) <= 1e-12);
                prop_assert!(max_abs_diff(a.matrix(), direct.matrix()) <= 1e-12);
            }
        }
    }
}

//! Seeded random states, unitaries and measurements.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::qmat::{hermitian_part, ComplexMatrix, DensityOperator, StateVector};
use crate::qchan::QuantumChannel;
use crate::qmeas::Povm;

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state.
pub fn state_vector(d: usize, rng: &mut impl Rng) -> StateVector {
    StateVector::normalized((0..d).map(|_| gaussian(rng)).collect()).expect("nonzero gaussian vector")
}

/// Random state of rank at most `rank` (induced measure).
pub fn density(d: usize, rank: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = crate::qmat::trace(&m).re;
    DensityOperator::new(hermitian_part(&m.unscale(tr))).expect("Wishart matrix is a state")
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    // fix column phases so the distribution is Haar
    let mut u = q;
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Random rank-one POVM with `outcomes` effects on `C^d`.
pub fn povm(d: usize, outcomes: usize, rng: &mut impl Rng) -> Povm {
    let vectors: Vec<_> = (0..outcomes)
        .map(|_| ginibre(d, 1, rng))
        .collect();
    Povm::from_frame(&vectors).expect("random frame spans the space")
}

/// Uniform point on the probability simplex.
pub fn simplex_point(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Random channel with `rank` Kraus operators, cut from a random isometry.
pub fn channel(in_dim: usize, out_dim: usize, rank: usize, rng: &mut impl Rng) -> QuantumChannel {
    assert!(out_dim * rank >= in_dim, "isometry needs out_dim·rank ≥ in_dim");
    let q = ginibre(out_dim * rank, in_dim, rng).qr().q();
    let kraus = (0..rank)
        .map(|i| q.rows(i * out_dim, out_dim).into_owned())
        .collect();
    QuantumChannel::new(kraus).expect("isometry blocks are trace preserving")
}

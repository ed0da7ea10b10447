//! Density operators, tensor products and partial traces.
//!
//! Builds a Bell state, traces out one half and compares the entropies of
//! the global state and its marginal.

use qkd_core::qmat::{
    partial_trace, pure_state, tensor, von_neumann_entropy, DensityOperator, StateVector, TensorFactorization,
};

fn main() -> qkd_core::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = pure_state(&StateVector::from_real(&[s, 0.0, 0.0, s])?);
    let split = TensorFactorization::new(vec![2, 2])?;
    let left = partial_trace(&bell, &split, &[0])?;

    println!("S(Φ⁺)          = {:.6}", von_neumann_entropy(&bell));
    println!("S(Tr_B Φ⁺)     = {:.6}", von_neumann_entropy(&left));

    let plus = pure_state(&StateVector::from_real(&[s, s])?);
    let product = tensor(&plus, &DensityOperator::maximally_mixed(2));
    println!("S(|+⟩⟨+| ⊗ I/2) = {:.6}", von_neumann_entropy(&product));
    Ok(())
}

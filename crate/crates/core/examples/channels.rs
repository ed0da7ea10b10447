//! Quantum channels: Kraus form, composition, tensor powers and the Bob/Eve
//! marginals of a channel whose output is split as `H_B ⊗ H_E`.

use qkd_core::qchan::{DimensionBudget, QuantumChannel, Side};
use qkd_core::qmat::{pure_state, von_neumann_entropy, StateVector};
use qkd_core::qmeas::ClassicalChannel;

fn main() -> qkd_core::Result<()> {
    let plus = pure_state(&StateVector::from_real(&[std::f64::consts::FRAC_1_SQRT_2; 2])?);

    for lambda in [0.0, 0.25, 0.5, 1.0] {
        let out = QuantumChannel::depolarizing(2, lambda)?.apply(&plus)?;
        println!("depolarizing λ={lambda:.2}: output entropy {:.6}", von_neumann_entropy(&out));
    }

    // classical letters broadcast through BSC(0.1) to Bob and BSC(0.3) to Eve
    let theta = QuantumChannel::classical_broadcast(
        &ClassicalChannel::binary_symmetric(0.1),
        &ClassicalChannel::binary_symmetric(0.3),
    )?;
    let zero = pure_state(&StateVector::basis(2, 0));
    for side in [Side::Bob, Side::Eve] {
        let marginal = theta.marginal(side)?;
        let rho = marginal.apply(&zero)?;
        println!("{side:?} sees diag {:.2?}", (0..2).map(|i| rho.matrix()[(i, i)].re).collect::<Vec<_>>());
    }

    let budget = DimensionBudget::default();
    let cube = theta.tensor_power(3, &budget)?;
    println!("Θ^⊗3: {} → {} dims, {} Kraus operators", cube.in_dim(), cube.out_dim(), cube.kraus_count());
    match theta.tensor_power(8, &budget) {
        Err(e) => println!("Θ^⊗8 refused: {e}"),
        Ok(_) => println!("Θ^⊗8 fits the budget"),
    }
    Ok(())
}

//! Holevo capacity, single-letter accessible capacity C₁ and its block
//! version C_k for the qubit pair with overlap 0.5, alongside the classical
//! capacity of a binary symmetric channel.

use qkd_core::qchan::CqEnsemble;
use qkd_core::qinfo::{c1, c_k, channel_capacity, holevo_capacity, OptimizerConfig};
use qkd_core::qmat::{pure_state, StateVector};
use qkd_core::qmeas::ClassicalChannel;

fn main() -> qkd_core::Result<()> {
    let cfg = OptimizerConfig::default();
    let bsc = channel_capacity(&ClassicalChannel::binary_symmetric(0.1), &cfg);
    println!("C(BSC 0.1)   = {:.6}  prior {:.4?}", bsc.value, bsc.prior);

    let pair = CqEnsemble::uniform(vec![
        pure_state(&StateVector::real_qubit(0.0)),
        pure_state(&StateVector::real_qubit(f64::acos(0.5))),
    ])?;
    let chi = holevo_capacity(&pair, &cfg)?;
    let one = c1(&pair, &cfg)?;
    let two = c_k(&pair, 2, &cfg)?;
    println!("C(ξ)         = {:.6}", chi.value);
    println!("C₁(ξ)        = {:.6}  ({} outcomes)", one.value, one.povm.outcomes());
    println!("C₂(ξ)        = {:.6}", two.value);
    println!("2·C₁ ≤ C₂ ≤ 2·C: {:.6} ≤ {:.6} ≤ {:.6}", 2.0 * one.value, two.value, 2.0 * chi.value);
    Ok(())
}

//! The two feasibility tests: a classical wiretap pair, and the copied
//! qubit pair over a range of overlaps, where Bob's collective capacity
//! beats Eve's single-letter one whenever the letters neither coincide nor
//! are orthogonal.

use qkd_core::cli::{bsc_pair, classical_marginals, paper_example};
use qkd_core::qinfo::{classical_advantage, quantum_condition, OptimizerConfig};

fn main() -> qkd_core::Result<()> {
    let cfg = OptimizerConfig::default();

    let s = bsc_pair(0.1, 0.3)?;
    let (v, w) = classical_marginals(&s)?.expect("diagonal letters");
    let r = classical_advantage(&v, &w, &cfg)?;
    println!("bsc-pair 0.1 0.3: advantage {:.6}, satisfied {}", r.lhs, r.satisfied);

    println!("\n{:>8} {:>10} {:>10} {:>10}", "overlap", "C(B)", "C1(E)", "gap");
    for i in 0..=10 {
        let overlap = i as f64 / 10.0;
        let s = paper_example(overlap)?;
        let r = quantum_condition(s.ensemble(), s.theta(), &cfg)?;
        println!("{overlap:>8.2} {:>10.6} {:>10.6} {:>10.6}", r.lhs, r.rhs, r.lhs - r.rhs);
    }
    Ok(())
}

//! Telling two pure states apart: Helstrom vs pretty-good measurement, and
//! the classical channel each one induces.

use qkd_core::qchan::CqEnsemble;
use qkd_core::qmat::{pure_state, StateVector};
use qkd_core::qmeas::{helstrom, helstrom_success, induced_channel, pretty_good_measurement, success_probability};

fn main() -> qkd_core::Result<()> {
    println!("{:>8} {:>10} {:>10} {:>10}", "overlap", "helstrom", "pgm", "closed");
    for s in [0.0, 0.25, 0.5, 0.75, 0.95] {
        let phi = pure_state(&StateVector::real_qubit(0.0));
        let psi = pure_state(&StateVector::real_qubit(f64::acos(s)));
        let states = [phi.clone(), psi.clone()];
        let pgm = pretty_good_measurement(&states, &[0.5, 0.5])?;
        println!(
            "{s:>8.2} {:>10.6} {:>10.6} {:>10.6}",
            helstrom_success(&phi, &psi, 0.5)?,
            success_probability(&pgm, &states, &[0.5, 0.5]),
            0.5 * (1.0 + (1.0 - s * s).sqrt()),
        );
    }

    let phi = pure_state(&StateVector::real_qubit(0.0));
    let psi = pure_state(&StateVector::real_qubit(f64::acos(0.5)));
    let m = helstrom(&phi, &psi, 0.5)?;
    let v = induced_channel(&m, &CqEnsemble::uniform(vec![phi, psi])?)?;
    println!("\nHelstrom at s=0.5 induces the channel {:.6?}", v.rows());
    Ok(())
}

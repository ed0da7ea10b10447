//! Feasibility analysis and exact finite-block simulation for quantum key
//! distribution where the eavesdropper is restricted to factorized
//! (slot-by-slot) measurements followed by classical post-processing.
//!
//! The crate is organized bottom-up:
//!
//! - [`qmat`]: dense complex matrices, states, tensor products, partial traces, entropy.
//! - [`qchan`]: Kraus-form channels, tensor powers, Bob/Eve marginals, classical-quantum ensembles.
//! - [`qmeas`]: POVMs, factorized and coarse-grained observables, Helstrom and pretty-good measurements.
//! - [`qinfo`]: Shannon and Holevo quantities, accessible information, `C₁`, `C_k`, and the two
//!   feasibility conditions.
//! - [`keysim`]: the key-distribution pipeline over `n` channel uses, evaluated exactly.
//! - [`cli`]: scenario files, built-in scenarios, report serialization and the `qkd` command line.

pub mod cli;
pub mod error;
pub mod keysim;
pub mod qchan;
pub mod qinfo;
pub mod qmat;
pub mod qmeas;
pub mod random;

pub use error::{Error, Result};

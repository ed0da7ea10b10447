//! Sweeps block length and codebook seed, printing the same CSV the
//! `qkd sweep` command writes. Two random codewords can coincide, in which
//! case nobody learns anything and the row shows zeros.

use qkd_core::cli::{paper_example, sweep_csv, SweepRow};
use qkd_core::keysim::{sweep, CoderChoice, EveChoice};
use qkd_core::qinfo::OptimizerConfig;

fn main() -> qkd_core::Result<()> {
    let template = paper_example(0.5)?;
    let cfg = OptimizerConfig::default();
    let cells = sweep(&template, &[1, 2, 3, 4], &[0, 1, 2], CoderChoice::Random, EveChoice::Default, &cfg);
    let rows: Vec<SweepRow> = cells.iter().map(|c| SweepRow::from_cell(&template.name, c)).collect();
    print!("{}", sweep_csv(&rows));
    Ok(())
}

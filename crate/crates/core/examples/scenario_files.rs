//! Writing a scenario to TOML and reading it back, then running it.

use qkd_core::cli::{bsc_pair, parse_scenario, write_scenario};
use qkd_core::keysim::{simulate, CoderChoice, EveChoice};
use qkd_core::qinfo::OptimizerConfig;

fn main() -> qkd_core::Result<()> {
    let text = write_scenario(&bsc_pair(0.05, 0.2)?);
    println!("{text}");

    let s = parse_scenario(&text)?.with_block_length(2)?;
    let r = simulate(&s, 0, CoderChoice::Repetition, EveChoice::Default, &OptimizerConfig::default())?;
    println!("n=2 repetition: p_agree {:.6}, I(A;B) {:.6}, I(A;E) {:.6}", r.p_agree, r.bob_info, r.eve_info);
    Ok(())
}

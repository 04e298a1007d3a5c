//! Runs the default grid (p ∈ {2, 3}, s ∈ {2, 3}, |C| ≤ 2^16) and prints
//! the summary table.
//!
//!     cargo run --release --example grid_sweep [max_size]

use std::time::Instant;

use ghcodes::analysis::AnalysisOptions;
use ghcodes::grid::{run_grid, GridSpec};

fn main() -> ghcodes::Result<()> {
    let mut spec = GridSpec::default();
    if let Some(arg) = std::env::args().nth(1) {
        spec.max_size = arg.parse().expect("max_size must be an integer");
    }
    let start = Instant::now();
    let summary = run_grid(&spec, &AnalysisOptions::default())?;
    print!("{}", summary.to_table());
    eprintln!("elapsed {:.1?}", start.elapsed());
    Ok(())
}

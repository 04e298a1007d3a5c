//! Evaluates the Gray map on Z_{p^r} and on a mixed vector.
//!
//!     cargo run --example gray_map

use ghcodes::analysis::word_string;
use ghcodes::construction::{build, TypeSignature};
use ghcodes::gray::{phi, y_matrix, GrayMap};

fn main() -> ghcodes::Result<()> {
    for (p, r) in [(2, 2), (2, 3), (3, 2)] {
        let y = y_matrix(p, r)?;
        println!("p={p} r={r}: Y has {} columns", y.num_columns());
        for u in 0..(p as u64).pow(r) {
            println!("  {u:>2} -> {}", word_string(&phi(u, p, r)?, p));
        }
    }

    let a = build(&TypeSignature::new(2, vec![1, 0, 1])?)?;
    let gray = GrayMap::new(a.shape())?;
    println!("Gray length for {} is {}", a.shape(), gray.length());
    for row in a.rows() {
        println!("  {row} -> {}", word_string(&gray.apply(row.entries()), 2));
    }
    Ok(())
}

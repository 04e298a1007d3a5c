//! Builds generator matrices recursively, row by row, and prints them.
//!
//!     cargo run --example construct_matrix

use ghcodes::construction::{base_matrix, build, extend_with_row, TypeSignature};

fn main() -> ghcodes::Result<()> {
    // t = (1, 0, 1): the base matrix for p = 2, s = 3
    let base = base_matrix(2, 3)?;
    println!("{base}");

    // append one generator of order p^{s-i+1} with i = 1, giving t = (2, 0, 1)
    let grown = extend_with_row(&base, 1)?;
    println!("{grown}");
    assert_eq!(grown, build(&TypeSignature::new(2, vec![2, 0, 1])?)?);

    for (p, t) in [(3, vec![1, 1]), (3, vec![2, 1]), (5, vec![1, 1])] {
        let sig = TypeSignature::new(p, t)?;
        let a = build(&sig)?;
        println!("{sig}: |C| = {}, row orders {:?}", sig.code_size().unwrap(), a.row_orders());
        println!("{a}");
    }
    Ok(())
}

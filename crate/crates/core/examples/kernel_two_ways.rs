//! Computes the kernel of a nonlinear code by brute force and from the
//! scaled generator images, and compares the two subspaces.
//!
//!     cargo run --release --example kernel_two_ways

use ghcodes::analysis::{
    canonical_basis, kernel, kernel_basis, subspace_digest, word_string,
};
use ghcodes::code::{gray_image, span};
use ghcodes::construction::{build, TypeSignature};

fn main() -> ghcodes::Result<()> {
    for (p, t) in [(2, vec![2, 0, 1]), (3, vec![1, 1]), (2, vec![2, 1, 1]), (3, vec![1, 1, 1])] {
        let sig = TypeSignature::new(p, t)?;
        let a = build(&sig)?;
        let c = gray_image(&span(&a)?)?;
        let n = c.length();

        let brute = kernel(&c)?;
        let brute_basis = canonical_basis(p, n, brute.words());
        let fast = kernel_basis(&a)?;
        let fast_basis = canonical_basis(p, n, &fast);

        println!("{sig}: n = {n}, |C| = {}, |K(C)| = {}", c.len(), brute.len());
        for v in &fast {
            println!("  {}", word_string(v, p));
        }
        let (d1, d2) = (
            subspace_digest(p, n, &brute_basis),
            subspace_digest(p, n, &fast_basis),
        );
        println!("  brute {}\n  basis {}", &d1[..16], &d2[..16]);
        assert_eq!(d1, d2);
    }
    Ok(())
}

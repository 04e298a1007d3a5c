//! Enumerates an additive code, its order-p subcode and their Gray images.
//!
//!     cargo run --example span_and_subcode

use ghcodes::analysis::word_string;
use ghcodes::code::{gray_image, order_p_subcode, span};
use ghcodes::construction::{build, TypeSignature};

fn main() -> ghcodes::Result<()> {
    let sig = TypeSignature::new(3, vec![1, 1])?;
    let a = build(&sig)?;
    let h = span(&a)?;
    println!("{sig}: {} codewords", h.len());
    for w in h.words().iter().take(9) {
        println!("  {w}");
    }

    let hp = order_p_subcode(&h);
    println!("order-3 subcode: {} codewords", hp.len());
    for w in hp.words() {
        println!("  {w}");
    }

    let c = gray_image(&h)?;
    println!("Gray image: {} words of length {}", c.len(), c.length());
    for w in c.words().iter().take(6) {
        println!("  {}", word_string(w, c.p()));
    }
    Ok(())
}

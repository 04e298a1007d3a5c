//! Kernel, rank and linearity of codes over `Z_p`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use sha2::{Digest, Sha256};

use crate::code::{order_p_generators, PAryCode};
use crate::construction::GeneratorMatrix;
use crate::error::{Error, Result};
use crate::gray::GrayMap;
use crate::linalg::{add_assign, EchelonBasis};

/// Default cap on `|C|` for the definitional kernel computation.
pub const DEFAULT_KERNEL_CAP: u64 = 1 << 12;

/// `K(C) = { x : x + C = C }`.
pub fn kernel(code: &PAryCode) -> Result<PAryCode> {
    kernel_capped(code, DEFAULT_KERNEL_CAP)
}

pub fn kernel_capped(code: &PAryCode, cap: u64) -> Result<PAryCode> {
    let basis = kernel_basis_brute(code, cap)?;
    PAryCode::new(code.p(), code.length(), basis.span(u64::MAX)?)
}

/// Basis of `K(C)` from the definition.
///
/// Since `0 ∈ C`, every kernel vector is a codeword, so only codewords are
/// candidates. The kernel is closed under addition, so a candidate already in
/// the span of verified kernel vectors is accepted without a test; every
/// other candidate `x` is tested against all of `C`.
pub fn kernel_basis_brute(code: &PAryCode, cap: u64) -> Result<EchelonBasis> {
    if code.len() as u64 > cap {
        return Err(Error::resource(format!(
            "brute-force kernel of {} words exceeds the cap {cap}; use the kernel basis of the generator matrix",
            code.len()
        )));
    }
    if !code.contains_zero() {
        return Err(Error::domain("kernel computation requires 0 ∈ C"));
    }
    let p = code.p() as u8;
    let mut basis = EchelonBasis::new(code.p(), code.length());
    // translates are tested in a scrambled order so failures surface early
    let mut probe: Vec<&Vec<u8>> = code.words().iter().collect();
    probe.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(0x6b65726e));
    let mut sum = vec![0u8; code.length()];
    for x in code.words() {
        let mut reduced = x.clone();
        basis.reduce(&mut reduced);
        if reduced.iter().all(|&v| v == 0) {
            continue;
        }
        let stabilizes = probe.iter().all(|c| {
            sum.copy_from_slice(c);
            add_assign(&mut sum, x, p);
            code.contains(&sum)
        });
        if stabilizes {
            basis.insert_reduced(reduced);
        }
    }
    Ok(basis)
}

/// Dimension of `⟨C⟩` over GF(p).
pub fn rank(code: &PAryCode) -> usize {
    let mut basis = EchelonBasis::new(code.p(), code.length());
    for w in code.words() {
        basis.insert(w);
    }
    basis.rank()
}

/// Linearity via rank: `rank(C) = log_p |C|`.
pub fn is_linear(code: &PAryCode) -> bool {
    match code.log_p_size() {
        Some(k) => code.contains_zero() && rank(code) == k as usize,
        None => false,
    }
}

/// Linearity via the kernel: `K(C) = C`.
pub fn is_linear_by_kernel(code: &PAryCode, cap: u64) -> Result<bool> {
    let Some(k) = code.log_p_size() else {
        return Ok(false);
    };
    if !code.contains_zero() {
        return Ok(false);
    }
    Ok(kernel_basis_brute(code, cap)?.rank() == k as usize)
}

/// `Φ(Q)` with `Q = { (o(w_k)/p)·w_k }`, without checking that the image is
/// nonlinear.
pub fn scaled_generator_images(a: &GeneratorMatrix) -> Result<Vec<Vec<u8>>> {
    let gray = GrayMap::new(a.shape())?;
    Ok(order_p_generators(a)
        .iter()
        .map(|q| gray.apply(q.entries()))
        .collect())
}

/// Basis of `K(Φ(span(a)))` read off the generator matrix.
///
/// Only defined when the Gray image is nonlinear, i.e. outside the family
/// `p = 2, t = (1, 0, …, 0, t_s)`.
pub fn kernel_basis(a: &GeneratorMatrix) -> Result<Vec<Vec<u8>>> {
    if a.signature().predicts_linear_image() {
        return Err(Error::domain(format!(
            "the Gray image of {} is linear; its kernel is the whole code",
            a.signature()
        )));
    }
    scaled_generator_images(a)
}

/// Reduced row echelon form of the span of `vectors`, rows sorted by pivot.
/// Two sets span the same space iff their canonical forms agree.
pub fn canonical_basis(p: u32, len: usize, vectors: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let mut basis = EchelonBasis::new(p, len);
    for v in vectors {
        basis.insert(v);
    }
    canonical_rows(&basis)
}

pub fn canonical_rows(basis: &EchelonBasis) -> Vec<Vec<u8>> {
    let mut rows = basis.rows().to_vec();
    rows.sort_by_key(|r| r.iter().position(|&x| x != 0));
    rows
}

/// SHA-256 of a canonical basis; equal digests mean equal subspaces.
pub fn subspace_digest(p: u32, len: usize, canonical: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    h.update(p.to_le_bytes());
    h.update((len as u64).to_le_bytes());
    h.update((canonical.len() as u64).to_le_bytes());
    for row in canonical {
        h.update(row);
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{gray_image, order_p_subcode, span};
    use crate::construction::{build, TypeSignature};

    /// The definition applied literally to every vector of the code.
    fn kernel_oracle(code: &PAryCode) -> Vec<Vec<u8>> {
        let p = code.p();
        let mut out = Vec::new();
        for x in code.words() {
            let ok = code.words().iter().all(|c| {
                let s: Vec<u8> = x
                    .iter()
                    .zip(c)
                    .map(|(&a, &b)| ((a as u32 + b as u32) % p) as u8)
                    .collect();
                code.contains(&s)
            });
            if ok {
                out.push(x.clone());
            }
        }
        out
    }

    fn image(p: u32, t: &[usize]) -> (GeneratorMatrix, PAryCode) {
        let a = build(&TypeSignature::new(p, t.to_vec()).unwrap()).unwrap();
        let c = gray_image(&span(&a).unwrap()).unwrap();
        (a, c)
    }

    #[test]
    fn kernel_matches_definition() {
        for (p, t) in [
            (2, vec![1, 1]),
            (2, vec![2, 1]),
            (2, vec![1, 0, 1]),
            (2, vec![2, 0, 1]),
            (2, vec![1, 1, 1]),
            (3, vec![1, 1]),
            (3, vec![1, 2]),
        ] {
            let (_, c) = image(p, &t);
            let k = kernel(&c).unwrap();
            assert_eq!(k.words(), kernel_oracle(&c).as_slice(), "p={p} t={t:?}");
        }
    }

    #[test]
    fn kernel_examples() {
        let (_, c) = image(3, &[1, 1]);
        assert_eq!(kernel(&c).unwrap().len(), 9);
        let (_, c) = image(2, &[1, 1, 1]);
        assert_eq!(kernel(&c).unwrap().len(), 8);
        let (_, c) = image(2, &[1, 0, 1]);
        assert_eq!(kernel(&c).unwrap(), c);
    }

    #[test]
    fn kernel_requires_zero_and_cap() {
        let c = PAryCode::new(2, 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(kernel(&c), Err(Error::Domain(_))));
        let (_, c) = image(2, &[2, 0, 1]);
        assert!(matches!(kernel_capped(&c, 64), Err(Error::Resource(_))));
    }

    #[test]
    fn rank_examples() {
        let zero = PAryCode::new(3, 4, vec![vec![0; 4]]).unwrap();
        assert_eq!(rank(&zero), 0);
        let (_, lin) = image(2, &[1, 0, 2]);
        assert_eq!(rank(&lin), 5);
        assert!(is_linear(&lin));
        let (_, c) = image(3, &[1, 1]);
        let r = rank(&c);
        assert!(r > 3, "rank {r}");
        assert!(!is_linear(&c));
        assert!(!is_linear_by_kernel(&c, DEFAULT_KERNEL_CAP).unwrap());
    }

    #[test]
    fn kernel_basis_route() {
        let (a, c) = image(2, &[2, 0, 1]);
        let q = kernel_basis(&a).unwrap();
        assert_eq!(q.len(), 3);
        let mut b = EchelonBasis::new(2, c.length());
        for v in &q {
            assert!(b.insert(v));
        }
        let spanned = PAryCode::new(2, c.length(), b.span(1 << 20).unwrap()).unwrap();
        assert_eq!(spanned, kernel(&c).unwrap());

        let (a, c) = image(3, &[1, 1]);
        let q = kernel_basis(&a).unwrap();
        let canon = canonical_basis(3, c.length(), &q);
        let brute = canonical_rows(&kernel_basis_brute(&c, 1 << 12).unwrap());
        assert_eq!(canon, brute);

        let (a, _) = image(2, &[1, 0, 1]);
        assert!(matches!(kernel_basis(&a), Err(Error::Domain(_))));
    }

    #[test]
    fn kernel_is_gray_image_of_order_p_subcode() {
        let a = build(&TypeSignature::new(3, vec![1, 1]).unwrap()).unwrap();
        let h = span(&a).unwrap();
        let c = gray_image(&h).unwrap();
        assert_eq!(gray_image(&order_p_subcode(&h)).unwrap(), kernel(&c).unwrap());
    }

    #[test]
    fn digests_identify_subspaces() {
        let a = vec![vec![1u8, 1, 0], vec![0, 1, 1]];
        let b = vec![vec![1u8, 0, 1], vec![1, 1, 0]];
        let c = vec![vec![1u8, 0, 0]];
        let d = |v: &[Vec<u8>]| subspace_digest(2, 3, &canonical_basis(2, 3, v));
        assert_eq!(d(&a), d(&b));
        assert_ne!(d(&a), d(&c));
    }
}

//! Codes spanned by a generator matrix, their Gray images, and the order-`p`
//! subcode.
//!
//! Small codes are materialized as sorted word lists ([`AdditiveCode`],
//! [`PAryCode`]). Large codes are walked without storage by
//! [`for_each_codeword`], which visits every codeword once by an odometer over
//! the coefficient vector: bumping coefficient `k` adds row `k`, and a wrap
//! back to zero also adds row `k` since `o(w_k)·w_k = 0`.

use std::ops::ControlFlow;
use std::sync::Arc;

use rand::Rng;

use crate::construction::GeneratorMatrix;
use crate::error::{Error, Result};
use crate::gray::GrayMap;
use crate::linalg::EchelonBasis;
use crate::ring::{add_scaled_into, CodeShape, MixedVector};

/// Default cap on the number of codewords materialized by [`span`].
pub const DEFAULT_SPAN_CAP: u64 = 1 << 16;

/// Cap on `|C| × length` entries held in memory at once.
pub const ENTRY_CAP: u64 = 1 << 27;

/// A subgroup of the mixed product group, stored as a sorted list of words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveCode {
    shape: Arc<CodeShape>,
    words: Vec<MixedVector>,
}

impl AdditiveCode {
    /// Builds a code from arbitrary words; duplicates are dropped. Closure is
    /// not checked here, see [`AdditiveCode::is_closed`].
    pub fn from_words(shape: Arc<CodeShape>, mut words: Vec<MixedVector>) -> Result<Self> {
        if let Some(w) = words.iter().find(|w| w.shape() != shape.as_ref()) {
            return Err(Error::domain(format!("word {w:?} has the wrong shape")));
        }
        words.sort_unstable_by(|a, b| a.entries().cmp(b.entries()));
        words.dedup();
        Ok(AdditiveCode { shape, words })
    }

    pub fn shape(&self) -> &CodeShape {
        &self.shape
    }

    pub fn words(&self) -> &[MixedVector] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, v: &MixedVector) -> bool {
        self.words
            .binary_search_by(|w| w.entries().cmp(v.entries()))
            .is_ok()
    }

    /// Exhaustive check that the word set contains zero and is closed under
    /// addition. Quadratic in `|C|`.
    pub fn is_closed(&self) -> bool {
        if !self.contains(&MixedVector::zero(self.shape.clone())) {
            return false;
        }
        self.words.iter().all(|u| {
            self.words
                .iter()
                .all(|v| self.contains(&u.add(v).expect("same shape")))
        })
    }
}

/// A code over `Z_p`: distinct words of a common length, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAryCode {
    p: u32,
    n: usize,
    words: Vec<Vec<u8>>,
}

impl PAryCode {
    /// Builds a code; duplicate words are merged.
    pub fn new(p: u32, n: usize, mut words: Vec<Vec<u8>>) -> Result<Self> {
        if p < 2 || p > 255 {
            return Err(Error::domain(format!("alphabet size {p} out of range")));
        }
        for w in &words {
            if w.len() != n {
                return Err(Error::domain(format!(
                    "word of length {} in a code of length {n}",
                    w.len()
                )));
            }
            if w.iter().any(|&x| x as u32 >= p) {
                return Err(Error::domain(format!("word has a symbol ≥ {p}")));
            }
        }
        words.sort_unstable();
        words.dedup();
        Ok(PAryCode { p, n, words })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Word length.
    pub fn length(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.words.binary_search_by(|w| w.as_slice().cmp(v)).is_ok()
    }

    pub fn contains_zero(&self) -> bool {
        self.words.first().is_some_and(|w| w.iter().all(|&x| x == 0))
    }

    /// `k` with `|C| = p^k`, if the size is a power of `p`.
    pub fn log_p_size(&self) -> Option<u32> {
        let mut size = self.words.len();
        let mut k = 0;
        if size == 0 {
            return None;
        }
        while size % self.p as usize == 0 {
            size /= self.p as usize;
            k += 1;
        }
        (size == 1).then_some(k)
    }
}

fn check_span_size(a: &GeneratorMatrix, cap: u64) -> Result<u64> {
    let predicted = predicted_size(a)
        .ok_or_else(|| Error::resource("code size overflows u64"))?;
    if predicted > cap {
        return Err(Error::resource(format!(
            "span of {} has {predicted} codewords, above the cap {cap}",
            a.signature()
        )));
    }
    if predicted.saturating_mul(a.shape().len() as u64) > ENTRY_CAP {
        return Err(Error::resource(format!(
            "span of {} would hold {predicted} × {} entries",
            a.signature(),
            a.shape().len()
        )));
    }
    Ok(predicted)
}

/// `Π o(w_k)`, the size of the span when the rows generate it minimally.
pub fn predicted_size(a: &GeneratorMatrix) -> Option<u64> {
    a.row_orders()
        .into_iter()
        .try_fold(1u64, |acc, o| acc.checked_mul(o))
}

/// The additive code `{ Σ c_k w_k : 0 ≤ c_k < o(w_k) }` generated by `a`.
pub fn span(a: &GeneratorMatrix) -> Result<AdditiveCode> {
    span_capped(a, DEFAULT_SPAN_CAP)
}

pub fn span_capped(a: &GeneratorMatrix, cap: u64) -> Result<AdditiveCode> {
    let predicted = check_span_size(a, cap)?;
    let shape = a.shape_arc().clone();
    let mut words = vec![MixedVector::zero(shape.clone())];
    words.reserve(predicted as usize);
    for row in a.rows() {
        let order = row.order();
        let prev = words.len();
        for c in 1..order as usize {
            for idx in 0..prev {
                // word (c-1)·prev + idx holds x + (c-1)·w
                let mut w = words[(c - 1) * prev + idx].clone();
                w.add_assign_unchecked(row);
                words.push(w);
            }
        }
    }
    let code = AdditiveCode::from_words(shape, words)?;
    if code.len() as u64 != predicted {
        return Err(Error::integrity(format!(
            "span of {} has {} distinct words, expected {predicted}: generators are not minimal",
            a.signature(),
            code.len()
        )));
    }
    Ok(code)
}

/// Exact size of the span without enumerating it.
///
/// The coefficient map `(c_k) ↦ Σ c_k w_k` is a homomorphism of finite
/// `p`-groups, so it is injective iff no nonzero coefficient vector of order
/// `p` maps to zero. Those vectors map onto the `Z_p`-span of
/// `(o(w_k)/p)·w_k`, which lives in the `p`-torsion of the product group, a
/// `GF(p)`-space once block `b` is divided by `p^b`. Hence the span has
/// `Π o(w_k)` words iff these torsion images are linearly independent.
/// Returns `Some(Π o(w_k))` in that case, `None` otherwise.
pub fn span_size_by_torsion(a: &GeneratorMatrix) -> Option<u64> {
    let shape = a.shape();
    let p = shape.p();
    let mut basis = EchelonBasis::new(p, shape.len());
    for row in a.rows() {
        let o = row.order();
        if o == 1 {
            return None;
        }
        let q = row.scalar_mul(o / p as u64);
        let mut flat = Vec::with_capacity(shape.len());
        for b in 0..shape.s() {
            let scale = p.pow(b as u32);
            flat.extend(q.block(b).iter().map(|&x| (x / scale) as u8));
        }
        if !basis.insert(&flat) {
            return None;
        }
    }
    predicted_size(a)
}

/// `Φ(C)`; fails if two words collide.
pub fn gray_image(c: &AdditiveCode) -> Result<PAryCode> {
    let gray = GrayMap::new(c.shape())?;
    let words: Vec<Vec<u8>> = c.words().iter().map(|w| gray.apply(w.entries())).collect();
    let expected = words.len();
    let image = PAryCode::new(c.shape().p(), gray.length(), words)?;
    if image.len() != expected {
        return Err(Error::integrity(format!(
            "Gray map collapsed {expected} words to {}",
            image.len()
        )));
    }
    Ok(image)
}

/// `{ v ∈ C : o(v) ≤ p }`.
pub fn order_p_subcode(c: &AdditiveCode) -> AdditiveCode {
    let p = c.shape().p() as u64;
    AdditiveCode {
        shape: c.shape.clone(),
        words: c.words().iter().filter(|w| w.order() <= p).cloned().collect(),
    }
}

/// Visits every codeword of the span of `a` once, as flat entries. The walk
/// assumes the rows generate minimally; check with [`span_size_by_torsion`]
/// first or words will repeat.
pub fn for_each_codeword<F>(a: &GeneratorMatrix, mut f: F)
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    let shape = a.shape();
    let orders = a.row_orders();
    let mut counters = vec![0u64; orders.len()];
    let mut current = vec![0u32; shape.len()];
    loop {
        if f(&current).is_break() {
            return;
        }
        let mut k = 0;
        loop {
            if k == orders.len() {
                return;
            }
            add_scaled_into(shape, &mut current, a.rows()[k].entries(), 1);
            counters[k] += 1;
            if counters[k] == orders[k] {
                counters[k] = 0;
                k += 1;
            } else {
                break;
            }
        }
    }
}

/// A uniformly random codeword of the span, given minimal generators.
pub fn random_codeword<R: Rng + ?Sized>(a: &GeneratorMatrix, rng: &mut R) -> MixedVector {
    random_codewords(a, 1, rng).pop().unwrap()
}

/// `count` independent uniformly random codewords.
pub fn random_codewords<R: Rng + ?Sized>(
    a: &GeneratorMatrix,
    count: usize,
    rng: &mut R,
) -> Vec<MixedVector> {
    let shape = a.shape_arc().clone();
    let orders = a.row_orders();
    (0..count)
        .map(|_| {
            let mut entries = vec![0u32; shape.len()];
            for (row, &o) in a.rows().iter().zip(&orders) {
                let c = rng.gen_range(0..o);
                add_scaled_into(&shape, &mut entries, row.entries(), c);
            }
            MixedVector::from_flat_unchecked(shape.clone(), entries)
        })
        .collect()
}

/// The vectors `(o(w_k)/p)·w_k`, one per row of `a`.
pub fn order_p_generators(a: &GeneratorMatrix) -> Vec<MixedVector> {
    let p = a.shape().p() as u64;
    a.rows()
        .iter()
        .map(|w| w.scalar_mul(w.order() / p))
        .collect()
}

//! Arithmetic in `Z_{p^k}` and in the mixed product group
//! `Z_p^{α_1} × Z_{p^2}^{α_2} × … × Z_{p^s}^{α_s}`.
//!
//! Blocks are indexed from zero in code: block `b` holds coordinates over
//! `Z_{p^(b+1)}`. Every stored entry is a canonical representative in
//! `[0, p^(b+1))`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest prime accepted; Gray images store one symbol per byte.
pub const MAX_PRIME: u32 = 251;

/// Trial-division primality test.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `p^e` as `u64`, or `None` on overflow.
pub fn checked_pow(p: u32, e: u32) -> Option<u64> {
    (p as u64).checked_pow(e)
}

/// Digits of `u` in base `p`, least significant first, padded to `r` digits.
pub fn p_ary_expansion(u: u64, p: u32, r: usize) -> Result<Vec<u32>> {
    let bound = checked_pow(p, r as u32)
        .ok_or_else(|| Error::domain(format!("{p}^{r} overflows")))?;
    if u >= bound {
        return Err(Error::domain(format!("{u} is not in [0, {p}^{r})")));
    }
    let mut digits = Vec::with_capacity(r);
    let mut rest = u;
    for _ in 0..r {
        digits.push((rest % p as u64) as u32);
        rest /= p as u64;
    }
    Ok(digits)
}

/// Inverse of [`p_ary_expansion`]: `Σ digits[i]·p^i`.
pub fn from_expansion(digits: &[u32], p: u32) -> Result<u64> {
    let mut value = 0u64;
    for (i, &d) in digits.iter().enumerate().rev() {
        if d >= p {
            return Err(Error::domain(format!(
                "digit {d} at position {i} is not in [0, {p})"
            )));
        }
        value = value
            .checked_mul(p as u64)
            .and_then(|v| v.checked_add(d as u64))
            .ok_or_else(|| Error::domain("expansion overflows u64"))?;
    }
    Ok(value)
}

/// Additive order of `x` in `Z_{p^k}`: `p^(k - v_p(x))`, and 1 for zero.
pub fn element_order(x: u32, p: u32, k: u32) -> u64 {
    if x == 0 {
        return 1;
    }
    let mut valuation = 0;
    let mut y = x;
    while y % p == 0 {
        y /= p;
        valuation += 1;
    }
    (p as u64).pow(k - valuation)
}

/// The alphabet `(p, s, α_1, …, α_s)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeShape {
    p: u32,
    s: usize,
    alphas: Vec<usize>,
}

impl CodeShape {
    pub fn new(p: u32, alphas: Vec<usize>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if p > MAX_PRIME {
            return Err(Error::domain(format!("p = {p} exceeds {MAX_PRIME}")));
        }
        let s = alphas.len();
        if s == 0 {
            return Err(Error::domain("s must be at least 1"));
        }
        if checked_pow(p, s as u32).map_or(true, |m| m > u32::MAX as u64) {
            return Err(Error::domain(format!("{p}^{s} does not fit in 32 bits")));
        }
        if alphas.iter().all(|&a| a == 0) {
            return Err(Error::domain("at least one block width must be positive"));
        }
        let shape = CodeShape { p, s, alphas };
        shape
            .checked_gray_length()
            .ok_or_else(|| Error::domain("Gray length overflows"))?;
        Ok(shape)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn alphas(&self) -> &[usize] {
        &self.alphas
    }

    /// Modulus `p^(b+1)` of block `b`.
    pub fn modulus(&self, block: usize) -> u32 {
        self.p.pow(block as u32 + 1)
    }

    /// Total number of coordinates `α_1 + … + α_s`.
    pub fn len(&self) -> usize {
        self.alphas.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index range of block `b` inside the flat entry array.
    pub fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        let start: usize = self.alphas[..block].iter().sum();
        start..start + self.alphas[block]
    }

    /// `α_1 + pα_2 + … + p^{s-1}α_s`.
    pub fn gray_length(&self) -> usize {
        self.checked_gray_length().expect("validated at construction")
    }

    fn checked_gray_length(&self) -> Option<usize> {
        let mut n = 0usize;
        for (b, &a) in self.alphas.iter().enumerate() {
            let width = usize::try_from(checked_pow(self.p, b as u32)?).ok()?;
            n = n.checked_add(a.checked_mul(width)?)?;
        }
        Some(n)
    }

    /// Modulus of every flat coordinate, in order.
    pub fn moduli(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len());
        for (b, &a) in self.alphas.iter().enumerate() {
            out.extend(std::iter::repeat(self.modulus(b)).take(a));
        }
        out
    }
}

impl fmt::Display for CodeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alphas: Vec<String> = self.alphas.iter().map(|a| a.to_string()).collect();
        write!(f, "p={} s={} alpha={}", self.p, self.s, alphas.join(","))
    }
}

/// An element of the mixed product group described by a [`CodeShape`].
#[derive(Clone)]
pub struct MixedVector {
    shape: Arc<CodeShape>,
    entries: Vec<u32>,
}

impl MixedVector {
    pub fn zero(shape: Arc<CodeShape>) -> Self {
        let len = shape.len();
        MixedVector {
            shape,
            entries: vec![0; len],
        }
    }

    /// Builds a vector from its blocks, reducing every entry modulo its block modulus.
    pub fn from_blocks(shape: Arc<CodeShape>, blocks: &[Vec<u32>]) -> Result<Self> {
        if blocks.len() != shape.s() {
            return Err(Error::domain(format!(
                "expected {} blocks, got {}",
                shape.s(),
                blocks.len()
            )));
        }
        let mut entries = Vec::with_capacity(shape.len());
        for (b, block) in blocks.iter().enumerate() {
            if block.len() != shape.alphas()[b] {
                return Err(Error::domain(format!(
                    "block {} has {} entries, expected {}",
                    b + 1,
                    block.len(),
                    shape.alphas()[b]
                )));
            }
            let m = shape.modulus(b);
            entries.extend(block.iter().map(|&x| x % m));
        }
        Ok(MixedVector { shape, entries })
    }

    /// Builds a vector from already-reduced flat entries.
    pub(crate) fn from_flat_unchecked(shape: Arc<CodeShape>, entries: Vec<u32>) -> Self {
        debug_assert_eq!(entries.len(), shape.len());
        MixedVector { shape, entries }
    }

    pub fn shape(&self) -> &CodeShape {
        &self.shape
    }

    pub fn shape_arc(&self) -> &Arc<CodeShape> {
        &self.shape
    }

    /// Flat entries, block after block.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn block(&self, block: usize) -> &[u32] {
        &self.entries[self.shape.block_range(block)]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &MixedVector) -> Result<MixedVector> {
        if self.shape != other.shape {
            return Err(Error::domain(format!(
                "cannot add vectors of shapes ({}) and ({})",
                self.shape, other.shape
            )));
        }
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &MixedVector) {
        add_scaled_into(&self.shape, &mut self.entries, &other.entries, 1);
    }

    /// `m·v`, entry-wise modulo the block modulus.
    pub fn scalar_mul(&self, m: u64) -> MixedVector {
        let mut entries = self.entries.clone();
        for b in 0..self.shape.s() {
            let modulus = self.shape.modulus(b) as u64;
            let factor = m % modulus;
            for x in &mut entries[self.shape.block_range(b)] {
                *x = ((*x as u64 * factor) % modulus) as u32;
            }
        }
        MixedVector {
            shape: self.shape.clone(),
            entries,
        }
    }

    /// Additive order: the largest entry order, since all orders are powers of `p`.
    pub fn order(&self) -> u64 {
        let p = self.shape.p();
        let mut order = 1;
        for b in 0..self.shape.s() {
            for &x in self.block(b) {
                order = order.max(element_order(x, p, b as u32 + 1));
            }
        }
        order
    }
}

/// `acc += factor·v` over the mixed alphabet described by `shape`.
pub(crate) fn add_scaled_into(shape: &CodeShape, acc: &mut [u32], v: &[u32], factor: u64) {
    for b in 0..shape.s() {
        let range = shape.block_range(b);
        let m = shape.modulus(b);
        let f = (factor % m as u64) as u32;
        if f == 1 {
            for (a, &x) in acc[range.clone()].iter_mut().zip(&v[range]) {
                let t = *a + x;
                *a = if t >= m { t - m } else { t };
            }
        } else if f != 0 && m <= 1 << 12 {
            // small alphabets: look up f·x mod m
            let times: Vec<u32> = (0..m).map(|x| ((f as u64 * x as u64) % m as u64) as u32).collect();
            for (a, &x) in acc[range.clone()].iter_mut().zip(&v[range]) {
                let t = *a + times[x as usize];
                *a = if t >= m { t - m } else { t };
            }
        } else if f != 0 {
            for (a, &x) in acc[range.clone()].iter_mut().zip(&v[range]) {
                *a = ((*a as u64 + f as u64 * x as u64) % m as u64) as u32;
            }
        }
    }
}

pub fn add(u: &MixedVector, v: &MixedVector) -> Result<MixedVector> {
    u.add(v)
}

pub fn scalar_mul(m: u64, v: &MixedVector) -> MixedVector {
    v.scalar_mul(m)
}

pub fn order_of(v: &MixedVector) -> u64 {
    v.order()
}

impl PartialEq for MixedVector {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries && self.shape == other.shape
    }
}

impl Eq for MixedVector {}

impl Hash for MixedVector {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.entries.hash(state);
    }
}

impl fmt::Display for MixedVector {
    /// Row syntax of the matrix text format: blocks separated by ` | `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in 0..self.shape.s() {
            if b > 0 {
                f.write_str(" | ")?;
            }
            let block: Vec<String> = self.block(b).iter().map(|x| x.to_string()).collect();
            f.write_str(&block.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MixedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

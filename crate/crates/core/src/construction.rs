//! Recursive generator matrices `A_p^{t_1,…,t_s}`.
//!
//! Construction starts from the two-row base matrix `A_p^{1,0,…,0,1}` and
//! appends one generator at a time. A generator of order `p^{s-i+1}` is
//! appended by [`extend_with_row`] with index `i`; rows must be appended in
//! the order `i = 1, 1, …, 2, 2, …, s, s` and [`build`] is the only
//! way to reach an arbitrary signature.
//!
//! Column layout of one extension step, left to right:
//!
//! * `Z_p` block: `A_1` repeated `p` times, new row constant `0, 1, …, p-1`
//!   on the copies.
//! * for `j = 1..=s-i`, the `Z_{p^{j+1}}` block is `P_j`: the matrix `M_j`
//!   repeated `p-1` times (new row `1, …, p-1`), then `A_{j+1}` repeated
//!   `p^{j+1}` times (new row `0, …, p^{j+1}-1`).
//! * for `k = 1..i`, the `Z_{p^{s-i+k+1}}` block is `Q_k`: `A_{s-i+k+1}`
//!   repeated `p^{s-i+1}` times, new row `p^k·0, p^k·1, …`.
//!
//! `M_j` has one column per tuple `{p^j} × {0, p, 2p, …, p(p^j-1)}^{R-1}`
//! where `R` is the current number of rows; tuples are listed in ascending
//! order with the last coordinate varying fastest.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{checked_pow, is_prime, CodeShape, MixedVector, MAX_PRIME};

/// Default cap on the code size `p^{Σ(s-i+1)t_i}` accepted by [`build`].
pub const DEFAULT_BUILD_CAP: u64 = 1 << 22;

/// Abelian type `(t_1, …, t_s)` of the additive code: `t_i` generators of
/// order `p^{s-i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeSignature {
    p: u32,
    s: usize,
    t: Vec<usize>,
}

impl TypeSignature {
    pub fn new(p: u32, t: Vec<usize>) -> Result<Self> {
        if !is_prime(p) || p > MAX_PRIME {
            return Err(Error::domain(format!("p = {p} must be a prime ≤ {MAX_PRIME}")));
        }
        let s = t.len();
        if s < 2 {
            return Err(Error::domain(format!("s = {s}, need s ≥ 2")));
        }
        if t[0] == 0 {
            return Err(Error::domain("t_1 must be at least 1"));
        }
        if t[s - 1] == 0 {
            return Err(Error::domain("t_s must be at least 1"));
        }
        Ok(TypeSignature { p, s, t })
    }

    /// Signature of the base matrix, `(1, 0, …, 0, 1)`.
    pub fn base(p: u32, s: usize) -> Result<Self> {
        if s < 2 {
            return Err(Error::domain(format!("s = {s}, need s ≥ 2")));
        }
        let mut t = vec![0; s];
        t[0] = 1;
        t[s - 1] = 1;
        TypeSignature::new(p, t)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> &[usize] {
        &self.t
    }

    /// Number of generators `t_1 + … + t_s`.
    pub fn rank(&self) -> usize {
        self.t.iter().sum()
    }

    /// `Σ_i (s-i+1)·t_i`, so that the code has `p^exponent` words.
    pub fn size_exponent(&self) -> u32 {
        self.t
            .iter()
            .enumerate()
            .map(|(i, &ti)| ((self.s - i) * ti) as u32)
            .sum()
    }

    /// `p^{Σ(s-i+1)t_i}`, or `None` on overflow.
    pub fn code_size(&self) -> Option<u64> {
        checked_pow(self.p, self.size_exponent())
    }

    /// Order `p^{s-i+1}` of a generator of kind `i` (1-based).
    pub fn generator_order(&self, i: usize) -> u64 {
        (self.p as u64).pow((self.s - i + 1) as u32)
    }

    /// The row orders expected in the matrix, sorted descending.
    pub fn expected_row_orders(&self) -> Vec<u64> {
        let mut orders = Vec::with_capacity(self.rank());
        for (idx, &ti) in self.t.iter().enumerate() {
            orders.extend(std::iter::repeat(self.generator_order(idx + 1)).take(ti));
        }
        orders
    }

    /// Linearity of the Gray image predicted by the classification: linear
    /// exactly when `p = 2`, `t_1 = 1` and every interior `t_i` is zero.
    pub fn predicts_linear_image(&self) -> bool {
        self.p == 2 && self.t[0] == 1 && self.t[1..self.s - 1].iter().all(|&x| x == 0)
    }

    fn with_increment(&self, i: usize) -> TypeSignature {
        let mut t = self.t.clone();
        t[i - 1] += 1;
        TypeSignature {
            p: self.p,
            s: self.s,
            t,
        }
    }
}

impl fmt::Display for TypeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.t.iter().map(|x| x.to_string()).collect();
        write!(f, "p={} s={} t={}", self.p, self.s, t.join(","))
    }
}

/// Generator matrix with its block structure and abelian type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    shape: Arc<CodeShape>,
    rows: Vec<MixedVector>,
    signature: TypeSignature,
}

impl GeneratorMatrix {
    /// Assembles a matrix from parsed parts, checking that the row orders
    /// realise `signature`.
    pub fn from_parts(
        shape: CodeShape,
        rows: Vec<Vec<Vec<u32>>>,
        signature: TypeSignature,
    ) -> Result<Self> {
        if shape.p() != signature.p() || shape.s() != signature.s() {
            return Err(Error::domain(format!(
                "shape ({shape}) does not match signature ({signature})"
            )));
        }
        let shape = Arc::new(shape);
        let rows = rows
            .iter()
            .map(|blocks| MixedVector::from_blocks(shape.clone(), blocks))
            .collect::<Result<Vec<_>>>()?;
        let matrix = GeneratorMatrix {
            shape,
            rows,
            signature,
        };
        matrix.check_row_orders()?;
        Ok(matrix)
    }

    pub fn shape(&self) -> &CodeShape {
        &self.shape
    }

    pub fn shape_arc(&self) -> &Arc<CodeShape> {
        &self.shape
    }

    pub fn rows(&self) -> &[MixedVector] {
        &self.rows
    }

    pub fn signature(&self) -> &TypeSignature {
        &self.signature
    }

    pub fn row_orders(&self) -> Vec<u64> {
        self.rows.iter().map(MixedVector::order).collect()
    }

    /// Verifies that exactly `t_i` rows have order `p^{s-i+1}`.
    pub fn check_row_orders(&self) -> Result<()> {
        let mut actual = self.row_orders();
        actual.sort_unstable_by(|a, b| b.cmp(a));
        let expected = self.signature.expected_row_orders();
        if actual != expected {
            return Err(Error::integrity(format!(
                "row orders {actual:?} do not realise {}; expected {expected:?}",
                self.signature
            )));
        }
        Ok(())
    }

    /// Whether a generator of kind `i` may be appended without breaking the
    /// order of additions.
    fn may_append(&self, i: usize) -> bool {
        let s = self.signature.s();
        let t = self.signature.t();
        // no later kind may have been appended yet
        (i + 1..=s).all(|l| if l == s { t[l - 1] == 1 } else { t[l - 1] == 0 })
    }
}

impl fmt::Display for GeneratorMatrix {
    /// Matrix text format: a header line, then one line per row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alphas: Vec<String> = self.shape.alphas().iter().map(|a| a.to_string()).collect();
        let t: Vec<String> = self.signature.t().iter().map(|a| a.to_string()).collect();
        writeln!(
            f,
            "p={} s={} alpha={} t={}",
            self.shape.p(),
            self.shape.s(),
            alphas.join(","),
            t.join(",")
        )?;
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// `A_p^{1,0,…,0,1}`.
///
/// The first row is `(1…1 | p…p | … | p^{s-1}…p^{s-1})` and has order `p`;
/// the second is `(0, 1, …, p-1 | 1, …, p-1 | … | 1, …, p-1)` and has order
/// `p^s`.
pub fn base_matrix(p: u32, s: usize) -> Result<GeneratorMatrix> {
    let signature = TypeSignature::base(p, s)?;
    let mut alphas = vec![p as usize];
    alphas.extend(std::iter::repeat(p as usize - 1).take(s - 1));
    let shape = Arc::new(CodeShape::new(p, alphas)?);

    let mut first = vec![vec![1u32; p as usize]];
    let mut second = vec![(0..p).collect::<Vec<u32>>()];
    for b in 1..s {
        first.push(vec![p.pow(b as u32); p as usize - 1]);
        second.push((1..p).collect());
    }
    let rows = vec![
        MixedVector::from_blocks(shape.clone(), &first)?,
        MixedVector::from_blocks(shape.clone(), &second)?,
    ];
    Ok(GeneratorMatrix {
        shape,
        rows,
        signature,
    })
}

/// Block widths after appending a generator of kind `i` to a matrix with
/// `rows` rows and widths `alphas`; `None` on overflow.
fn extended_alphas(p: u32, s: usize, rows: usize, alphas: &[usize], i: usize) -> Option<Vec<usize>> {
    let p64 = p as u64;
    let mut out = Vec::with_capacity(s);
    out.push((alphas[0] as u64).checked_mul(p64)?);
    for j in 1..s {
        let width = if j <= s - i {
            let m_cols = checked_pow(p, (j * (rows - 1)) as u32)?;
            let copies = (p64 - 1).checked_mul(m_cols)?;
            let tail = checked_pow(p, j as u32 + 1)?.checked_mul(alphas[j] as u64)?;
            copies.checked_add(tail)?
        } else {
            checked_pow(p, (s - i + 1) as u32)?.checked_mul(alphas[j] as u64)?
        };
        out.push(width);
    }
    out.into_iter().map(|w| usize::try_from(w).ok()).collect()
}

/// Appends one generator of order `p^{s-i+1}` (`i` is 1-based) as the last row.
pub fn extend_with_row(a: &GeneratorMatrix, i: usize) -> Result<GeneratorMatrix> {
    extend_with_row_capped(a, i, DEFAULT_BUILD_CAP)
}

pub fn extend_with_row_capped(a: &GeneratorMatrix, i: usize, cap: u64) -> Result<GeneratorMatrix> {
    let sig = a.signature();
    let (p, s) = (sig.p(), sig.s());
    if i == 0 || i > s {
        return Err(Error::domain(format!("row kind i = {i} is not in 1..={s}")));
    }
    if !a.may_append(i) {
        return Err(Error::domain(format!(
            "appending a row of kind {i} to {sig} breaks the required order of additions"
        )));
    }
    let new_sig = sig.with_increment(i);
    match new_sig.code_size() {
        Some(size) if size <= cap => {}
        _ => {
            return Err(Error::resource(format!(
                "{new_sig} has {p}^{} codewords, above the cap {cap}",
                new_sig.size_exponent()
            )))
        }
    }
    let r = a.rows().len();
    let alphas = extended_alphas(p, s, r, a.shape().alphas(), i)
        .ok_or_else(|| Error::resource("block widths overflow"))?;
    let shape = CodeShape::new(p, alphas)?;
    if shape.gray_length() as u64 > cap {
        return Err(Error::resource(format!(
            "Gray length {} exceeds the cap {cap}",
            shape.gray_length()
        )));
    }

    // blocks[row][block]; row r is the new generator
    let mut blocks: Vec<Vec<Vec<u32>>> = (0..=r)
        .map(|_| {
            (0..s)
                .map(|b| Vec::with_capacity(shape.alphas()[b]))
                .collect()
        })
        .collect();

    let old = |k: usize, b: usize| a.rows()[k].block(b);

    // Z_p block
    for c in 0..p {
        for k in 0..r {
            blocks[k][0].extend_from_slice(old(k, 0));
        }
        blocks[r][0].extend(std::iter::repeat(c).take(a.shape().alphas()[0]));
    }

    for j in 1..s {
        let width = a.shape().alphas()[j];
        if j <= s - i {
            // P_j: M_j copies, then A_{j+1} copies
            let mj = m_columns(p, j as u32, r);
            for c in 1..p {
                for column in &mj {
                    for k in 0..r {
                        blocks[k][j].push(column[k]);
                    }
                    blocks[r][j].push(c);
                }
            }
            for c in 0..p.pow(j as u32 + 1) {
                for k in 0..r {
                    blocks[k][j].extend_from_slice(old(k, j));
                }
                blocks[r][j].extend(std::iter::repeat(c).take(width));
            }
        } else {
            // Q_k with k = j - (s - i)
            let kq = (j - (s - i)) as u32;
            let step = p.pow(kq);
            for c in 0..p.pow((s - i + 1) as u32) {
                for k in 0..r {
                    blocks[k][j].extend_from_slice(old(k, j));
                }
                blocks[r][j].extend(std::iter::repeat(step * c).take(width));
            }
        }
    }

    let shape = Arc::new(shape);
    let rows = blocks
        .iter()
        .map(|row| MixedVector::from_blocks(shape.clone(), row))
        .collect::<Result<Vec<_>>>()?;
    let out = GeneratorMatrix {
        shape,
        rows,
        signature: new_sig,
    };
    out.check_row_orders()?;
    Ok(out)
}

/// Columns of `M_j` for a matrix with `rows` rows, each as a vector of
/// `rows` entries over `Z_{p^{j+1}}`.
fn m_columns(p: u32, j: u32, rows: usize) -> Vec<Vec<u32>> {
    let radix = p.pow(j);
    let count = (radix as usize).pow(rows as u32 - 1);
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0u32; rows - 1];
    for _ in 0..count {
        let mut column = Vec::with_capacity(rows);
        column.push(radix);
        column.extend(digits.iter().map(|&d| p * d));
        out.push(column);
        // increment, last coordinate fastest
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d == radix {
                *d = 0;
            } else {
                break;
            }
        }
    }
    out
}

/// `A_p^{t_1,…,t_s}` via `t_1+…+t_s-2` extensions in the mandated order.
pub fn build(sig: &TypeSignature) -> Result<GeneratorMatrix> {
    build_capped(sig, DEFAULT_BUILD_CAP)
}

pub fn build_capped(sig: &TypeSignature, cap: u64) -> Result<GeneratorMatrix> {
    match sig.code_size() {
        Some(size) if size <= cap => {}
        _ => {
            return Err(Error::resource(format!(
                "{sig} has {}^{} codewords, above the cap {cap}",
                sig.p(),
                sig.size_exponent()
            )))
        }
    }
    let mut a = base_matrix(sig.p(), sig.s())?;
    for (idx, &ti) in sig.t().iter().enumerate() {
        let i = idx + 1;
        let already = if i == 1 || i == sig.s() { 1 } else { 0 };
        for _ in already..ti {
            a = extend_with_row_capped(&a, i, cap)?;
        }
    }
    debug_assert_eq!(a.signature(), sig);
    Ok(a)
}

pub fn shape_of(a: &GeneratorMatrix) -> CodeShape {
    a.shape().clone()
}

//! The generalized Carlet Gray map.
//!
//! `φ_r : Z_{p^r} → Z_p^{p^{r-1}}` sends `u = Σ u_i p^i` to the constant vector
//! `(u_{r-1}, …, u_{r-1})` plus `(u_0, …, u_{r-2})·Y_{r-1}`, where the columns of
//! `Y_{r-1}` are the vectors of `Z_p^{r-1}` in ascending order. `φ_1` is the
//! identity. [`GrayMap`] assembles these per block into `Φ`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::ring::{checked_pow, is_prime, p_ary_expansion, CodeShape, MixedVector, MAX_PRIME};

/// Default cap on `p^{r-1}`, the width of one Gray image.
pub const DEFAULT_WIDTH_CAP: u64 = 1 << 16;

/// Tables with more than this many symbols are not memoized.
const TABLE_SYMBOL_CAP: u64 = 1 << 22;

/// `Y_{r-1}`: `(r-1) × p^{r-1}`, column `j` holds the base-`p` digits of `j`
/// with the least significant digit in row 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YMatrix {
    p: u32,
    r: u32,
    rows: Vec<Vec<u8>>,
}

impl YMatrix {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn num_columns(&self) -> usize {
        (self.p as usize).pow(self.r - 1)
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        self.rows.iter().map(|row| row[j]).collect()
    }
}

fn check_params(p: u32, r: u32) -> Result<u64> {
    if !is_prime(p) || p > MAX_PRIME {
        return Err(Error::domain(format!("p = {p} must be a prime ≤ {MAX_PRIME}")));
    }
    if r == 0 {
        return Err(Error::domain("r must be positive"));
    }
    let width = checked_pow(p, r - 1).filter(|&w| w <= DEFAULT_WIDTH_CAP).ok_or_else(|| {
        Error::resource(format!("{p}^{} exceeds the Gray width cap {DEFAULT_WIDTH_CAP}", r - 1))
    })?;
    Ok(width)
}

pub fn y_matrix(p: u32, r: u32) -> Result<YMatrix> {
    let width = check_params(p, r)? as usize;
    let depth = (r - 1) as usize;
    let mut rows = vec![vec![0u8; width]; depth];
    for j in 0..width {
        let digits = p_ary_expansion(j as u64, p, depth)?;
        for (i, d) in digits.into_iter().enumerate() {
            rows[i][j] = d as u8;
        }
    }
    Ok(YMatrix { p, r, rows })
}

/// `φ_r(u)`.
pub fn phi(u: u64, p: u32, r: u32) -> Result<Vec<u8>> {
    let width = check_params(p, r)? as usize;
    let digits = p_ary_expansion(u, p, r as usize)?;
    let mut out = vec![0u8; width];
    phi_into(&digits, p, &mut out);
    Ok(out)
}

/// Writes `φ_r` of the number with digits `digits` (length `r`) into `out`.
/// Each scaled row of `Y` is generated on the fly: entry `j` of row `i` is
/// digit `i` of `j`.
fn phi_into(digits: &[u32], p: u32, out: &mut [u8]) {
    let r = digits.len();
    let top = digits[r - 1];
    out.fill(top as u8);
    let mut stride = 1usize;
    for &d in &digits[..r - 1] {
        if d != 0 {
            for (j, o) in out.iter_mut().enumerate() {
                let y = ((j / stride) % p as usize) as u32;
                *o = ((*o as u32 + d * y) % p) as u8;
            }
        }
        stride *= p as usize;
    }
}

/// `Φ_r`: `φ_r` applied to each coordinate, images concatenated in order.
pub fn phi_extended(v: &[u64], p: u32, r: u32) -> Result<Vec<u8>> {
    let table = PhiTable::get(p, r)?;
    let bound = table.alphabet_size() as u64;
    let mut out = Vec::with_capacity(v.len() * table.width());
    for &u in v {
        if u >= bound {
            return Err(Error::domain(format!("{u} is not in [0, {p}^{r})")));
        }
        out.extend_from_slice(table.image(u as u32));
    }
    Ok(out)
}

/// `Φ(y_1 | … | y_s) = (y_1, Φ_2(y_2), …, Φ_s(y_s))`.
pub fn mixed_gray(v: &MixedVector) -> Vec<u8> {
    GrayMap::new(v.shape())
        .expect("shape within Gray width cap")
        .apply(v.entries())
}

/// All `p^r` images of `φ_r`, memoized per `(p, r)`.
#[derive(Debug)]
pub struct PhiTable {
    p: u32,
    r: u32,
    width: usize,
    symbols: Vec<u8>,
}

type TableCache = RwLock<HashMap<(u32, u32), Arc<PhiTable>>>;

fn cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

impl PhiTable {
    pub fn get(p: u32, r: u32) -> Result<Arc<PhiTable>> {
        if let Some(t) = cache().read().unwrap().get(&(p, r)) {
            return Ok(t.clone());
        }
        let width = check_params(p, r)?;
        let count = checked_pow(p, r).unwrap();
        if count.saturating_mul(width) > TABLE_SYMBOL_CAP {
            return Err(Error::resource(format!(
                "Gray table for p={p}, r={r} would hold {} symbols",
                count.saturating_mul(width)
            )));
        }
        let width = width as usize;
        let mut symbols = vec![0u8; count as usize * width];
        for (u, out) in symbols.chunks_mut(width).enumerate() {
            let digits = p_ary_expansion(u as u64, p, r as usize)?;
            phi_into(&digits, p, out);
        }
        let table = Arc::new(PhiTable {
            p,
            r,
            width,
            symbols,
        });
        cache().write().unwrap().insert((p, r), table.clone());
        Ok(table)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `p^{r-1}`.
    pub fn width(&self) -> usize {
        self.width
    }

    /// `p^r`.
    pub fn alphabet_size(&self) -> usize {
        self.symbols.len() / self.width
    }

    pub fn image(&self, u: u32) -> &[u8] {
        let at = u as usize * self.width;
        &self.symbols[at..at + self.width]
    }

    /// Map from each image back to its preimage.
    pub fn inverse_map(&self) -> HashMap<&[u8], u32> {
        (0..self.alphabet_size() as u32)
            .map(|u| (self.image(u), u))
            .collect()
    }

    /// True when all `p^r` images are distinct.
    pub fn is_injective(&self) -> bool {
        self.inverse_map().len() == self.alphabet_size()
    }
}

/// `Φ` for one [`CodeShape`].
#[derive(Debug, Clone)]
pub struct GrayMap {
    shape: CodeShape,
    tables: Vec<Arc<PhiTable>>,
    length: usize,
}

impl GrayMap {
    pub fn new(shape: &CodeShape) -> Result<Self> {
        let tables = (1..=shape.s() as u32)
            .map(|r| PhiTable::get(shape.p(), r))
            .collect::<Result<Vec<_>>>()?;
        Ok(GrayMap {
            shape: shape.clone(),
            tables,
            length: shape.gray_length(),
        })
    }

    pub fn shape(&self) -> &CodeShape {
        &self.shape
    }

    pub fn tables(&self) -> &[Arc<PhiTable>] {
        &self.tables
    }

    /// Output length `n`.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn apply(&self, entries: &[u32]) -> Vec<u8> {
        let mut out = vec![0u8; self.length];
        self.apply_into(entries, &mut out);
        out
    }

    pub fn apply_into(&self, entries: &[u32], out: &mut [u8]) {
        debug_assert_eq!(entries.len(), self.shape.len());
        debug_assert_eq!(out.len(), self.length);
        let mut at = 0;
        for (b, table) in self.tables.iter().enumerate() {
            let block = &entries[self.shape.block_range(b)];
            let w = table.width();
            let dst = &mut out[at..at + block.len() * w];
            let src = &table.symbols;
            // fixed widths let the copies inline
            match w {
                1 => dst.iter_mut().zip(block).for_each(|(d, &u)| *d = src[u as usize]),
                2 => copy_images::<2>(dst, block, src),
                3 => copy_images::<3>(dst, block, src),
                4 => copy_images::<4>(dst, block, src),
                8 => copy_images::<8>(dst, block, src),
                9 => copy_images::<9>(dst, block, src),
                _ => {
                    for (d, &u) in dst.chunks_exact_mut(w).zip(block) {
                        d.copy_from_slice(table.image(u));
                    }
                }
            }
            at += dst.len();
        }
    }
}

fn copy_images<const W: usize>(dst: &mut [u8], block: &[u32], src: &[u8]) {
    for (d, &u) in dst.chunks_exact_mut(W).zip(block) {
        let at = u as usize * W;
        d.copy_from_slice(&src[at..at + W]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct evaluation of the defining formula with an explicit `Y` built
    /// by counting, independent of `phi_into`'s stride arithmetic.
    fn phi_oracle(u: u64, p: u32, r: u32) -> Vec<u8> {
        let mut digits = Vec::new();
        let mut x = u;
        for _ in 0..r {
            digits.push((x % p as u64) as u32);
            x /= p as u64;
        }
        let width = (p as usize).pow(r - 1);
        // columns of Y by counting in base p, first row least significant
        let mut columns = Vec::new();
        let mut col = vec![0u32; (r - 1) as usize];
        for _ in 0..width {
            columns.push(col.clone());
            for c in col.iter_mut() {
                *c += 1;
                if *c == p {
                    *c = 0;
                } else {
                    break;
                }
            }
        }
        columns
            .iter()
            .map(|c| {
                let dot: u32 = c.iter().zip(&digits).map(|(a, b)| a * b).sum();
                ((digits[(r - 1) as usize] + dot) % p) as u8
            })
            .collect()
    }

    #[test]
    fn y_matrix_examples() {
        assert_eq!(y_matrix(2, 2).unwrap().rows(), &[vec![0u8, 1]]);
        let y = y_matrix(2, 3).unwrap();
        let cols: Vec<Vec<u8>> = (0..4).map(|j| y.column(j)).collect();
        assert_eq!(cols, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(y_matrix(3, 2).unwrap().rows(), &[vec![0u8, 1, 2]]);
        let y1 = y_matrix(5, 1).unwrap();
        assert!(y1.rows().is_empty());
        assert_eq!(y1.num_columns(), 1);
        assert!(matches!(y_matrix(2, 18), Err(Error::Resource(_))));
    }

    #[test]
    fn phi_z4_table() {
        assert_eq!(phi(0, 2, 2).unwrap(), vec![0, 0]);
        assert_eq!(phi(1, 2, 2).unwrap(), vec![0, 1]);
        assert_eq!(phi(2, 2, 2).unwrap(), vec![1, 1]);
        assert_eq!(phi(3, 2, 2).unwrap(), vec![1, 0]);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(2, 3, 1).unwrap(), vec![2]);
        assert_eq!(phi(1, 2, 3).unwrap(), vec![0, 1, 0, 1]);
        assert_eq!(phi(2, 2, 3).unwrap(), vec![0, 0, 1, 1]);
        assert_eq!(phi(4, 2, 3).unwrap(), vec![1, 1, 1, 1]);
        assert!(matches!(phi(8, 2, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_matches_oracle() {
        for (p, r) in [(2, 1), (2, 2), (2, 3), (2, 5), (3, 1), (3, 2), (3, 3), (5, 2), (5, 3), (7, 2)] {
            for u in 0..(p as u64).pow(r) {
                assert_eq!(phi(u, p, r).unwrap(), phi_oracle(u, p, r), "p={p} r={r} u={u}");
            }
        }
    }

    #[test]
    fn phi_is_injective() {
        for (p, r) in [(2, 4), (2, 8), (3, 4), (3, 6), (5, 3), (7, 3)] {
            assert!(PhiTable::get(p, r).unwrap().is_injective(), "p={p} r={r}");
        }
    }

    #[test]
    fn phi_extended_examples() {
        assert_eq!(phi_extended(&[2, 1], 2, 2).unwrap(), vec![1, 1, 0, 1]);
        assert!(phi_extended(&[], 2, 3).unwrap().is_empty());
        assert_eq!(phi_extended(&[4], 2, 3).unwrap(), vec![1, 1, 1, 1]);
        assert!(phi_extended(&[4], 2, 2).is_err());
    }

    #[test]
    fn mixed_gray_examples() {
        let sh = Arc::new(CodeShape::new(2, vec![2, 1, 1]).unwrap());
        let v = |b: [&[u32]; 3]| {
            MixedVector::from_blocks(sh.clone(), &b.map(|x| x.to_vec())).unwrap()
        };
        assert_eq!(mixed_gray(&v([&[0, 0], &[0], &[0]])), vec![0; 8]);
        assert_eq!(mixed_gray(&v([&[1, 1], &[2], &[4]])), vec![1; 8]);
        assert_eq!(
            mixed_gray(&v([&[0, 1], &[1], &[1]])),
            vec![0, 1, 0, 1, 0, 1, 0, 1]
        );
    }

    #[test]
    fn digit_linearity_small() {
        // Σ λ_i φ(p^i) = φ(Σ λ_i p^i) over Z_p
        for (p, r) in [(2u32, 2u32), (2, 3), (3, 2), (3, 3), (5, 2)] {
            let table = PhiTable::get(p, r).unwrap();
            for u in 0..(p as u64).pow(r) {
                let digits = p_ary_expansion(u, p, r as usize).unwrap();
                let mut acc = vec![0u32; table.width()];
                for (i, &l) in digits.iter().enumerate() {
                    for (a, &y) in acc.iter_mut().zip(table.image(p.pow(i as u32))) {
                        *a = (*a + l * y as u32) % p;
                    }
                }
                let lhs: Vec<u8> = acc.into_iter().map(|x| x as u8).collect();
                assert_eq!(lhs, table.image(u as u32));
            }
        }
    }
}

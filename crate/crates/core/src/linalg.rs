//! Row reduction over GF(p) for vectors stored one symbol per byte.

use crate::error::{Error, Result};

/// Multiplicative inverse in GF(p) by the extended Euclidean algorithm.
pub fn inverse_mod(a: u32, p: u32) -> Option<u32> {
    let (mut r0, mut r1) = (p as i64, (a % p) as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(p as i64) as u32)
}

/// `v -= c·row` over GF(p).
pub(crate) fn sub_scaled(v: &mut [u8], row: &[u8], c: u8, p: u8) {
    if c == 0 {
        return;
    }
    if p == 2 {
        for (x, &y) in v.iter_mut().zip(row) {
            *x ^= y;
        }
        return;
    }
    let neg = p - c;
    let table: Vec<u8> = (0..p).map(|y| ((neg as u16 * y as u16) % p as u16) as u8).collect();
    for (x, &y) in v.iter_mut().zip(row) {
        let t = *x + table[y as usize];
        *x = if t >= p { t - p } else { t };
    }
}

/// `v += w` over GF(p).
pub(crate) fn add_assign(v: &mut [u8], w: &[u8], p: u8) {
    if p == 2 {
        for (x, &y) in v.iter_mut().zip(w) {
            *x ^= y;
        }
    } else {
        for (x, &y) in v.iter_mut().zip(w) {
            let t = *x + y;
            *x = if t >= p { t - p } else { t };
        }
    }
}

/// A basis kept in reduced row echelon form: each pivot entry is 1 and every
/// other basis row is zero in that column. Rows are kept in insertion order.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    p: u8,
    len: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(p: u32, len: usize) -> Self {
        assert!(p >= 2 && p <= 255);
        EchelonBasis {
            p: p as u8,
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p as u32
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Reduces `v` in place against the basis; the remainder is zero iff
    /// `v` lies in the span.
    pub fn reduce(&self, v: &mut [u8]) {
        debug_assert_eq!(v.len(), self.len);
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            sub_scaled(v, row, c, self.p);
        }
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the basis if it is independent; returns whether it was.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        self.insert_reduced(w)
    }

    /// Like [`insert`](Self::insert) for a vector already reduced by
    /// [`reduce`](Self::reduce).
    pub fn insert_reduced(&mut self, mut w: Vec<u8>) -> bool {
        let Some(piv) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inverse_mod(w[piv] as u32, self.p as u32).unwrap() as u8;
        if inv != 1 {
            let p = self.p as u16;
            for x in w.iter_mut() {
                *x = ((*x as u16 * inv as u16) % p) as u8;
            }
        }
        for row in self.rows.iter_mut() {
            let c = row[piv];
            sub_scaled(row, &w, c, self.p);
        }
        self.rows.push(w);
        self.pivots.push(piv);
        true
    }

    /// All `p^rank` vectors of the span, capped at `cap` elements.
    pub fn span(&self, cap: u64) -> Result<Vec<Vec<u8>>> {
        let size = (self.p as u64)
            .checked_pow(self.rank() as u32)
            .filter(|&n| n <= cap)
            .ok_or_else(|| {
                Error::resource(format!("span of dimension {} exceeds cap {cap}", self.rank()))
            })?;
        let mut out = Vec::with_capacity(size as usize);
        out.push(vec![0u8; self.len]);
        for row in &self.rows {
            let prev = out.len();
            for c in 1..self.p {
                for idx in 0..prev {
                    let mut w = out[idx].clone();
                    let mut scaled = row.clone();
                    for x in scaled.iter_mut() {
                        *x = ((*x as u16 * c as u16) % self.p as u16) as u8;
                    }
                    add_assign(&mut w, &scaled, self.p);
                    out.push(w);
                }
            }
        }
        Ok(out)
    }
}

/// Rank over GF(p) of the given vectors.
pub fn rank_of<'a>(p: u32, len: usize, vectors: impl IntoIterator<Item = &'a [u8]>) -> usize {
    let mut basis = EchelonBasis::new(p, len);
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses() {
        for p in [2u32, 3, 5, 7, 251] {
            for a in 1..p {
                assert_eq!(inverse_mod(a, p).unwrap() * a % p, 1);
            }
            assert_eq!(inverse_mod(0, p), None);
        }
    }

    #[test]
    fn rank_and_membership() {
        let vs: Vec<Vec<u8>> = vec![vec![1, 2, 0], vec![2, 1, 0], vec![0, 0, 1]];
        // over GF(3), (2,1,0) = 2·(1,2,0)
        assert_eq!(rank_of(3, 3, vs.iter().map(|v| v.as_slice())), 2);
        let mut b = EchelonBasis::new(3, 3);
        b.insert(&vs[0]);
        b.insert(&vs[2]);
        assert!(b.contains(&[2, 1, 2]));
        assert!(!b.contains(&[1, 1, 0]));
        let span = b.span(100).unwrap();
        assert_eq!(span.len(), 9);
        let mut sorted = span.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 9);
        assert!(b.span(8).is_err());
    }

    #[test]
    fn binary_rank() {
        let vs: Vec<Vec<u8>> = vec![vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![1, 0, 1, 0], vec![0, 0, 0, 1]];
        assert_eq!(rank_of(2, 4, vs.iter().map(|v| v.as_slice())), 3);
        assert_eq!(rank_of(2, 4, std::iter::empty()), 0);
    }
}

//! Hamming metrics and the generalized Hadamard property.
//!
//! Pairwise scans work on a bit-sliced copy of the code: for `p = 2` one bit
//! per symbol, otherwise one indicator plane per symbol value, so the number of
//! positions where `u - v = d` is `Σ_a popcount(U_a & V_{a-d})`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::code::PAryCode;
use crate::error::{Error, Result};

pub fn hamming_distance(u: &[u8], v: &[u8]) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::domain(format!(
            "lengths {} and {} differ",
            u.len(),
            v.len()
        )));
    }
    Ok(u.iter().zip(v).filter(|(a, b)| a != b).count())
}

pub fn hamming_weight(u: &[u8]) -> usize {
    u.iter().filter(|&&x| x != 0).count()
}

/// Bit-sliced words of one code.
pub(crate) struct Packed {
    p: usize,
    n: usize,
    /// u64 words per plane
    stride: usize,
    planes: usize,
    data: Vec<u64>,
}

impl Packed {
    pub(crate) fn new(p: u32, n: usize) -> Self {
        let planes = if p == 2 { 1 } else { p as usize };
        Packed {
            p: p as usize,
            n,
            stride: n.div_ceil(64),
            planes,
            data: Vec::new(),
        }
    }

    pub(crate) fn from_code(code: &PAryCode) -> Self {
        let mut packed = Packed::new(code.p(), code.length());
        packed.data.reserve(code.len() * packed.word_size());
        for w in code.words() {
            packed.push(w);
        }
        packed
    }

    fn word_size(&self) -> usize {
        self.stride * self.planes
    }

    pub(crate) fn len(&self) -> usize {
        self.data.len() / self.word_size().max(1)
    }

    pub(crate) fn push(&mut self, word: &[u8]) {
        let base = self.data.len();
        self.data.resize(base + self.word_size(), 0);
        let out = &mut self.data[base..];
        for (j, &x) in word.iter().enumerate() {
            let plane = if self.p == 2 {
                if x == 0 {
                    continue;
                }
                0
            } else {
                x as usize
            };
            out[plane * self.stride + j / 64] |= 1u64 << (j % 64);
        }
    }

    fn word(&self, i: usize) -> &[u64] {
        let size = self.word_size();
        &self.data[i * size..(i + 1) * size]
    }

    /// `counts[d]` = number of positions where `u_i - v_j = d` (mod p).
    pub(crate) fn difference_profile(&self, i: usize, j: usize, counts: &mut [usize]) {
        let (u, v) = (self.word(i), self.word(j));
        if self.p == 2 {
            let ones: u32 = u.iter().zip(v).map(|(a, b)| (a ^ b).count_ones()).sum();
            counts[1] = ones as usize;
            counts[0] = self.n - counts[1];
            return;
        }
        let st = self.stride;
        for (d, slot) in counts.iter_mut().enumerate().take(self.p) {
            let mut total = 0u32;
            for a in 0..self.p {
                let b = (a + self.p - d) % self.p;
                let ua = &u[a * st..(a + 1) * st];
                let vb = &v[b * st..(b + 1) * st];
                total += ua.iter().zip(vb).map(|(x, y)| (x & y).count_ones()).sum::<u32>();
            }
            *slot = total as usize;
        }
    }
}

/// Classification of one difference `u - v`.
pub(crate) fn difference_kind(counts: &[usize], n: usize) -> DifferenceKind {
    let p = counts.len();
    if counts.iter().any(|&c| c == n) {
        DifferenceKind::Constant
    } else if n % p == 0 && counts.iter().all(|&c| c == n / p) {
        DifferenceKind::Balanced
    } else {
        DifferenceKind::Unbalanced
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DifferenceKind {
    Constant,
    Balanced,
    Unbalanced,
}

/// Minimum distance and first GH violation found over all unordered pairs.
pub(crate) struct PairScan {
    pub min_distance: usize,
    pub violation: Option<(usize, usize, Vec<usize>)>,
}

pub(crate) fn scan_pairs(packed: &Packed, stop_at_violation: bool) -> PairScan {
    let mut counts = vec![0usize; packed.p];
    let mut min_distance = usize::MAX;
    let mut violation = None;
    let m = packed.len();
    'outer: for i in 0..m {
        for j in i + 1..m {
            packed.difference_profile(i, j, &mut counts);
            min_distance = min_distance.min(packed.n - counts[0]);
            if violation.is_none()
                && difference_kind(&counts, packed.n) == DifferenceKind::Unbalanced
            {
                violation = Some((i, j, counts.clone()));
                if stop_at_violation {
                    break 'outer;
                }
            }
        }
    }
    PairScan {
        min_distance,
        violation,
    }
}

/// Exact minimum distance by scanning all unordered pairs.
pub fn min_distance(code: &PAryCode) -> Result<usize> {
    if code.len() < 2 {
        return Err(Error::domain("minimum distance needs at least two codewords"));
    }
    Ok(scan_pairs(&Packed::from_code(code), false).min_distance)
}

/// Why a code failed the GH test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GhFailure {
    MissingZero,
    Cardinality { size: usize, expected: usize },
    NotClosedUnderOnes { word: String },
    UnbalancedPair { u: String, v: String, counts: Vec<usize> },
}

impl fmt::Display for GhFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GhFailure::MissingZero => write!(f, "zero word missing"),
            GhFailure::Cardinality { size, expected } => {
                write!(f, "|C| = {size}, expected p·n = {expected}")
            }
            GhFailure::NotClosedUnderOnes { word } => write!(f, "{word} + 1 not in C"),
            GhFailure::UnbalancedPair { u, v, counts } => {
                write!(f, "difference of {u} and {v} has symbol counts {counts:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhVerdict {
    pub failure: Option<GhFailure>,
}

impl GhVerdict {
    pub fn is_gh(&self) -> bool {
        self.failure.is_none()
    }
}

/// Renders a word as a digit string (space separated when `p > 10`).
pub fn word_string(word: &[u8], p: u32) -> String {
    if p <= 10 {
        word.iter().map(|&x| char::from(b'0' + x)).collect()
    } else {
        word.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    }
}

fn shifted_by_ones(word: &[u8], p: u32) -> Vec<u8> {
    word.iter().map(|&x| ((x as u32 + 1) % p) as u8).collect()
}

/// Structural conditions other than the pair scan: zero word, `|C| = p·n`,
/// and `C + 1 = C`.
pub(crate) fn gh_preconditions(code: &PAryCode) -> Option<GhFailure> {
    let p = code.p();
    if !code.contains_zero() {
        return Some(GhFailure::MissingZero);
    }
    let expected = p as usize * code.length();
    if code.len() != expected {
        return Some(GhFailure::Cardinality {
            size: code.len(),
            expected,
        });
    }
    code.words()
        .iter()
        .find(|w| !code.contains(&shifted_by_ones(w, p)))
        .map(|w| GhFailure::NotClosedUnderOnes {
            word: word_string(w, p),
        })
}

pub(crate) fn pair_failure(code: &PAryCode, scan: &PairScan) -> Option<GhFailure> {
    scan.violation.as_ref().map(|(i, j, counts)| GhFailure::UnbalancedPair {
        u: word_string(&code.words()[*i], code.p()),
        v: word_string(&code.words()[*j], code.p()),
        counts: counts.clone(),
    })
}

/// Tests whether `code` is the GH code `C_H` of a normalized GH matrix: it
/// contains zero, has `p·n` words, is closed under adding the all-one
/// vector, and every pairwise difference is constant or hits each symbol
/// exactly `n/p` times.
pub fn is_gh_code(code: &PAryCode) -> GhVerdict {
    if let Some(failure) = gh_preconditions(code) {
        return GhVerdict {
            failure: Some(failure),
        };
    }
    let scan = scan_pairs(&Packed::from_code(code), true);
    GhVerdict {
        failure: pair_failure(code, &scan),
    }
}

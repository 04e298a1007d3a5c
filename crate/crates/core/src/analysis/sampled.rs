//! Checks for codes too large to materialize.
//!
//! Codewords are generated on demand from the generator matrix. The size is
//! certified by [`span_size_by_torsion`](crate::code::span_size_by_torsion),
//! closure under the all-one vector by reducing it to a translation of the
//! additive code, and the pair condition by random sampling.

use std::ops::ControlFlow;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::code::random_codewords;
use crate::construction::GeneratorMatrix;
use crate::gray::GrayMap;
use crate::linalg::EchelonBasis;

use super::metrics::{difference_kind, DifferenceKind, Packed};

/// Per-block `e_r` such that `φ_r(u) + 1 = φ_r(u + e_r)` for every `u`, if
/// adding the all-one vector acts on every block as a translation. Checked
/// over the whole alphabet `Z_{p^r}`.
pub(crate) fn ones_translation(gray: &GrayMap) -> Option<Vec<u32>> {
    let p = gray.shape().p();
    let mut out = Vec::new();
    for table in gray.tables() {
        let inverse = table.inverse_map();
        let modulus = table.alphabet_size() as u32;
        let mut shift = None;
        for u in 0..modulus {
            let bumped: Vec<u8> = table
                .image(u)
                .iter()
                .map(|&x| ((x as u32 + 1) % p) as u8)
                .collect();
            let v = *inverse.get(bumped.as_slice())?;
            let e = (v + modulus - u) % modulus;
            match shift {
                None => shift = Some(e),
                Some(prev) if prev != e => return None,
                _ => {}
            }
        }
        out.push(shift?);
    }
    Some(out)
}

pub(crate) struct PairSample {
    pub pairs: usize,
    pub min_distance: usize,
    pub violation: Option<(Vec<u8>, Vec<u8>, Vec<usize>)>,
}

/// Draws `pool` random codewords and tests `pairs` random pairs of distinct
/// words among them.
pub(crate) fn sample_pairs(
    a: &GeneratorMatrix,
    gray: &GrayMap,
    pool: usize,
    pairs: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vec<u8>>, PairSample) {
    let p = a.shape().p();
    let n = gray.length();
    let words: Vec<Vec<u8>> = random_codewords(a, pool, rng)
        .iter()
        .map(|w| gray.apply(w.entries()))
        .collect();
    let mut packed = Packed::new(p, n);
    for w in &words {
        packed.push(w);
    }
    let mut counts = vec![0usize; p as usize];
    let mut sample = PairSample {
        pairs: 0,
        min_distance: usize::MAX,
        violation: None,
    };
    let mut attempts = 0usize;
    while sample.pairs < pairs && attempts < pairs.saturating_mul(20) && words.len() >= 2 {
        attempts += 1;
        let i = rng.gen_range(0..words.len());
        let j = rng.gen_range(0..words.len());
        if i == j {
            continue;
        }
        packed.difference_profile(i, j, &mut counts);
        if counts[0] == n {
            // same codeword drawn twice
            continue;
        }
        sample.pairs += 1;
        sample.min_distance = sample.min_distance.min(n - counts[0]);
        if sample.violation.is_none() && difference_kind(&counts, n) == DifferenceKind::Unbalanced
        {
            sample.violation = Some((words[i].clone(), words[j].clone(), counts.clone()));
        }
    }
    (words, sample)
}

pub(crate) enum StreamedRank {
    /// Every codeword was reduced; the basis spans the code.
    Exact(EchelonBasis),
    /// The rank passed `log_p |C|` before the walk finished.
    Exceeds(usize),
}

/// Rank of the Gray image, stopping as soon as it exceeds `k = log_p |C|`.
/// The sampled words are reduced first since they usually settle
/// nonlinearity quickly; the exhaustive walk runs only otherwise.
pub(crate) fn streamed_rank(
    a: &GeneratorMatrix,
    gray: &GrayMap,
    seeds: &[Vec<u8>],
    k: usize,
) -> StreamedRank {
    let p = a.shape().p();
    let mut basis = EchelonBasis::new(p, gray.length());
    for w in seeds {
        basis.insert(w);
        if basis.rank() > k {
            return StreamedRank::Exceeds(basis.rank());
        }
    }
    let mut buf = vec![0u8; gray.length()];
    let mut exceeded = false;
    // once the basis has rank k only membership needs testing
    let mut fast = (p == 2 && basis.rank() == k).then(|| BinarySpan::new(&basis));
    crate::code::for_each_codeword(a, |entries| {
        gray.apply_into(entries, &mut buf);
        if let Some(span) = fast.as_mut() {
            if span.contains(&buf) {
                return ControlFlow::Continue(());
            }
            fast = None;
        }
        basis.reduce(&mut buf);
        if buf.iter().any(|&x| x != 0) {
            basis.insert_reduced(buf.clone());
            if basis.rank() > k {
                exceeded = true;
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    if exceeded {
        StreamedRank::Exceeds(basis.rank())
    } else {
        StreamedRank::Exact(basis)
    }
}

/// Membership in the span of a binary basis in reduced echelon form: `v`
/// lies in the span iff it equals the sum of the rows whose pivot is set in
/// `v`.
struct BinarySpan {
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    acc: Vec<u8>,
}

impl BinarySpan {
    fn new(basis: &EchelonBasis) -> Self {
        let rows = basis.rows().to_vec();
        let pivots = rows
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).unwrap())
            .collect();
        let len = rows.first().map_or(0, Vec::len);
        BinarySpan {
            rows,
            pivots,
            acc: vec![0; len],
        }
    }

    fn contains(&mut self, v: &[u8]) -> bool {
        self.acc.fill(0);
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            if v[piv] != 0 {
                for (a, &x) in self.acc.iter_mut().zip(row) {
                    *a ^= x;
                }
            }
        }
        self.acc == v
    }
}

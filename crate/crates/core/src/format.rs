//! File formats: matrix text and JSON, code dumps.
//!
//! Matrix text format, one header line then one line per generator:
//!
//! ```text
//! p=2 s=3 alpha=2,1,1 t=1,0,1
//! 1 1 | 2 | 4
//! 0 1 | 1 | 1
//! ```
//!
//! Entries of block `b` (0-based) lie in `0..p^(b+1)`. Parsing and printing
//! round-trip byte for byte.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::analysis::word_string;
use crate::construction::{GeneratorMatrix, TypeSignature};
use crate::error::{Error, Result};
use crate::gray::GrayMap;
use crate::ring::CodeShape;

/// Text form of a matrix; the same as its `Display`.
pub fn matrix_to_text(a: &GeneratorMatrix) -> String {
    a.to_string()
}

fn parse_list(line: usize, key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|x| {
            x.parse::<usize>()
                .map_err(|_| Error::parse(line, format!("{key}: {x:?} is not a nonnegative integer")))
        })
        .collect()
}

struct Header {
    p: u32,
    s: usize,
    alphas: Vec<usize>,
    t: Vec<usize>,
}

fn parse_header(text: &str) -> Result<Header> {
    let mut fields = text.split(' ');
    let mut take = |key: &str| -> Result<&str> {
        fields
            .next()
            .and_then(|f| f.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
            .ok_or_else(|| Error::parse(1, format!("expected `{key}=…` in header {text:?}")))
    };
    let p = take("p")?
        .parse::<u32>()
        .map_err(|_| Error::parse(1, "p is not an integer"))?;
    let s = take("s")?
        .parse::<usize>()
        .map_err(|_| Error::parse(1, "s is not an integer"))?;
    let alphas = parse_list(1, "alpha", take("alpha")?)?;
    let t = parse_list(1, "t", take("t")?)?;
    if fields.next().is_some() {
        return Err(Error::parse(1, "trailing fields in header"));
    }
    if alphas.len() != s || t.len() != s {
        return Err(Error::parse(
            1,
            format!("s = {s} but alpha has {} and t has {} entries", alphas.len(), t.len()),
        ));
    }
    Ok(Header { p, s, alphas, t })
}

/// Parses the matrix text format. Rejects anything that would not print
/// back identically: stray whitespace, out-of-range entries, wrong widths.
pub fn parse_matrix(text: &str) -> Result<GeneratorMatrix> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| Error::parse(1, "input must end with a newline"))?;
    let mut lines = body.split('\n');
    let header = parse_header(lines.next().unwrap_or(""))?;
    let shape = CodeShape::new(header.p, header.alphas.clone())?;
    let sig = TypeSignature::new(header.p, header.t)?;
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let blocks: Vec<&str> = line.split(" | ").collect();
        if blocks.len() != header.s {
            return Err(Error::parse(
                line_no,
                format!("{} blocks, expected {}", blocks.len(), header.s),
            ));
        }
        let mut row = Vec::with_capacity(header.s);
        for (b, block) in blocks.iter().enumerate() {
            let modulus = shape.modulus(b);
            let entries = block
                .split(' ')
                .map(|x| match x.parse::<u32>() {
                    Ok(v) if v < modulus && x == v.to_string() => Ok(v),
                    _ => Err(Error::parse(
                        line_no,
                        format!("block {}: {x:?} is not an element of Z_{modulus}", b + 1),
                    )),
                })
                .collect::<Result<Vec<u32>>>()?;
            if entries.len() != header.alphas[b] {
                return Err(Error::parse(
                    line_no,
                    format!(
                        "block {} has {} entries, alpha says {}",
                        b + 1,
                        entries.len(),
                        header.alphas[b]
                    ),
                ));
            }
            row.push(entries);
        }
        rows.push(row);
    }
    if rows.len() != sig.rank() {
        return Err(Error::parse(
            rows.len() + 1,
            format!("{} rows, t calls for {}", rows.len(), sig.rank()),
        ));
    }
    GeneratorMatrix::from_parts(shape, rows, sig)
}

/// JSON form of a matrix. `rows[k][b]` is block `b` of generator `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub p: u32,
    pub s: usize,
    pub alpha: Vec<usize>,
    pub t: Vec<usize>,
    pub rows: Vec<Vec<Vec<u32>>>,
}

impl MatrixDocument {
    pub fn from_matrix(a: &GeneratorMatrix) -> Self {
        let shape = a.shape();
        MatrixDocument {
            p: shape.p(),
            s: shape.s(),
            alpha: shape.alphas().to_vec(),
            t: a.signature().t().to_vec(),
            rows: a
                .rows()
                .iter()
                .map(|r| (0..shape.s()).map(|b| r.block(b).to_vec()).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<GeneratorMatrix> {
        if self.alpha.len() != self.s || self.t.len() != self.s {
            return Err(Error::domain(format!(
                "s = {} but alpha has {} and t has {} entries",
                self.s,
                self.alpha.len(),
                self.t.len()
            )));
        }
        let shape = CodeShape::new(self.p, self.alpha.clone())?;
        for (k, row) in self.rows.iter().enumerate() {
            for (b, block) in row.iter().enumerate() {
                let m = shape.modulus(b.min(self.s - 1));
                if block.iter().any(|&x| x >= m) {
                    return Err(Error::domain(format!(
                        "row {k}, block {}: entry outside Z_{m}",
                        b + 1
                    )));
                }
            }
        }
        let sig = TypeSignature::new(self.p, self.t.clone())?;
        GeneratorMatrix::from_parts(shape, self.rows.clone(), sig)
    }
}

pub fn matrix_to_json(a: &GeneratorMatrix) -> Result<String> {
    Ok(serde_json::to_string_pretty(&MatrixDocument::from_matrix(a))?)
}

pub fn matrix_from_json(text: &str) -> Result<GeneratorMatrix> {
    serde_json::from_str::<MatrixDocument>(text)?.to_matrix()
}

/// Reads a matrix file, text or JSON (detected by a leading `{`).
pub fn read_matrix<R: BufRead>(mut r: R) -> Result<GeneratorMatrix> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    if text.trim_start().starts_with('{') {
        matrix_from_json(&text)
    } else {
        parse_matrix(&text)
    }
}

/// Writes every codeword of `span(a)` in row syntax, one per line, in walk
/// order.
pub fn write_span<W: Write>(a: &GeneratorMatrix, cap: u64, mut w: W) -> Result<()> {
    let code = crate::code::span_capped(a, cap)?;
    for word in code.words() {
        writeln!(w, "{word}")?;
    }
    Ok(())
}

/// Writes `Φ(span(a))` as digit strings, one per line, sorted.
pub fn write_gray_image<W: Write>(a: &GeneratorMatrix, cap: u64, mut w: W) -> Result<()> {
    let code = crate::code::gray_image(&crate::code::span_capped(a, cap)?)?;
    for word in code.words() {
        writeln!(w, "{}", word_string(word, code.p()))?;
    }
    Ok(())
}

/// Writes `Φ(w)` for each generator row of `a`.
pub fn write_gray_rows<W: Write>(a: &GeneratorMatrix, mut w: W) -> Result<()> {
    let gray = GrayMap::new(a.shape())?;
    for row in a.rows() {
        writeln!(w, "{}", word_string(&gray.apply(row.entries()), a.shape().p()))?;
    }
    Ok(())
}

//! Sweeps the analysis over every admissible signature within a size cap.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{verify_theorems, AnalysisOptions, AnalysisReport};
use crate::construction::TypeSignature;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub primes: Vec<u32>,
    pub s_values: Vec<usize>,
    /// Largest `|C|` included.
    pub max_size: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            primes: vec![2, 3],
            s_values: vec![2, 3],
            max_size: 1 << 16,
        }
    }
}

/// A `(p, s)` pair contributing no signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipNote {
    pub p: u32,
    pub s: usize,
    pub reason: String,
}

impl GridSpec {
    /// Every signature with `t_1, t_s ≥ 1` and `|C| ≤ max_size`, ordered by
    /// `p`, then `s`, then `t` lexicographically.
    pub fn signatures(&self) -> Result<(Vec<TypeSignature>, Vec<SkipNote>)> {
        let mut sigs = Vec::new();
        let mut skipped = Vec::new();
        for &p in &self.primes {
            for &s in &self.s_values {
                // validates p and s
                let base = TypeSignature::base(p, s)?;
                let budget = log_floor(self.max_size, p);
                let before = sigs.len();
                let mut t = vec![0; s];
                enumerate(p, s, 0, budget, &mut t, &mut sigs)?;
                if sigs.len() == before {
                    skipped.push(SkipNote {
                        p,
                        s,
                        reason: format!(
                            "smallest code {base} has {p}^{} words, above the cap {}",
                            base.size_exponent(),
                            self.max_size
                        ),
                    });
                }
            }
        }
        Ok((sigs, skipped))
    }
}

/// Largest `e` with `p^e ≤ x`, or `None` when `x = 0`.
fn log_floor(x: u64, p: u32) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let mut e = 0;
    let mut acc = 1u64;
    while let Some(next) = acc.checked_mul(p as u64).filter(|&v| v <= x) {
        acc = next;
        e += 1;
    }
    Some(e)
}

fn enumerate(
    p: u32,
    s: usize,
    idx: usize,
    budget: Option<u32>,
    t: &mut Vec<usize>,
    out: &mut Vec<TypeSignature>,
) -> Result<()> {
    let Some(budget) = budget else {
        return Ok(());
    };
    if idx == s {
        out.push(TypeSignature::new(p, t.clone())?);
        return Ok(());
    }
    // a generator of kind i contributes s-i+1 to the exponent
    let weight = (s - idx) as u32;
    let min = if idx == 0 || idx == s - 1 { 1 } else { 0 };
    // leave room for the mandatory later generators
    let reserve: u32 = if idx < s - 1 { 1 } else { 0 };
    let mut ti = min;
    while weight * ti as u32 + reserve <= budget {
        t[idx] = ti;
        enumerate(p, s, idx + 1, Some(budget - weight * ti as u32), t, out)?;
        ti += 1;
    }
    t[idx] = 0;
    Ok(())
}

/// One line of the summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRow {
    pub signature: String,
    pub n: usize,
    pub size: u64,
    pub d: usize,
    pub is_gh: bool,
    pub is_linear: bool,
    pub ker: usize,
    pub rank: Option<usize>,
    pub passed: bool,
    pub failed_checks: Vec<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSummary {
    pub spec: GridSpec,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: Vec<SkipNote>,
    pub rows: Vec<GridRow>,
    pub reports: Vec<AnalysisReport>,
}

impl GridSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// Fixed-width summary table.
    pub fn to_table(&self) -> String {
        let width = self.rows.iter().map(|r| r.signature.len()).max().unwrap_or(9).max(9);
        let mut out = format!(
            "{:<width$}  {:>6}  {:>6}  {:>5}  {:>5}  {:>6}  {:>4}  {:>5}  result\n",
            "signature", "n", "|C|", "d", "gh", "linear", "ker", "rank"
        );
        for r in &self.rows {
            let rank = r.rank.map_or("-".to_string(), |x| x.to_string());
            let result = match (&r.error, r.passed) {
                (Some(e), _) => format!("ERROR {e}"),
                (None, true) => "PASS".to_string(),
                (None, false) => format!("FAIL {}", r.failed_checks.join(",")),
            };
            out.push_str(&format!(
                "{:<width$}  {:>6}  {:>6}  {:>5}  {:>5}  {:>6}  {:>4}  {:>5}  {result}\n",
                r.signature, r.n, r.size, r.d, r.is_gh, r.is_linear, r.ker, rank
            ));
        }
        for note in &self.skipped {
            out.push_str(&format!("skipped p={} s={}: {}\n", note.p, note.s, note.reason));
        }
        out.push_str(&format!(
            "{} signatures, {} passed, {} failed\n",
            self.total, self.passed, self.failed
        ));
        out
    }

    /// CSV with columns `signature,n,size,d,is_gh,is_linear,ker,rank`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["signature", "n", "size", "d", "is_gh", "is_linear", "ker", "rank"])?;
        for r in self.rows.iter().filter(|r| r.error.is_none()) {
            csv.write_record([
                r.signature.clone(),
                r.n.to_string(),
                r.size.to_string(),
                r.d.to_string(),
                r.is_gh.to_string(),
                r.is_linear.to_string(),
                r.ker.to_string(),
                r.rank.map_or(String::new(), |x| x.to_string()),
            ])?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// Runs [`verify_theorems`] on every signature of the grid, in parallel.
/// Results are in enumeration order regardless of scheduling.
pub fn run_grid(spec: &GridSpec, opts: &AnalysisOptions) -> Result<GridSummary> {
    let (sigs, skipped) = spec.signatures()?;
    let opts = AnalysisOptions {
        max_size: opts.max_size.max(spec.max_size),
        ..opts.clone()
    };
    let outcomes: Vec<(String, Result<AnalysisReport>)> = sigs
        .par_iter()
        .map(|sig| (sig.to_string(), verify_theorems(sig, &opts)))
        .collect();
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut reports = Vec::with_capacity(outcomes.len());
    for (signature, outcome) in outcomes {
        match outcome {
            Ok(r) => {
                rows.push(GridRow {
                    signature,
                    n: r.n,
                    size: r.size,
                    d: r.min_distance,
                    is_gh: r.is_gh,
                    is_linear: r.is_linear,
                    ker: r.kernel_dim,
                    rank: r.rank,
                    passed: r.passed(),
                    failed_checks: r
                        .checks
                        .iter()
                        .filter(|c| c.status == crate::analysis::CheckStatus::Fail)
                        .map(|c| c.name.clone())
                        .collect(),
                    error: None,
                });
                reports.push(r);
            }
            Err(e) => rows.push(GridRow {
                signature,
                n: 0,
                size: 0,
                d: 0,
                is_gh: false,
                is_linear: false,
                ker: 0,
                rank: None,
                passed: false,
                failed_checks: Vec::new(),
                error: Some(e.to_string()),
            }),
        }
    }
    let passed = rows.iter().filter(|r| r.passed).count();
    Ok(GridSummary {
        spec: spec.clone(),
        total: rows.len(),
        passed,
        failed: rows.len() - passed,
        skipped,
        rows,
        reports,
    })
}

/// Writes `contents` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::domain(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(contents).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// All t in a box, filtered by the admissibility rules directly.
    fn brute_signatures(spec: &GridSpec) -> Vec<TypeSignature> {
        let mut out = Vec::new();
        for &p in &spec.primes {
            for &s in &spec.s_values {
                let bound = 20usize;
                let total = (bound + 1).pow(s as u32);
                for code in 0..total {
                    let t: Vec<usize> = (0..s).map(|i| code / (bound + 1).pow(i as u32) % (bound + 1)).collect();
                    if let Ok(sig) = TypeSignature::new(p, t) {
                        if sig.code_size().is_some_and(|c| c <= spec.max_size) {
                            out.push(sig);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_filtered_box() {
        for max_size in [1u64, 16, 1 << 10, 1 << 16] {
            let spec = GridSpec {
                max_size,
                ..GridSpec::default()
            };
            let (mut got, _) = spec.signatures().unwrap();
            let mut want = brute_signatures(&spec);
            let key = |s: &TypeSignature| (s.p(), s.s(), s.t().to_vec());
            got.sort_by_key(key);
            want.sort_by_key(key);
            assert_eq!(got, want, "cap {max_size}");
        }
    }

    #[test]
    fn small_cap_notes_skips() {
        let spec = GridSpec {
            max_size: 16,
            ..GridSpec::default()
        };
        let (sigs, skipped) = spec.signatures().unwrap();
        // (2;1,1), (2;1,2), (2;1,0,1)
        assert_eq!(sigs.len(), 3);
        let pairs: Vec<(u32, usize)> = skipped.iter().map(|n| (n.p, n.s)).collect();
        assert_eq!(pairs, vec![(3, 2), (3, 3)]);
    }

    #[test]
    fn empty_grid() {
        let spec = GridSpec {
            primes: vec![],
            ..GridSpec::default()
        };
        let summary = run_grid(&spec, &AnalysisOptions::default()).unwrap();
        assert_eq!(summary.total, 0);
        assert!(summary.all_passed());
    }

    #[test]
    fn small_grid_passes_and_is_deterministic() {
        let spec = GridSpec {
            max_size: 1 << 8,
            ..GridSpec::default()
        };
        let a = run_grid(&spec, &AnalysisOptions::default()).unwrap();
        assert!(a.all_passed(), "{}", a.to_table());
        let b = run_grid(&spec, &AnalysisOptions::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("signature,n,size,d,is_gh,is_linear,ker,rank\n"));
        assert_eq!(text.lines().count(), a.total + 1);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}

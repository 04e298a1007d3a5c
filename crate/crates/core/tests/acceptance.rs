//! Acceptance suite. Each criterion prints one `[PASS]` or `[FAIL]` line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Tolerances are exact throughout; the only sampled quantity is the pair
//! condition for codes above 2^12 words, which must see at least 10^5 pairs
//! with no violation.

use std::collections::HashSet;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use ghcodes::analysis::{
    checks, is_linear, is_linear_by_kernel, kernel, kernel_basis, verify_theorems,
    AnalysisOptions, AnalysisReport, CheckStatus, KernelMode, Tier,
};
use ghcodes::code::{gray_image, order_p_subcode, span, PAryCode};
use ghcodes::construction::{build, TypeSignature};
use ghcodes::gray::phi;
use ghcodes::grid::{run_grid, GridSpec, GridSummary};
use ghcodes::linalg::EchelonBasis;

const EXHAUSTIVE_CAP: u64 = 1 << 12;
const MIN_SAMPLED_PAIRS: u64 = 100_000;
const GRID_BUDGET: Duration = Duration::from_secs(120);
/// Codes small enough for the quadratic oracles written out below.
const ORACLE_CAP: usize = 512;

struct Grid {
    summary: GridSummary,
    elapsed: Duration,
}

fn grid() -> &'static Grid {
    static GRID: OnceLock<Grid> = OnceLock::new();
    GRID.get_or_init(|| {
        let start = Instant::now();
        let summary = run_grid(&GridSpec::default(), &AnalysisOptions::default()).unwrap();
        Grid {
            summary,
            elapsed: start.elapsed(),
        }
    })
}

fn report_line(n: u32, title: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("[PASS] criterion {n}: {title}");
    } else {
        println!("[FAIL] criterion {n}: {title}");
        for f in failures.iter().take(10) {
            println!("       {f}");
        }
    }
}

fn signature(r: &AnalysisReport) -> TypeSignature {
    TypeSignature::new(r.p, r.t.clone()).unwrap()
}

fn materialize(sig: &TypeSignature) -> (ghcodes::code::AdditiveCode, PAryCode) {
    let h = span(&build(sig).unwrap()).unwrap();
    let c = gray_image(&h).unwrap();
    (h, c)
}

fn add(u: &[u8], v: &[u8], p: u32) -> Vec<u8> {
    u.iter()
        .zip(v)
        .map(|(&a, &b)| ((a as u32 + b as u32) % p) as u8)
        .collect()
}

fn sub(u: &[u8], v: &[u8], p: u32) -> Vec<u8> {
    u.iter()
        .zip(v)
        .map(|(&a, &b)| ((a as u32 + p - b as u32) % p) as u8)
        .collect()
}

/// GH test written directly from its four conditions.
fn gh_oracle(c: &PAryCode) -> Result<usize, String> {
    let p = c.p();
    let n = c.length();
    let set: HashSet<&[u8]> = c.words().iter().map(Vec::as_slice).collect();
    if !set.contains(vec![0u8; n].as_slice()) {
        return Err("zero missing".into());
    }
    if set.len() != p as usize * n {
        return Err(format!("|C| = {} ≠ p·n = {}", set.len(), p as usize * n));
    }
    let ones = vec![1u8; n];
    for w in c.words() {
        if !set.contains(add(w, &ones, p).as_slice()) {
            return Err("not closed under +1".into());
        }
    }
    let mut d = usize::MAX;
    for (i, u) in c.words().iter().enumerate() {
        for v in &c.words()[i + 1..] {
            let diff = sub(u, v, p);
            let mut counts = vec![0usize; p as usize];
            for &x in &diff {
                counts[x as usize] += 1;
            }
            let constant = counts.iter().any(|&k| k == n);
            let balanced = counts.iter().all(|&k| k * p as usize == n);
            if !constant && !balanced {
                return Err(format!("unbalanced difference {counts:?}"));
            }
            d = d.min(n - counts[0]);
        }
    }
    Ok(d)
}

/// `K(C)` from the definition, with `C` as a hash set.
fn kernel_oracle(c: &PAryCode) -> HashSet<Vec<u8>> {
    let p = c.p();
    let set: HashSet<&[u8]> = c.words().iter().map(Vec::as_slice).collect();
    c.words()
        .iter()
        .filter(|x| c.words().iter().all(|w| set.contains(add(x, w, p).as_slice())))
        .cloned()
        .collect()
}

/// Closure under addition; with `0 ∈ C` over a prime field this is linearity.
fn closed_oracle(c: &PAryCode) -> bool {
    let set: HashSet<&[u8]> = c.words().iter().map(Vec::as_slice).collect();
    c.words().iter().all(|u| {
        c.words()
            .iter()
            .all(|v| set.contains(add(u, v, c.p()).as_slice()))
    })
}

/// The classification stated directly on `t`.
fn expected_linear(p: u32, t: &[usize]) -> bool {
    p == 2 && t[0] == 1 && t[1..t.len() - 1].iter().all(|&x| x == 0)
}

fn span_set(p: u32, n: usize, vectors: &[Vec<u8>]) -> HashSet<Vec<u8>> {
    let mut basis = EchelonBasis::new(p, n);
    for v in vectors {
        basis.insert(v);
    }
    basis.span(u64::MAX).unwrap().into_iter().collect()
}

#[test]
fn criterion_1_fixture_exactness() {
    let bin = env!("CARGO_BIN_EXE_ghcodes");
    let fixtures = env!("CARGO_MANIFEST_DIR").to_string() + "/tests/fixtures/";
    let mut failures = Vec::new();
    for (t, file) in [("1,0,1", "A_2_1_0_1.txt"), ("2,0,1", "A_2_2_0_1.txt")] {
        let expected = std::fs::read(fixtures.clone() + file).unwrap();
        let start = Instant::now();
        let out = Command::new(bin)
            .args(["construct", "-p", "2", "-s", "3", "-t", t])
            .output()
            .unwrap();
        let elapsed = start.elapsed();
        if out.status.code() != Some(0) {
            failures.push(format!("t={t}: exit {:?}", out.status.code()));
        }
        if out.stdout != expected {
            failures.push(format!(
                "t={t}: output differs from {file}:\n{}",
                String::from_utf8_lossy(&out.stdout)
            ));
        }
        if elapsed >= Duration::from_secs(1) {
            failures.push(format!("t={t}: took {elapsed:?}"));
        }
    }
    report_line(1, "construct reproduces the two printed matrices byte for byte", &failures);
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn criterion_2_gh_property_over_grid() {
    let g = grid();
    let mut failures = Vec::new();
    if g.elapsed > GRID_BUDGET {
        failures.push(format!("grid took {:?}", g.elapsed));
    }
    if g.summary.reports.len() != g.summary.total || g.summary.total == 0 {
        failures.push(format!(
            "{} reports for {} signatures",
            g.summary.reports.len(),
            g.summary.total
        ));
    }
    for r in &g.summary.reports {
        let p = r.p as usize;
        let target = r.n * (p - 1) / p;
        if !r.is_gh || r.size != (p * r.n) as u64 || r.min_distance != target {
            failures.push(format!(
                "{}: is_gh {}, |C| {} vs p·n {}, d {} vs {target}",
                r.signature,
                r.is_gh,
                r.size,
                p * r.n,
                r.min_distance
            ));
        }
        for name in [checks::CODE_SIZE, checks::GH_PROPERTY, checks::MIN_DISTANCE] {
            if r.check(name).map(|c| c.status) != Some(CheckStatus::Pass) {
                failures.push(format!("{}: {name} not PASS", r.signature));
            }
        }
        match r.tier {
            Tier::Exhaustive => {
                let pairs = r.size * (r.size - 1) / 2;
                if r.size > EXHAUSTIVE_CAP || r.pairs_checked != pairs || !r.min_distance_exact {
                    failures.push(format!("{}: exhaustive scan incomplete", r.signature));
                }
            }
            Tier::Sampled => {
                if r.size <= EXHAUSTIVE_CAP || r.pairs_checked < MIN_SAMPLED_PAIRS {
                    failures.push(format!(
                        "{}: only {} sampled pairs",
                        r.signature, r.pairs_checked
                    ));
                }
            }
        }
        // independent check from the definition on the small codes
        if r.size as usize <= ORACLE_CAP {
            let (_, c) = materialize(&signature(r));
            match gh_oracle(&c) {
                Ok(d) if d == target => {}
                Ok(d) => failures.push(format!("{}: oracle distance {d}", r.signature)),
                Err(e) => failures.push(format!("{}: oracle says {e}", r.signature)),
            }
        }
    }
    println!(
        "       {} signatures in {:.1?}",
        g.summary.total, g.elapsed
    );
    report_line(2, "every grid code is GH with |C| = p·n and d = n(p-1)/p", &failures);
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn criterion_3_linearity_classification() {
    let g = grid();
    let mut failures = Vec::new();
    let mut linear = 0;
    for r in &g.summary.reports {
        let expected = expected_linear(r.p, &r.t);
        linear += r.is_linear as usize;
        if r.is_linear != expected {
            failures.push(format!("{}: is_linear {}", r.signature, r.is_linear));
        }
        if r.p == 3 && r.is_linear {
            failures.push(format!("{}: ternary code reported linear", r.signature));
        }
        if r.size as usize <= ORACLE_CAP {
            let (_, c) = materialize(&signature(r));
            if closed_oracle(&c) != expected {
                failures.push(format!("{}: closure oracle disagrees", r.signature));
            }
        }
    }
    println!("       {linear} linear of {}", g.summary.reports.len());
    report_line(3, "linear exactly for p = 2, t_1 = 1, interior t_i = 0", &failures);
    assert!(failures.is_empty(), "{failures:?}");
}

/// Nonlinear grid signatures small enough for the brute-force kernel.
fn nonlinear_small() -> Vec<TypeSignature> {
    grid()
        .summary
        .reports
        .iter()
        .filter(|r| !r.is_linear && r.size <= EXHAUSTIVE_CAP)
        .map(signature)
        .collect()
}

#[test]
fn criterion_4_kernel_is_order_p_image() {
    let mut failures = Vec::new();
    let sigs = nonlinear_small();
    for sig in &sigs {
        let (h, c) = materialize(sig);
        let k: HashSet<Vec<u8>> = kernel(&c).unwrap().words().iter().cloned().collect();
        let image: HashSet<Vec<u8>> = gray_image(&order_p_subcode(&h))
            .unwrap()
            .words()
            .iter()
            .cloned()
            .collect();
        if k != image {
            failures.push(format!("{sig}: |K| = {}, |Φ(H_p)| = {}", k.len(), image.len()));
        }
        if c.len() <= ORACLE_CAP && kernel_oracle(&c) != k {
            failures.push(format!("{sig}: kernel differs from the definition"));
        }
    }
    println!("       {} nonlinear codes with |C| ≤ 2^12", sigs.len());
    report_line(4, "brute-force kernel equals the image of the order-p subcode", &failures);
    assert!(!sigs.is_empty());
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn criterion_5_kernel_basis_and_dimension() {
    let mut failures = Vec::new();
    let sigs = nonlinear_small();
    let mut spot = Vec::new();
    for sig in &sigs {
        let a = build(sig).unwrap();
        let (_, c) = materialize(sig);
        let q = kernel_basis(&a).unwrap();
        let spanned = span_set(sig.p(), c.length(), &q);
        let k: HashSet<Vec<u8>> = kernel(&c).unwrap().words().iter().cloned().collect();
        let sum_t: usize = sig.t().iter().sum();
        let mut independent = EchelonBasis::new(sig.p(), c.length());
        let rank = q.iter().filter(|v| independent.insert(v)).count();
        // |K| = p^dim, so the dimension comes from the brute-force size
        let dim = (k.len() as f64).log(sig.p() as f64).round() as usize;
        if spanned != k || rank != q.len() || q.len() != sum_t || dim != sum_t {
            failures.push(format!(
                "{sig}: span = K {}, independent {}, |Q| {}, dim {dim}, Σt {sum_t}",
                spanned == k,
                rank == q.len(),
                q.len()
            ));
        }
        if (sig.p(), sig.t()) == (2, &[2, 0, 1][..]) || (sig.p(), sig.t()) == (3, &[1, 1][..]) {
            spot.push((sig.to_string(), dim));
        }
    }
    spot.sort();
    let want = vec![("p=2 s=3 t=2,0,1".to_string(), 3), ("p=3 s=2 t=1,1".to_string(), 2)];
    if spot != want {
        failures.push(format!("spot values {spot:?}, expected {want:?}"));
    }
    report_line(5, "span(Φ(Q)) is the kernel, Φ(Q) independent, ker = Σ t_i", &failures);
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn criterion_6_gray_map_ground_truth() {
    let mut failures = Vec::new();
    // φ_2 on Z_4: 0 ↦ 00, 1 ↦ 01, 2 ↦ 11, 3 ↦ 10
    let table: [[u8; 2]; 4] = [[0, 0], [0, 1], [1, 1], [1, 0]];
    for (u, want) in table.iter().enumerate() {
        let got = phi(u as u64, 2, 2).unwrap();
        if got != want {
            failures.push(format!("φ_2({u}) = {got:?}, expected {want:?}"));
        }
    }
    for (p, r) in [(2u32, 2u32), (2, 3), (3, 2), (5, 2)] {
        let basis: Vec<Vec<u8>> = (0..r).map(|i| phi((p as u64).pow(i), p, r).unwrap()).collect();
        let width = basis[0].len();
        let total = (p as u64).pow(r);
        for u in 0..total {
            // λ_i are the digits of u
            let mut lhs = vec![0u8; width];
            let mut rest = u;
            for b in &basis {
                let lambda = (rest % p as u64) as u8;
                rest /= p as u64;
                for (x, &y) in lhs.iter_mut().zip(b) {
                    *x = ((*x as u32 + lambda as u32 * y as u32) % p) as u8;
                }
            }
            let rhs = phi(u, p, r).unwrap();
            if lhs != rhs {
                failures.push(format!("p={p} r={r} u={u}: {lhs:?} ≠ {rhs:?}"));
            }
        }
    }
    report_line(6, "φ_2 table and digit linearity over all λ", &failures);
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn criterion_7_cross_implementation_agreement() {
    let g = grid();
    let mut failures = Vec::new();
    let brute = AnalysisOptions {
        kernel: KernelMode::Brute,
        ..AnalysisOptions::default()
    };
    let basis = AnalysisOptions {
        kernel: KernelMode::Basis,
        ..AnalysisOptions::default()
    };
    let sigs = nonlinear_small();
    for sig in &sigs {
        let a = verify_theorems(sig, &brute).unwrap();
        let b = verify_theorems(sig, &basis).unwrap();
        if a.kernel_digest != b.kernel_digest || a.kernel_dim != b.kernel_dim {
            failures.push(format!("{sig}: brute and basis kernels differ"));
        }
    }
    for r in &g.summary.reports {
        let k = (r.size as f64).log(r.p as f64).round() as usize;
        if (r.kernel_dim == k) != r.is_linear {
            failures.push(format!("{}: ker {} vs log_p|C| {k}", r.signature, r.kernel_dim));
        }
        if r.tier == Tier::Exhaustive {
            let (_, c) = materialize(&signature(r));
            let by_rank = is_linear(&c);
            let by_kernel = is_linear_by_kernel(&c, EXHAUSTIVE_CAP).unwrap();
            if by_rank != by_kernel || by_rank != r.is_linear {
                failures.push(format!(
                    "{}: rank says {by_rank}, kernel says {by_kernel}",
                    r.signature
                ));
            }
        }
    }
    println!("       {} kernel pairs compared", sigs.len());
    report_line(7, "brute and basis kernels agree; rank and kernel agree on linearity", &failures);
    assert!(failures.is_empty(), "{failures:?}");
}

//! Runs every structural check on one signature and prints the report.
//!
//!     cargo run --release --example verify_signature -- 2 2,1,1
//!     cargo run --release --example verify_signature -- 2 1,14 --json

use ghcodes::analysis::{verify_theorems, AnalysisOptions};
use ghcodes::construction::TypeSignature;

fn main() -> ghcodes::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let p = args.first().map_or(3, |s| s.parse().expect("p must be an integer"));
    let t = args.get(1).map_or(vec![1, 1], |s| {
        s.split(',')
            .map(|x| x.parse().expect("t must be a comma-separated list"))
            .collect()
    });
    let sig = TypeSignature::new(p, t)?;
    let report = verify_theorems(&sig, &AnalysisOptions::from_env()?)?;
    if args.iter().any(|a| a == "--json") {
        println!("{}", report.to_json()?);
    } else {
        print!("{report}");
    }
    std::process::exit(if report.passed() { 0 } else { 1 });
}
